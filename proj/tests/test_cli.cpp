#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef P2H_CLI_PATH
#define P2H_CLI_PATH "./p2h"
#endif

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(P2H_CLI_PATH) + " " + args +
                    " >/dev/null 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("artifacts are byte-identical across runs") {
  REQUIRE(run_cli("series --n 1 --kind infty --K 6 --alpha 0.25,0.5 "
                  "--output cli_s1.json") == 0);
  REQUIRE(run_cli("series --n 1 --kind infty --K 6 --alpha 0.25,0.5 "
                  "--output cli_s2.json") == 0);
  std::string a = slurp("cli_s1.json"), b = slurp("cli_s2.json");
  REQUIRE(!a.empty());
  CHECK(a == b);

  // parallel pole scan must reduce deterministically
  const std::string pm =
      "polemap --n 1 --kind infty --K 8 --alpha 0,0 --angle-start 2.5 "
      "--angle-end 3.8 --count 6 --r-seed 30 --r-min 15 --tol 1e-9 ";
  REQUIRE(run_cli(pm + "--output cli_p1.csv") == 0);
  REQUIRE(run_cli(pm + "--output cli_p2.csv") == 0);
  std::string p1 = slurp("cli_p1.csv"), p2 = slurp("cli_p2.csv");
  REQUIRE(!p1.empty());
  CHECK(p1 == p2);
}

TEST_CASE("outputs embed the config and version header") {
  REQUIRE(run_cli("gen-eq --n 2 --format latex --output cli_eq.tex") == 0);
  std::string tex = slurp("cli_eq.tex");
  CHECK(tex.find("p2hier") != std::string::npos);
  CHECK(tex.find("\"subcommand\":\"gen-eq\"") != std::string::npos);
  CHECK(tex.find("10V^{2}V_{2x}") != std::string::npos);

  REQUIRE(run_cli("verify --n 1 --output cli_v.json") == 0);
  std::string v = slurp("cli_v.json");
  CHECK(v.find("\"artifact_version\"") != std::string::npos);
  CHECK(v.find("\"all_ok\": true") != std::string::npos);
}

TEST_CASE("distinct exit codes per error class") {
  CHECK(run_cli("gen-eq --n 0 --output cli_bad.json") == 2);
  CHECK(run_cli("gen-eq --n 1 --format csv --output cli_bad.json") == 2);
  CHECK(run_cli("integrate --n 1 --path cli_missing_path.json --y0 0,0 "
                "--y0 0,0 --output cli_bad.csv") == 2);
  // degenerate fit window
  CHECK(run_cli("rates --n 1 --kind zero --alpha 1,0 --angle 0 --r-lo 10 "
                "--r-hi 10.0000001 --tol 1e-11 --output cli_bad.csv") == 5);
}

}  // TEST_SUITE
