// Command-line front end: every library capability behind deterministic
// subcommands with machine-readable artifacts.
#include <CLI11.hpp>

#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "p2h/integrate.hpp"
#include "p2h/variational.hpp"

using namespace p2h;
using json = nlohmann::json;
using C = std::complex<double>;

namespace {

constexpr const char* kVersion = "p2hier 1.0.0";
constexpr double kPi = 3.14159265358979323846;

C parse_complex(const std::string& s) {
  std::istringstream in(s);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(in >> re)) throw ValidationError("bad complex literal: " + s);
  if (in >> comma) {
    if (comma != ',' || !(in >> im))
      throw ValidationError("bad complex literal: " + s);
  }
  return {re, im};
}

Kind parse_kind(const std::string& s) {
  if (s == "infty") return Kind::Infty;
  if (s == "zero") return Kind::Zero;
  throw ValidationError("kind must be 'infty' or 'zero'");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Atomic artifact write: temp file in place, then rename.
void write_artifact(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open output file: " + tmp);
    out << body;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ValidationError("cannot rename artifact into place: " + path);
}

json config_json(const json& fields) {
  json j;
  j["artifact_version"] = kVersion;
  j["config"] = fields;
  return j;
}

std::string csv_header(const json& cfg, const std::string& columns) {
  std::string s = "# " + std::string(kVersion) + "\n";
  s += "# config " + cfg.dump() + "\n";
  s += columns + "\n";
  return s;
}

int run(int argc, char** argv) {
  CLI::App app{"second Painleve hierarchy workbench"};
  app.require_subcommand(1);

  // shared option storage
  int n = 1, K = 8, branch = 0, count = 9;
  std::string kind_s = "infty", alpha_s = "0,0", format = "json";
  std::string output, path_file, mode = "exact";
  std::vector<std::string> y0_s;
  double tol = 1e-10, eps = -1.0, inner = -1.0;
  double angle = 0.0, angle_start = 0.0, angle_end = 0.0;
  double r_lo = 10.0, r_hi = 20.0, r_seed = 60.0, r_min = 40.0;
  std::vector<double> angles;
  bool seed = false;
  double arg_hint = 0.0;
  bool have_hint = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", n, "hierarchy index")->required();
    sub->add_option("--output", output, "artifact file path");
  };

  CLI::App* gen = app.add_subcommand("gen-eq", "emit a hierarchy member");
  add_common(gen);
  gen->add_option("--format", format, "json|latex");

  CLI::App* ser = app.add_subcommand("series", "formal series coefficients");
  add_common(ser);
  ser->add_option("--kind", kind_s, "infty|zero");
  ser->add_option("--K", K, "truncation order");
  ser->add_option("--alpha", alpha_s, "parameter as RE,IM");
  ser->add_option("--branch", branch, "root branch id");
  ser->add_option("--mode", mode, "exact|float");

  CLI::App* tr = app.add_subcommand("transform-eq", "rescaled-frame equation");
  add_common(tr);
  tr->add_option("--format", format, "json|latex");

  CLI::App* sec = app.add_subcommand("sectors", "sector geometry");
  add_common(sec);
  sec->add_option("--kind", kind_s, "infty|zero");
  sec->add_option("--eps", eps, "overlap half-width (radians)");
  sec->add_option("--inner", inner, "inner radius");

  CLI::App* rt = app.add_subcommand("rates", "measured separation rates");
  add_common(rt);
  rt->add_option("--kind", kind_s, "infty|zero");
  rt->add_option("--alpha", alpha_s, "parameter as RE,IM");
  rt->add_option("--angle", angles, "ray angles (radians), repeatable")
      ->required();
  rt->add_option("--r-lo", r_lo, "inner window radius");
  rt->add_option("--r-hi", r_hi, "outer window radius");
  rt->add_option("--tol", tol, "integration tolerance");

  CLI::App* integ = app.add_subcommand("integrate", "path integration");
  add_common(integ);
  integ->add_option("--kind", kind_s, "seeding series kind");
  integ->add_option("--alpha", alpha_s, "parameter as RE,IM");
  integ->add_option("--K", K, "series truncation order for seeding");
  integ->add_option("--branch", branch, "series branch id");
  integ->add_option("--path", path_file, "path JSON file")->required();
  integ->add_option("--tol", tol, "local error tolerance");
  integ->add_flag("--seed", seed, "seed from the series at the path start");
  integ->add_option("--arg-hint", arg_hint, "argument continuation hint")
      ->each([&](const std::string&) { have_hint = true; });
  integ->add_option("--y0", y0_s, "state entries as RE,IM (2n of them)");

  CLI::App* pm = app.add_subcommand("polemap", "first-pole radius per ray");
  add_common(pm);
  pm->add_option("--kind", kind_s, "seeding series kind");
  pm->add_option("--alpha", alpha_s, "parameter as RE,IM");
  pm->add_option("--K", K, "series truncation order for seeding");
  pm->add_option("--branch", branch, "series branch id");
  pm->add_option("--angle-start", angle_start, "fan start (radians)")
      ->required();
  pm->add_option("--angle-end", angle_end, "fan end (radians)")->required();
  pm->add_option("--count", count, "number of rays");
  pm->add_option("--r-seed", r_seed, "seeding radius");
  pm->add_option("--r-min", r_min, "inner radius");
  pm->add_option("--tol", tol, "local error tolerance");

  CLI::App* ver = app.add_subcommand("verify", "invariant suite for one n");
  add_common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (n < 1) throw ValidationError("--n must be a positive integer");
  const C alpha = parse_complex(alpha_s);

  if (gen->parsed()) {
    HierarchyEquation eq = build_p2n(n);
    if (output.empty()) output = "gen-eq." + std::string(format == "latex" ? "tex" : "json");
    json cfg{{"subcommand", "gen-eq"}, {"n", n}, {"format", format}};
    if (format == "json") {
      json j = config_json(cfg);
      j["equation"] = eq.to_json();
      write_artifact(output, j.dump(2) + "\n");
    } else if (format == "latex") {
      std::string body = "% " + std::string(kVersion) + "\n% config " +
                         cfg.dump() + "\n" + eq.to_latex() + "\n";
      write_artifact(output, body);
    } else {
      throw ValidationError("gen-eq supports json|latex");
    }
    return 0;
  }

  if (ser->parsed()) {
    if (mode != "exact" && mode != "float")
      throw ValidationError("--mode must be exact|float");
    Kind kind = parse_kind(kind_s);
    HierarchyEquation eq = build_p2n(n);
    FormalSeries s =
        series_coefficients(eq, kind, K, mode == "exact", alpha, branch);
    if (output.empty()) output = "series.json";
    json cfg{{"subcommand", "series"}, {"n", n},       {"kind", kind_s},
             {"K", K},                 {"alpha", alpha_s}, {"branch", branch},
             {"mode", mode}};
    json j = config_json(cfg);
    j["series"] = s.to_json();
    write_artifact(output, j.dump(2) + "\n");
    return 0;
  }

  if (tr->parsed()) {
    ScaledEquation se = transform_equation(build_p2n(n));
    if (output.empty())
      output = "transform-eq." + std::string(format == "latex" ? "tex" : "json");
    json cfg{{"subcommand", "transform-eq"}, {"n", n}, {"format", format}};
    if (format == "json") {
      json j = config_json(cfg);
      j["scaled_equation"] = se.to_json();
      write_artifact(output, j.dump(2) + "\n");
    } else if (format == "latex") {
      std::string body = "% " + std::string(kVersion) + "\n% config " +
                         cfg.dump() + "\n" + se.to_latex() + "\n";
      write_artifact(output, body);
    } else {
      throw ValidationError("transform-eq supports json|latex");
    }
    return 0;
  }

  if (sec->parsed()) {
    SectorGeometry g = sectors(n, parse_kind(kind_s), eps, inner);
    if (output.empty()) output = "sectors.json";
    json cfg{{"subcommand", "sectors"}, {"n", n}, {"kind", kind_s},
             {"eps", eps},              {"inner", inner}};
    json j = config_json(cfg);
    j["sectors"] = g.to_json();
    write_artifact(output, j.dump(2) + "\n");
    return 0;
  }

  if (rt->parsed()) {
    Kind kind = parse_kind(kind_s);
    HierarchyEquation eq = build_p2n(n);
    if (output.empty()) output = "rates.csv";
    json cfg{{"subcommand", "rates"}, {"n", n},     {"kind", kind_s},
             {"alpha", alpha_s},      {"r_lo", r_lo}, {"r_hi", r_hi},
             {"tol", tol},            {"angles", angles}};
    std::string body =
        csv_header(cfg, "angle,fitted_slopes...,predicted_rates...");
    for (double th : angles) {
      SeparationReport rep =
          separation_rate(eq, kind, th, r_lo, r_hi, alpha, tol);
      body += fmt_double(th);
      for (double v : rep.fitted_slopes) body += "," + fmt_double(v);
      for (double v : rep.predicted_rates) body += "," + fmt_double(v);
      body += "\n";
    }
    write_artifact(output, body);
    return 0;
  }

  if (integ->parsed()) {
    HierarchyEquation eq = build_p2n(n);
    ODESystem sys = compile_system(eq, alpha);
    std::ifstream in(path_file);
    if (!in) throw ValidationError("cannot read path file: " + path_file);
    json pj = json::parse(in, nullptr, false);
    if (pj.is_discarded())
      throw ValidationError("path file is not valid JSON: " + path_file);
    PathSpec path = PathSpec::from_json(pj);
    path.validate();
    Eigen::VectorXcd y0(2 * n);
    std::optional<double> hint;
    if (have_hint) hint = arg_hint;
    if (seed) {
      Kind kind = parse_kind(kind_s);
      FormalSeries s = series_coefficients(eq, kind, K, true, alpha, branch);
      y0 = seed_from_series(s, path.segments.front().start(), hint);
    } else {
      if (static_cast<int>(y0_s.size()) != 2 * n)
        throw ValidationError("--y0 needs exactly 2n entries (or use --seed)");
      for (int i = 0; i < 2 * n; ++i)
        y0[i] = parse_complex(y0_s[static_cast<size_t>(i)]);
    }
    Trajectory t = integrate_path(sys, y0, path, tol);
    if (output.empty()) output = "integrate.csv";
    json cfg{{"subcommand", "integrate"}, {"n", n},        {"kind", kind_s},
             {"alpha", alpha_s},          {"K", K},        {"branch", branch},
             {"path", path.to_json()},    {"tol", tol},    {"seed", seed},
             {"status", status_name(t.status)}};
    std::string cols = "re_x,im_x";
    for (int i = 1; i <= 2 * n; ++i)
      cols += ",re_y" + std::to_string(i) + ",im_y" + std::to_string(i);
    cols += ",err";
    std::string body = csv_header(cfg, cols);
    for (const auto& sm : t.samples) {
      body += fmt_double(sm.x.real()) + "," + fmt_double(sm.x.imag());
      for (int i = 0; i < 2 * n; ++i)
        body += "," + fmt_double(sm.y[i].real()) + "," +
                fmt_double(sm.y[i].imag());
      body += "," + fmt_double(sm.err) + "\n";
    }
    write_artifact(output, body);
    if (t.status == TrajStatus::ToleranceFailure)
      throw ToleranceFailure("integration did not reach the path end");
    return 0;
  }

  if (pm->parsed()) {
    HierarchyEquation eq = build_p2n(n);
    ODESystem sys = compile_system(eq, alpha);
    FormalSeries s =
        series_coefficients(eq, parse_kind(kind_s), K, true, alpha, branch);
    auto rows =
        pole_map(sys, s, angle_start, angle_end, count, r_seed, r_min, tol);
    if (output.empty()) output = "polemap.csv";
    json cfg{{"subcommand", "polemap"},   {"n", n},
             {"kind", kind_s},            {"alpha", alpha_s},
             {"K", K},                    {"branch", branch},
             {"angle_start", angle_start}, {"angle_end", angle_end},
             {"count", count},            {"r_seed", r_seed},
             {"r_min", r_min},            {"tol", tol}};
    std::string body = csv_header(cfg, "angle,pole_radius,trigger,status");
    for (const auto& r : rows) {
      body += fmt_double(r.angle) + ",";
      body += r.pole_radius ? fmt_double(*r.pole_radius) : std::string("-");
      body += ",";
      body += r.trigger ? trigger_name(*r.trigger) : "-";
      body += std::string(",") + status_name(r.status) + "\n";
    }
    write_artifact(output, body);
    return 0;
  }

  if (ver->parsed()) {
    json checks = json::array();
    bool all = true;
    auto add = [&](const char* name, bool ok) {
      checks.push_back({{"check", name}, {"ok", ok}});
      all = all && ok;
    };
    HierarchyEquation eq = build_p2n(n);
    add("lenard image is a total derivative",
        lenard_image(build_L(n)).variational_derivative().is_zero());
    bool weights = true;
    for (const auto& [m, c] : eq.rhs_poly.terms())
      if (m.norm() != 2 * n + 1 || m.jet_exp(0) > 2 * n - 1) weights = false;
    add("weighted homogeneity of the nonlinear part", weights);
    add("beta closed form", eq.beta == beta_constant(n));
    {
      int Kv = n >= 3 ? 6 : 8;
      bool ok = true;
      for (Kind kind : {Kind::Infty, Kind::Zero}) {
        FormalSeries ex =
            series_coefficients(eq, kind, Kv, true, {0.3, 0.1});
        FormalSeries fl =
            series_coefficients(eq, kind, Kv, false, {0.3, 0.1});
        double scale = 1.0;
        for (int k = 0; k <= Kv; ++k) {
          scale = std::max(scale, std::abs(ex.coeffs[k]));
          if (std::abs(ex.coeffs[k] - fl.coeffs[k]) > 1e-12 * scale)
            ok = false;
        }
      }
      add("exact and float series drivers agree", ok);
    }
    {
      ScaledEquation se = transform_equation(eq);
      bool ok = true;
      for (const auto& [m, c] : se.rhs_z.terms())
        if (m.x > 0 || m.x < -2 * n) ok = false;
      add("scaled-frame coefficient degrees within [-2n, 0]", ok);
    }
    {
      bool ok = true;
      for (Kind kind : {Kind::Infty, Kind::Zero}) {
        CompanionA0 a = companion_a0(n, kind, {0.8, 0.45});
        for (size_t k = 0; k < a.mu.size(); ++k)
          if (std::abs(a.mu[k] - a.mu_numeric[k]) > 1e-10) ok = false;
      }
      add("companion eigenvalues match the root family", ok);
    }
    if (output.empty()) output = "verify.json";
    json cfg{{"subcommand", "verify"}, {"n", n}};
    json j = config_json(cfg);
    j["checks"] = checks;
    j["all_ok"] = all;
    write_artifact(output, j.dump(2) + "\n");
    if (!all) throw StructureError("verify: at least one invariant failed");
    return 0;
  }

  throw ValidationError("no subcommand dispatched");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const NotExactError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const StructureError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ToleranceFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const FitError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
