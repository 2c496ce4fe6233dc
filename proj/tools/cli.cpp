#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chernoff/algebra.hpp"
#include "chernoff/errors.hpp"
#include "chernoff/mc.hpp"
#include "chernoff/moments.hpp"

namespace chernoff::cli {
namespace {

using nlohmann::json;
namespace alg = chernoff::algebra;
namespace mom = chernoff::moments;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Options {
  std::string format;
  bool json_flag = false;
  bool csv_flag = false;
  std::string output;

  int max_n = 12;
  std::optional<int> inject_fault;
  int n = 0;
  double gamma = mom::kCanonicalGamma;
  std::optional<double> sigma;
  double t = 0.0;
  double t_re = 0.0;
  double t_im = 0.0;
  double from = -4.0;
  double to = 4.0;
  double step = 0.05;
  std::optional<double> tol;

  double horizon = 4.0;
  double sim_step = 1e-3;
  long paths = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_prefix;
};

std::string resolve_format(const Options& o, const std::string& fallback) {
  if (o.json_flag) return "json";
  if (o.csv_flag) return "csv";
  return o.format.empty() ? fallback : o.format;
}

mom::ContourSpec contour_from_env() {
  mom::ContourSpec c = mom::default_contour();
  if (const char* env = std::getenv("CHERNOFF_RELTOL"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(value > 0)) {
      throw InvalidArgument(std::string("CHERNOFF_RELTOL is not a positive number: ") + env);
    }
    c.rel_tol = value;
  }
  return c;
}

// ------------------------------------------------------------------ polys

void cmd_polys(const Options& o, std::ostream& out) {
  const std::string format = resolve_format(o, "plain");
  if (format == "json") {
    json all = json::array();
    for (int n = 0; n <= o.max_n; ++n) all.push_back(alg::poly_to_json(n, alg::moment_polynomial(n)));
    out << all.dump(2) << "\n";
  } else if (format == "csv") {
    out << "n,j,coeff\n";
    for (int n = 0; n <= o.max_n; ++n) {
      const alg::RationalPoly p = alg::moment_polynomial(n);
      for (const auto& [j, c] : p.coeffs()) {
        out << n << "," << j << "," << alg::rational_string(c) << "\n";
      }
    }
  } else {
    for (int n = 0; n <= o.max_n; ++n) {
      out << "p_" << n << "(z) = " << alg::moment_polynomial(n).to_string() << "\n";
    }
  }
}

// ----------------------------------------------------------------- verify

int cmd_verify(const Options& o, const mom::ContourSpec& contour, std::ostream& out) {
  std::vector<alg::RationalPoly> polys;
  for (int n = 0; n <= o.max_n; ++n) polys.push_back(alg::moment_polynomial(n));
  if (o.inject_fault) {
    const int n = *o.inject_fault;
    if (n < 0 || n > o.max_n) throw InvalidArgument("--inject-fault must lie in [0, max-n]");
    // Negative control: disturb the top coefficient (or make an odd p_n nonzero).
    polys[n].add(n / 2, alg::Rational(1));
  }
  const alg::ConjectureReport report = alg::check_polynomials(polys);
  const std::vector<CheckResult> numeric = numeric_identity_suite(contour.rel_tol);

  bool pass = report.all_pass();
  for (const auto& c : numeric) pass = pass && c.pass;

  if (resolve_format(o, "plain") == "json") {
    json j;
    j["max_n"] = o.max_n;
    j["conjecture_failures"] = report.failures();
    j["numeric"] = json::array();
    for (const auto& c : numeric) {
      j["numeric"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    j["pass"] = pass;
    out << j.dump(2) << "\n";
  } else {
    const auto failures = report.failures();
    out << (failures.empty() ? "PASS" : "FAIL") << " conjectures n <= " << o.max_n
        << " (odd p_n = 0, exact degree, x/sinh x leading terms, mod-3 support)\n";
    for (const auto& f : failures) out << "  " << f << "\n";
    for (const auto& c : numeric) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << " " << c.detail << "\n";
    }
  }
  return pass ? kExitOk : kExitVerifyFailed;
}

// -------------------------------------------------------- numeric outputs

void emit_result(const Options& o, std::ostream& out, const std::string& quantity,
                 std::optional<int> n, const mom::QuadResult& r, const mom::ContourSpec& c,
                 bool complex_value) {
  const std::string format = resolve_format(o, "json");
  const json j = mom::result_json(quantity, n, o.gamma, r, c, complex_value);
  if (format == "json") {
    out << j.dump() << "\n";
  } else if (format == "csv") {
    out << "quantity,n,gamma,value," << (complex_value ? "value_imag," : "") << "err_estimate\n";
    out << quantity << "," << (n ? std::to_string(*n) : "") << "," << fmt("%.17g", o.gamma) << ","
        << fmt("%.17g", r.value.real()) << ","
        << (complex_value ? fmt("%.17g", r.value.imag()) + "," : "")
        << fmt("%.3e", r.err_estimate) << "\n";
  } else {
    out << quantity << (n ? "(n=" + std::to_string(*n) + ")" : "") << " gamma=" << fmt("%.17g", o.gamma)
        << " value=" << fmt("%.17g", r.value.real());
    if (complex_value) out << " imag=" << fmt("%.3e", r.value.imag());
    out << " err_estimate=" << fmt("%.3e", r.err_estimate) << "\n";
  }
}

void cmd_moment(const Options& o, mom::ContourSpec c, std::ostream& out) {
  if (o.sigma) c.sigma = *o.sigma;
  emit_result(o, out, "moment", o.n, mom::moment_result(o.n, mom::GammaParam(o.gamma), c), c, false);
}

void cmd_mean_max(const Options& o, mom::ContourSpec c, std::ostream& out) {
  if (o.sigma) c.sigma = *o.sigma;
  emit_result(o, out, "mean_max", std::nullopt, mom::mean_max_result(mom::GammaParam(o.gamma), c),
              c, false);
}

// V_gamma = s V, so E exp(i t V_gamma) = phi(s t).
void cmd_cf(const Options& o, mom::ContourSpec c, std::ostream& out) {
  if (o.sigma) c.sigma = *o.sigma;
  const double s = mom::GammaParam(o.gamma).scale();
  emit_result(o, out, "char_fn", std::nullopt, mom::char_fn_result(s * o.t, c), c, true);
}

void cmd_mgf(const Options& o, mom::ContourSpec c, std::ostream& out) {
  const double s = mom::GammaParam(o.gamma).scale();
  const mom::Complex t = s * mom::Complex{o.t_re, o.t_im};
  c.sigma = o.sigma ? *o.sigma : mom::default_mgf_sigma(t);
  emit_result(o, out, "mgf", std::nullopt, mom::mgf_result(t, c), c, true);
}

void cmd_density(const Options& o, const mom::ContourSpec& c, std::ostream& out) {
  const double tol = o.tol ? *o.tol : c.rel_tol;
  const auto table = mom::density_table(o.from, o.to, o.step, mom::GammaParam(o.gamma), tol);
  const std::string format = resolve_format(o, "csv");
  if (format == "json") {
    json points = json::array();
    for (const auto& p : table) points.push_back({{"x", p.x}, {"f", p.f}});
    out << json{{"quantity", "density"}, {"gamma", o.gamma}, {"tol", tol}, {"points", points}}.dump()
        << "\n";
  } else if (format == "csv") {
    out << mom::density_csv(table);
  } else {
    for (const auto& p : table) out << fmt("%.6f", p.x) << " " << fmt("%.17g", p.f) << "\n";
  }
}

// --------------------------------------------------------------- simulate

void cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  mc::SimConfig cfg;
  cfg.gamma = o.gamma;
  cfg.horizon = o.horizon;
  cfg.step = o.sim_step;
  cfg.num_paths = o.paths;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  if (o.paths < 2) throw InvalidArgument("--paths must be at least 2 for estimates");
  const mc::SampleSet samples = mc::simulate(cfg);

  mc::write_csv(samples, o.out_prefix + ".csv");
  {
    std::ofstream sidecar(o.out_prefix + ".json");
    if (!sidecar) throw Error("cannot open " + o.out_prefix + ".json for writing");
    sidecar << mc::sidecar_json(samples).dump(2) << "\n";
  }
  const double exceed = mc::horizon_exceedance(samples);
  if (exceed >= 1e-4) {
    err << "warning: " << fmt("%.2e", exceed)
        << " of paths peak within 0.5 of the horizon; consider a larger --horizon\n";
  }

  const std::vector<mc::Statistic> stats = {mc::VMoment{1}, mc::VMoment{2}, mc::VMoment{4},
                                            mc::MMean{}, mc::WAtArgmaxMean{}};
  const mc::Estimate ratio = mc::estimate_ratio(samples.records, mc::WAtArgmaxMean{}, mc::MMean{});
  if (resolve_format(o, "plain") == "json") {
    json j;
    j["config"] = mc::sidecar_json(samples);
    j["estimates"] = json::array();
    for (const auto& s : stats) {
      const mc::Estimate e = mc::estimate(samples, s);
      j["estimates"].push_back({{"statistic", mc::statistic_name(s)}, {"value", e.value}, {"stderr", e.std_error}});
    }
    j["estimates"].push_back({{"statistic", "w_at_argmax_mean/m_mean"}, {"value", ratio.value}, {"stderr", ratio.std_error}});
    j["horizon_exceedance"] = exceed;
    out << j.dump(2) << "\n";
  } else {
    for (const auto& s : stats) {
      const mc::Estimate e = mc::estimate(samples, s);
      out << mc::statistic_name(s) << " = " << fmt("%.6f", e.value) << " +- " << fmt("%.6f", e.std_error) << "\n";
    }
    out << "w_at_argmax_mean/m_mean = " << fmt("%.6f", ratio.value) << " +- " << fmt("%.6f", ratio.std_error)
        << "\n";
  }
}

}  // namespace

std::vector<CheckResult> numeric_identity_suite(double rel_tol) {
  std::vector<CheckResult> checks;
  mom::ContourSpec base = mom::default_contour();
  base.rel_tol = rel_tol;
  const alg::RationalPoly one = alg::moment_polynomial(0);

  const mom::QuadResult at_axis = mom::contour_integral_inv_ai2(one, base);
  checks.push_back({"normalization sigma=0", std::abs(at_axis.real() - 1.0) <= 1e-8,
                    "|I - 1| = " + fmt("%.3e", std::abs(at_axis.real() - 1.0))});
  for (double sigma : {0.5, 1.0}) {
    mom::ContourSpec c = base;
    c.sigma = sigma;
    const mom::QuadResult shifted = mom::contour_integral_inv_ai2(one, c);
    const double diff = std::abs(shifted.real() - at_axis.real());
    const double allowed = 2 * std::max(shifted.err_estimate, at_axis.err_estimate);
    checks.push_back({"contour invariance sigma=" + fmt("%g", sigma), diff <= allowed,
                      "diff " + fmt("%.3e", diff) + " <= " + fmt("%.3e", allowed)});
  }
  for (double gamma : {mom::kCanonicalGamma, 1.0, 2.0}) {
    const mom::GammaParam g(gamma);
    const double lhs = mom::moment_result(2, g, base).real();
    const double rhs = mom::mean_max_result(g, base).real() / (3 * gamma);
    checks.push_back({"E V^2 = E M / (3 gamma), gamma=" + fmt("%.6g", gamma), std::abs(lhs - rhs) <= 1e-6,
                      "diff " + fmt("%.3e", std::abs(lhs - rhs))});
  }
  return checks;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chernoff distribution: exact moment polynomials, Airy-integral numerics and a Monte-Carlo oracle",
               "chernoff"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* sub) {
    auto* format = sub->add_option("--format", o.format, "Output format")
                       ->check(CLI::IsMember({"json", "csv", "plain"}));
    auto* json_flag = sub->add_flag("--json", o.json_flag, "Shorthand for --format json");
    auto* csv_flag = sub->add_flag("--csv", o.csv_flag, "Shorthand for --format csv");
    format->excludes(json_flag)->excludes(csv_flag);
    json_flag->excludes(csv_flag);
    sub->add_option("-o,--output", o.output, "Write data to this file instead of stdout");
  };
  auto add_gamma = [&](CLI::App* sub) {
    sub->add_option("--gamma", o.gamma, "Drift coefficient gamma (default 1/sqrt(2))")
        ->check(CLI::PositiveNumber);
  };

  auto* polys = app.add_subcommand("polys", "Print the exact moment polynomials p_0..p_N");
  polys->add_option("--max-n", o.max_n, "Largest n")->check(CLI::NonNegativeNumber);
  add_format(polys);
  add_gamma(polys);

  auto* verify = app.add_subcommand("verify", "Check the polynomial conjectures and numeric identities");
  verify->add_option("--max-n", o.max_n, "Largest n")->check(CLI::Range(2, 100000));
  verify->add_option("--inject-fault", o.inject_fault,
                     "Negative control: corrupt the top coefficient of p_N before checking");
  add_format(verify);
  add_gamma(verify);

  auto* moment = app.add_subcommand("moment", "E V_gamma^n by contour quadrature");
  moment->add_option("--n", o.n, "Moment order")->required()->check(CLI::NonNegativeNumber);
  moment->add_option("--sigma", o.sigma, "Contour abscissa Re z");
  add_gamma(moment);
  add_format(moment);

  auto* cf = app.add_subcommand("cf", "Characteristic function E exp(itV_gamma)");
  cf->add_option("--t", o.t, "Argument t")->required();
  cf->add_option("--sigma", o.sigma, "Contour abscissa Re z");
  add_gamma(cf);
  add_format(cf);

  auto* mgf = app.add_subcommand("mgf", "Moment generating function E exp(tV_gamma), complex t");
  mgf->add_option("--t-re", o.t_re, "Re t");
  mgf->add_option("--t-im", o.t_im, "Im t");
  mgf->add_option("--sigma", o.sigma, "Contour abscissa (default: admissible shift)");
  add_gamma(mgf);
  add_format(mgf);

  auto* density = app.add_subcommand("density", "Tabulate the density of V_gamma");
  density->add_option("--from", o.from, "First abscissa");
  density->add_option("--to", o.to, "Last abscissa");
  density->add_option("--step", o.step, "Grid step")->check(CLI::PositiveNumber);
  density->add_option("--tol", o.tol, "Quadrature tolerance (default 1e-10 or CHERNOFF_RELTOL)")->check(CLI::PositiveNumber);
  add_gamma(density);
  add_format(density);

  auto* mean_max = app.add_subcommand("mean-max", "E M_gamma, the mean of the maximum");
  mean_max->add_option("--sigma", o.sigma, "Contour abscissa Re z");
  add_gamma(mean_max);
  add_format(mean_max);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo argmax of a discretized path");
  add_gamma(simulate);
  simulate->add_option("--horizon", o.horizon, "Simulate t in [-T, T]")->check(CLI::PositiveNumber);
  simulate->add_option("--step", o.sim_step, "Grid spacing h")->check(CLI::PositiveNumber);
  simulate->add_option("--paths", o.paths, "Number of paths")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "Generator seed");
  simulate->add_option("--threads", o.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", o.out_prefix, "Write <prefix>.csv and <prefix>.json")->required();
  add_format(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) {
      err << "error: cannot open " << o.output << " for writing\n";
      return kExitUsage;
    }
  }
  std::ostream& data = o.output.empty() ? out : file;

  try {
    const mom::ContourSpec contour = contour_from_env();
    if (polys->parsed()) cmd_polys(o, data);
    if (verify->parsed()) return cmd_verify(o, contour, data);
    if (moment->parsed()) cmd_moment(o, contour, data);
    if (cf->parsed()) cmd_cf(o, contour, data);
    if (mgf->parsed()) cmd_mgf(o, contour, data);
    if (density->parsed()) cmd_density(o, contour, data);
    if (mean_max->parsed()) cmd_mean_max(o, contour, data);
    if (simulate->parsed()) cmd_simulate(o, data, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContourTooLeft& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace chernoff::cli
