#include "chernoff/moments.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "chernoff/airy.hpp"
#include "chernoff/errors.hpp"

namespace chernoff::moments {
namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

quad::LineOptions line_options(const ContourSpec& c) {
  quad::LineOptions o;
  o.truncation_height = c.truncation_height;
  o.rel_tol = c.rel_tol;
  o.max_panels = c.max_panels;
  return o;
}

double relative_airy_error(const airy::AiryEval& e) {
  return e.abs_error_bound / std::abs(e.ai);
}

// (1/2 pi i) \int h(z) dz over Re z = sigma equals (1/2 pi) \int h(sigma + iy) dy.
QuadResult integrate_vertical(const quad::LineIntegrand& h, const ContourSpec& c) {
  QuadResult r = quad::integrate_line(h, line_options(c));
  r.value /= kTwoPi;
  r.err_estimate /= kTwoPi;
  return r;
}

QuadResult scaled(QuadResult r, double factor) {
  r.value *= factor;
  r.err_estimate *= std::abs(factor);
  return r;
}

// sum |c| |z|^j |Ai'|^k / |Ai|^ell, the size of the terms before cancellation.
double term_magnitude(const algebra::TermSum& s, Complex z, const airy::AiryEval& e) {
  double total = 0.0;
  for (const auto& [t, c] : s.terms()) {
    total += std::abs(c.get_d()) * std::pow(std::abs(z), t.j) *
             std::pow(std::abs(e.ai_prime), t.k) / std::pow(std::abs(e.ai), t.ell);
  }
  return total;
}

}  // namespace

void ContourSpec::validate() const {
  if (!(sigma > airy::kFirstZero)) {
    throw ContourTooLeft("contour abscissa " + std::to_string(sigma) +
                         " is not right of the first Airy zero");
  }
  if (!(truncation_height > 0) || !(rel_tol > 0) || max_panels < 1) {
    throw InvalidArgument("contour needs truncation_height > 0, rel_tol > 0, max_panels >= 1");
  }
}

ContourSpec default_contour() { return ContourSpec{}; }

GammaParam::GammaParam(double gamma) : gamma_(gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) {
    throw InvalidArgument("gamma must be positive and finite");
  }
}

GammaParam GammaParam::canonical() { return GammaParam(kCanonicalGamma); }

double GammaParam::scale() const { return std::cbrt(0.5) * std::pow(gamma_, -2.0 / 3.0); }

QuadResult contour_integral_inv_ai2(const algebra::RationalPoly& p, const ContourSpec& c) {
  c.validate();
  const double sigma = c.sigma;
  auto integrand = [&](double y) {
    const Complex z{sigma, y};
    const airy::AiryEval e = airy::airy_ai(z);
    const Complex value = p(z) / (e.ai * e.ai);
    return quad::Sample{value, std::abs(value) * 2.5 * relative_airy_error(e)};
  };
  return integrate_vertical(integrand, c);
}

QuadResult moment_result(int n, GammaParam g, const ContourSpec& c) {
  if (n < 0) throw InvalidArgument("moment order must be nonnegative");
  const algebra::RationalPoly p = algebra::moment_polynomial(n);
  // p_n == 0 still goes through quadrature of the zero integrand: value 0.
  const double prefactor = std::pow(2.0, -n / 3.0) * std::pow(g.value(), -2.0 * n / 3.0);
  return scaled(contour_integral_inv_ai2(p, c), prefactor);
}

double moment(int n, GammaParam g) { return moment_result(n, g).real(); }

QuadResult moment_by_parts_result(int j, int k, const ContourSpec& c) {
  if (j < 0 || k < 0) throw InvalidArgument("derivative orders must be nonnegative");
  c.validate();
  const algebra::TermSum left = algebra::inv_ai_derivative(j);
  const algebra::TermSum right = algebra::inv_ai_derivative(k);
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  const double sigma = c.sigma;
  auto integrand = [&](double y) {
    const Complex z{sigma, y};
    const airy::AiryEval e = airy::airy_ai(z);
    const Complex value = sign * left.evaluate(z, e.ai, e.ai_prime) *
                          right.evaluate(z, e.ai, e.ai_prime);
    const double rel = e.abs_error_bound / std::min(std::abs(e.ai), std::abs(e.ai_prime) + 1.0);
    const double size = term_magnitude(left, z, e) * term_magnitude(right, z, e);
    return quad::Sample{value, size * (j + k + 3) * rel};
  };
  return integrate_vertical(integrand, c);
}

double moment_by_parts(int j, int k, const ContourSpec& c) {
  return moment_by_parts_result(j, k, c).real();
}

QuadResult char_fn_result(double t, const ContourSpec& c) {
  c.validate();
  const double sigma = c.sigma;
  auto integrand = [&](double y) {
    const airy::AiryEval shifted = airy::airy_ai(Complex{sigma, y + t});
    const airy::AiryEval base = airy::airy_ai(Complex{sigma, y});
    const Complex value = 1.0 / (shifted.ai * base.ai);
    return quad::Sample{value, std::abs(value) * 1.5 *
                                   (relative_airy_error(shifted) + relative_airy_error(base))};
  };
  return integrate_vertical(integrand, c);
}

Complex char_fn(double t, const ContourSpec& c) { return char_fn_result(t, c).value; }

double default_mgf_sigma(Complex t) {
  return std::max(0.0, airy::kFirstZero + 1.0 - t.real());
}

QuadResult mgf_result(Complex t, const ContourSpec& c) {
  c.validate();
  if (!(c.sigma + t.real() > airy::kFirstZero)) {
    throw ContourTooLeft("sigma + Re t must exceed the first Airy zero");
  }
  const double sigma = c.sigma;
  auto integrand = [&](double y) {
    const Complex z{sigma, y};
    const airy::AiryEval shifted = airy::airy_ai(z + t);
    const airy::AiryEval base = airy::airy_ai(z);
    const Complex value = 1.0 / (shifted.ai * base.ai);
    return quad::Sample{value, std::abs(value) * 1.5 *
                                   (relative_airy_error(shifted) + relative_airy_error(base))};
  };
  return integrate_vertical(integrand, c);
}

Complex mgf(Complex t, double sigma) {
  ContourSpec c = default_contour();
  c.sigma = sigma;
  return mgf_result(t, c).value;
}

Complex mgf(Complex t) { return mgf(t, default_mgf_sigma(t)); }

QuadResult mean_max_result(GammaParam g, const ContourSpec& c) {
  algebra::RationalPoly z_only;
  z_only.add(1, algebra::Rational(1));
  const double prefactor = -std::pow(2.0, -2.0 / 3.0) * std::pow(g.value(), -1.0 / 3.0);
  return scaled(contour_integral_inv_ai2(z_only, c), prefactor);
}

double mean_max(GammaParam g) { return mean_max_result(g).real(); }

QuadResult density_factor(double u, double rel_tol) {
  quad::LineOptions o;
  o.rel_tol = rel_tol;
  auto integrand = [&](double t) {
    const airy::AiryEval e = airy::airy_ai(Complex{0.0, t});
    const Complex value = std::polar(kSqrt2, -t * u) / e.ai;
    return quad::Sample{value, std::abs(value) * 1.5 * relative_airy_error(e)};
  };
  QuadResult r = quad::integrate_line(integrand, o);
  r.value /= kTwoPi;
  r.err_estimate /= kTwoPi;
  return r;
}

double density(double x, GammaParam g, double tol) {
  if (!(tol > 0)) throw InvalidArgument("density tolerance must be positive");
  const double s = g.scale();
  const double u = x / s;
  const double plus = density_factor(u, tol).real();
  const double minus = density_factor(-u, tol).real();
  return 0.5 * plus * minus / s;
}

std::vector<DensityPoint> density_table(double from, double to, double step, GammaParam g,
                                        double tol) {
  if (!(step > 0) || !(to >= from)) {
    throw InvalidArgument("density table needs step > 0 and to >= from");
  }
  if (!(tol > 0)) throw InvalidArgument("density tolerance must be positive");
  const double s = g.scale();
  const long count = std::lround(std::floor((to - from) / step + 1e-9)) + 1;
  std::map<double, double> factor_cache;
  auto factor = [&](double u) {
    auto it = factor_cache.find(u);
    if (it == factor_cache.end()) {
      it = factor_cache.emplace(u, density_factor(u, tol).real()).first;
    }
    return it->second;
  };
  std::vector<DensityPoint> table;
  table.reserve(count);
  for (long i = 0; i < count; ++i) {
    const double x = from + static_cast<double>(i) * step;
    const double u = x / s;
    table.push_back({x, 0.5 * factor(u) * factor(-u) / s});
  }
  return table;
}

TableMoments integrate_table(const std::vector<DensityPoint>& table) {
  TableMoments m{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const double h = table[i + 1].x - table[i].x;
    m.mass += 0.5 * h * (table[i].f + table[i + 1].f);
    m.second_moment += 0.5 * h *
                       (table[i].x * table[i].x * table[i].f +
                        table[i + 1].x * table[i + 1].x * table[i + 1].f);
  }
  return m;
}

nlohmann::json result_json(const std::string& quantity, std::optional<int> n, double gamma,
                           const QuadResult& r, const ContourSpec& c, bool complex_value) {
  nlohmann::json j;
  j["quantity"] = quantity;
  if (n) j["n"] = *n;
  j["gamma"] = gamma;
  j["value"] = r.value.real();
  if (complex_value) j["value_imag"] = r.value.imag();
  j["err_estimate"] = r.err_estimate;
  j["contour"] = {{"sigma", c.sigma},
                  {"truncation_height", c.truncation_height},
                  {"rel_tol", c.rel_tol},
                  {"max_panels", c.max_panels},
                  {"panels_used", r.panels_used},
                  {"height_used", r.truncation_height}};
  return j;
}

std::string density_csv(const std::vector<DensityPoint>& table) {
  std::ostringstream out;
  out << "x,f\n";
  char line[96];
  for (const auto& p : table) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", p.x, p.f);
    out << line;
  }
  return out.str();
}

}  // namespace chernoff::moments
