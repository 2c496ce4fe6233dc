#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chernoff/algebra.hpp"
#include "chernoff/quadrature.hpp"

namespace chernoff::moments {

using Complex = std::complex<double>;
using quad::QuadResult;

/// Vertical integration line Re z = sigma, truncated to |Im z| <= Y before
/// the automatic widening done by the integrator.
struct ContourSpec {
  double sigma = 0.0;
  double truncation_height = 12.0;
  double rel_tol = 1e-10;
  int max_panels = 20000;

  /// Throws ContourTooLeft when sigma <= a_1, InvalidArgument otherwise.
  void validate() const;
};

/// sigma = 0, Y = 12, rel_tol = 1e-10.
ContourSpec default_contour();

/// Drift coefficient gamma of W(t) - gamma t^2.
class GammaParam {
 public:
  explicit GammaParam(double gamma);
  static GammaParam canonical();  // 1/sqrt(2)
  double value() const { return gamma_; }
  /// s with V_gamma = s V_canonical in distribution: 2^(-1/3) gamma^(-2/3).
  double scale() const;

 private:
  double gamma_;
};

inline constexpr double kCanonicalGamma = 0.70710678118654752440;

/// (1/2 pi i) \int p(z) / Ai(z)^2 dz along the contour.
QuadResult contour_integral_inv_ai2(const algebra::RationalPoly& p, const ContourSpec& c);

/// E V_gamma^n with its error estimate (scaled by the gamma prefactor).
QuadResult moment_result(int n, GammaParam g, const ContourSpec& c = default_contour());
double moment(int n, GammaParam g);

/// (-1)^j / (2 pi i) \int d^j(1/Ai) d^k(1/Ai) dz = E V^{j+k} at gamma = 1/sqrt(2).
QuadResult moment_by_parts_result(int j, int k, const ContourSpec& c = default_contour());
double moment_by_parts(int j, int k, const ContourSpec& c = default_contour());

/// E exp(itV) at gamma = 1/sqrt(2).
QuadResult char_fn_result(double t, const ContourSpec& c = default_contour());
Complex char_fn(double t, const ContourSpec& c = default_contour());

/// Smallest admissible abscissa rule: max(0, a_1 + 1 - Re t).
double default_mgf_sigma(Complex t);

/// E exp(tV) at gamma = 1/sqrt(2) along Re z = sigma. Throws ContourTooLeft
/// unless sigma > a_1 and sigma + Re t > a_1.
QuadResult mgf_result(Complex t, const ContourSpec& c);
Complex mgf(Complex t, double sigma);
Complex mgf(Complex t);

/// E M_gamma, the mean of the maximum.
QuadResult mean_max_result(GammaParam g, const ContourSpec& c = default_contour());
double mean_max(GammaParam g);

/// g(u) = (1/2 pi) \int e^{-itu} sqrt(2) / Ai(it) dt, the factor of the density.
QuadResult density_factor(double u, double rel_tol);

/// Density of V_gamma at x, from f(u) = g(u) g(-u) / 2 and scaling.
double density(double x, GammaParam g, double tol);

struct DensityPoint {
  double x;
  double f;
};

/// Density on from, from + step, ..., to (inclusive up to rounding).
std::vector<DensityPoint> density_table(double from, double to, double step, GammaParam g,
                                        double tol);

/// Trapezoid sums over a uniform table: {integral, integral of x^2 f}.
struct TableMoments {
  double mass;
  double second_moment;
};
TableMoments integrate_table(const std::vector<DensityPoint>& table);

/// {"quantity", "n"?, "gamma", "value", "err_estimate", "contour": {...}};
/// complex results add "value_imag".
nlohmann::json result_json(const std::string& quantity, std::optional<int> n, double gamma,
                           const QuadResult& r, const ContourSpec& c, bool complex_value);

/// CSV with header "x,f".
std::string density_csv(const std::vector<DensityPoint>& table);

}  // namespace chernoff::moments
