#pragma once

#include <complex>
#include <functional>

namespace chernoff::quad {

using Complex = std::complex<double>;

/// Integrand value with an absolute error already present in it
/// (e.g. from special-function evaluation).
struct Sample {
  Complex value;
  double abs_error = 0.0;
};

using LineIntegrand = std::function<Sample(double)>;

struct QuadResult {
  Complex value;
  double err_estimate = 0.0;
  int panels_used = 0;
  /// Half-width of the integration window actually covered.
  double truncation_height = 0.0;

  double real() const { return value.real(); }
  double imag() const { return value.imag(); }
};

struct LineOptions {
  double truncation_height = 12.0;
  double rel_tol = 1e-10;
  int max_panels = 20000;
  /// The window is never widened past this half-width.
  double max_height = 96.0;
};

/// \int_{-inf}^{inf} f(y) dy for integrands that decay super-exponentially.
///
/// The window [-Y, Y] starts at options.truncation_height and doubles while
/// the ring [Y, 2Y] u [-2Y, -Y] contributes more than rel_tol/10 of the
/// integral. Panels are then bisected adaptively (Gauss-Kronrod 7/15) until
/// the summed discretization estimate is below rel_tol times
/// max(|I|, 1e-2 \int |f|). err_estimate additionally carries the
/// integrated Sample::abs_error and the last ring's contribution.
/// Evaluation is sequential and summation runs in panel order, so results
/// are reproducible bit for bit. Throws NoConvergence when max_panels or
/// max_height would be exceeded.
QuadResult integrate_line(const LineIntegrand& f, const LineOptions& options);

/// One Gauss-Kronrod 7/15 panel on [a, b]: returns the Kronrod value and
/// stores the embedded Gauss value. Exposed for testing.
Complex gauss_kronrod_15(const std::function<Complex(double)>& f, double a, double b,
                         Complex* gauss_7);

}  // namespace chernoff::quad
