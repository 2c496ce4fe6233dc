#pragma once

#include <complex>

namespace chernoff::airy {

using Complex = std::complex<double>;

/// Ai and Ai' at one point together with an absolute error bound that
/// applies to each real and imaginary component.
struct AiryEval {
  Complex ai;
  Complex ai_prime;
  double abs_error_bound = 0.0;
};

/// Below this modulus the Maclaurin series is always used.
inline constexpr double kSeriesRadius = 6.0;
/// Between kSeriesRadius and this modulus both the series and the
/// asymptotic route are evaluated and the one with the smaller bound wins.
inline constexpr double kSeriesBandRadius = 12.0;
/// Arguments with a larger modulus are rejected with OverflowDomain.
inline constexpr double kOverflowRadius = 1.0e5;

/// Ai(z), Ai'(z) with abs_error_bound <= target_abs_err.
///
/// Throws OverflowDomain when |z| > kOverflowRadius or when the result
/// would not fit in a double, and AccuracyUnreachable when the attainable
/// bound exceeds target_abs_err. Real arguments produce results with
/// imaginary parts exactly zero, and Ai(conj z) == conj(Ai(z)) bitwise.
AiryEval airy_ai(Complex z, double target_abs_err);

/// Best-effort variant: returns the most accurate value the scheme can
/// produce, with its bound, and never throws AccuracyUnreachable.
AiryEval airy_ai(Complex z);

/// Bi(x) for real x with absolute error <= target_abs_err.
/// Throws OverflowDomain for x beyond roughly 100.
double airy_bi(double x, double target_abs_err);

/// The n-th real zero a_n of Ai, with 0 > a_1 > a_2 > ...
/// Valid for 1 <= n <= kMaxZeroIndex.
inline constexpr int kMaxZeroIndex = 10000;
double airy_zero(int n);

/// a_1, used for contour placement checks.
inline constexpr double kFirstZero = -2.338107410459767038489;

}  // namespace chernoff::airy
