#pragma once

#include <gmpxx.h>

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace chernoff::algebra {

using Rational = mpq_class;

/// The expression z^j Ai'(z)^k / Ai(z)^ell.
struct AiryTerm {
  int j = 0;
  int k = 0;
  int ell = 0;

  auto operator<=>(const AiryTerm&) const = default;
};

/// Finite exact linear combination of Airy terms. Zero coefficients are
/// never stored, and iteration follows the (j, k, ell) order, so two equal
/// sums compare equal however they were built.
class TermSum {
 public:
  using Map = std::map<AiryTerm, Rational>;

  TermSum() = default;
  TermSum(AiryTerm term, Rational coeff);

  void add(const AiryTerm& term, const Rational& coeff);
  Rational coefficient(const AiryTerm& term) const;

  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  TermSum& operator+=(const TermSum& other);
  TermSum& operator*=(const Rational& scale);
  friend TermSum operator+(TermSum lhs, const TermSum& rhs) { return lhs += rhs; }
  friend TermSum operator*(TermSum lhs, const Rational& scale) { return lhs *= scale; }
  /// Product in the algebra: exponents add.
  friend TermSum operator*(const TermSum& lhs, const TermSum& rhs);
  friend bool operator==(const TermSum&, const TermSum&) = default;

  /// Multiplies every term by Ai^-shift.
  TermSum shift_ell(int shift) const;

  /// Numerical value at z given Ai(z) and Ai'(z).
  std::complex<double> evaluate(std::complex<double> z, std::complex<double> ai,
                                std::complex<double> ai_prime) const;

  std::string to_string() const;

 private:
  Map terms_;
};

/// Polynomial in z with exact rational coefficients.
class RationalPoly {
 public:
  using Map = std::map<int, Rational>;

  RationalPoly() = default;
  explicit RationalPoly(Map coeffs);

  void add(int degree, const Rational& coeff);
  Rational coefficient(int degree) const;
  const Map& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Highest stored degree; kZeroDegree for the zero polynomial.
  int degree() const;
  static constexpr int kZeroDegree = -1;

  std::complex<double> operator()(std::complex<double> z) const;
  friend bool operator==(const RationalPoly&, const RationalPoly&) = default;

  /// Human-readable form, e.g. "-31/21*z^3 + 26/21"; "0" for the zero polynomial.
  std::string to_string() const;

 private:
  Map coeffs_;
};

/// d/dz of s, eliminating Ai'' through Ai'' = z Ai.
/// Throws InvalidArgument if a term with ell == 0 and k > 0 would leave the algebra.
TermSum term_sum_derivative(const TermSum& s);

/// m-th derivative of 1/Ai.
TermSum inv_ai_derivative(int m);

/// Rewrites the contour integral of one term as a combination of k = 0 terms
/// with the same ell - k. Throws NotIntegrable when ell <= k.
TermSum reduce_integral(const AiryTerm& term);

/// reduce_integral applied termwise, with coefficients merged.
TermSum reduce_sum(const TermSum& s);

/// Reads off a polynomial from a fully reduced sum supported on (j, 0, 2).
RationalPoly extract_polynomial(const TermSum& reduced);

/// p_n with E V^n = (1/2 pi i) \int p_n(z) / Ai(z)^2 dz for gamma = 1/sqrt(2).
RationalPoly moment_polynomial(int n);

/// The polynomial obtained from (-1)^j d^j(1/Ai) d^k(1/Ai); equals p_{j+k}.
RationalPoly by_parts_polynomial(int j, int k);

/// n! [x^n] (x / sinh x), by exact series division.
Rational sinh_gf_coefficient(int n);

/// Results for one n. Checks that do not apply to the parity of n are empty.
struct ConjectureRow {
  int n = 0;
  std::optional<bool> odd_vanishes;
  std::optional<bool> exact_degree;
  std::optional<bool> leading_matches_sinh;
  std::optional<bool> mod3_support;

  bool pass() const;
};

struct ConjectureReport {
  int max_n = 0;
  std::vector<ConjectureRow> rows;

  bool all_pass() const;
  std::vector<std::string> failures() const;
};

/// Checks p_0..p_max_n, max_n >= 2.
ConjectureReport verify_conjectures(int max_n);

/// Same checks on caller-supplied polynomials, polys[n] standing for p_n.
ConjectureReport check_polynomials(std::span<const RationalPoly> polys);

/// {"n": n, "coeffs": {"j": "num/den", ...}}
nlohmann::json poly_to_json(int n, const RationalPoly& p);
RationalPoly poly_from_json(const nlohmann::json& j);
std::string rational_string(const Rational& q);

/// Derivative and reduction caches behind the free functions. The free
/// functions use one instance per thread; an instance is not shareable.
class AlgebraEngine {
 public:
  const TermSum& inv_ai_derivative(int m);
  const TermSum& reduce_integral(const AiryTerm& term);
  TermSum reduce_sum(const TermSum& s);
  RationalPoly moment_polynomial(int n);
  Rational sinh_gf_coefficient(int n);

 private:
  std::vector<TermSum> derivatives_;
  std::map<AiryTerm, TermSum> reductions_;
  std::vector<Rational> sinh_series_;  // coefficients of x / sinh x
};

}  // namespace chernoff::algebra
