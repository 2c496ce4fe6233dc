#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "chernoff/airy.hpp"
#include "chernoff/algebra.hpp"
#include "chernoff/errors.hpp"
#include "chernoff/quadrature.hpp"

namespace {

using namespace chernoff::algebra;
using Complex = std::complex<double>;

Rational q(const char* s) {
  Rational r(s);
  r.canonicalize();
  return r;
}

RationalPoly poly(std::initializer_list<std::pair<int, const char*>> coeffs) {
  RationalPoly p;
  for (const auto& [j, c] : coeffs) p.add(j, q(c));
  return p;
}

// Bernoulli numbers by the Akiyama-Tanigawa algorithm (B_1 = +1/2 convention).
std::vector<Rational> bernoulli(int n_max) {
  std::vector<Rational> out, a(n_max + 1);
  for (int m = 0; m <= n_max; ++m) {
    a[m] = Rational(1, m + 1);
    for (int j = m; j >= 1; --j) a[j - 1] = j * (a[j - 1] - a[j]);
    out.push_back(a[0]);
  }
  return out;
}

TEST(Algebra, DerivativesOfInverseAi) {
  EXPECT_EQ(inv_ai_derivative(0), TermSum({0, 0, 1}, 1));
  EXPECT_EQ(inv_ai_derivative(1), TermSum({0, 1, 2}, -1));
  TermSum second;
  second.add({0, 2, 3}, 2);
  second.add({1, 0, 1}, -1);
  EXPECT_EQ(inv_ai_derivative(2), second);
}

TEST(Algebra, DerivativeMatchesFiniteDifferences) {
  const double h = 1e-5;
  for (int m = 1; m <= 6; ++m) {
    const TermSum lower = inv_ai_derivative(m - 1);
    const TermSum upper = inv_ai_derivative(m);
    for (Complex z : {Complex{0.3, 0.7}, Complex{-1.0, 2.0}, Complex{1.5, -0.4}}) {
      auto eval = [](const TermSum& s, Complex w) {
        const auto e = chernoff::airy::airy_ai(w);
        return s.evaluate(w, e.ai, e.ai_prime);
      };
      const Complex fd = (eval(lower, z + h) - eval(lower, z - h)) / (2 * h);
      const Complex exact = eval(upper, z);
      EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact))) << m << " " << z;
    }
  }
}

TEST(Algebra, InverseAiDerivativeStructure) {
  for (int m = 0; m <= 20; ++m) {
    const TermSum d = inv_ai_derivative(m);
    for (const auto& [t, c] : d.terms()) {
      // Weight z ~ 2, Ai' ~ 1 (from Ai'' = z Ai). Differentiating a power of z
      // drops the weight by 3 more than the other rules do.
      const int deficit = m - (2 * t.j + t.k);
      EXPECT_GE(deficit, 0) << m;
      EXPECT_EQ(deficit % 3, 0) << m;
      EXPECT_EQ(t.ell, t.k + 1);
      EXPECT_EQ(c.get_den(), 1) << "integer coefficients";
    }
  }
}

TEST(Algebra, ReductionIdentities) {
  EXPECT_TRUE(reduce_integral({0, 1, 3}).empty());
  EXPECT_EQ(reduce_integral({0, 2, 4}), TermSum({1, 0, 2}, Rational(1, 3)));
  EXPECT_EQ(reduce_integral({1, 2, 4}), TermSum({2, 0, 2}, Rational(1, 3)));
  EXPECT_EQ(reduce_integral({0, 4, 6}), TermSum({2, 0, 2}, Rational(1, 5)));
  EXPECT_EQ(reduce_integral({3, 0, 2}), TermSum({3, 0, 2}, 1));
}

TEST(Algebra, ReducedSupportKeepsEllMinusK) {
  for (int j = 0; j <= 4; ++j) {
    for (int k = 0; k <= 6; ++k) {
      for (int gap = 1; gap <= 3; ++gap) {
        const TermSum reduced = reduce_integral({j, k, k + gap});
        for (const auto& [t, c] : reduced.terms()) {
          EXPECT_EQ(t.k, 0);
          EXPECT_EQ(t.ell, gap);
        }
      }
    }
  }
}

// The contour integral of a derivative vanishes.
TEST(Algebra, IntegralOfDerivativeReducesToZero) {
  for (int j = 0; j <= 5; ++j) {
    for (int k = 0; k <= 5; ++k) {
      for (int gap = 1; gap <= 3; ++gap) {
        const TermSum d = term_sum_derivative(TermSum({j, k, k + gap}, 1));
        EXPECT_TRUE(reduce_sum(d).empty()) << j << "," << k << "," << k + gap;
      }
    }
  }
}

// The reduction I(0,2,4) = I(1,0,2)/3 checked by direct quadrature on Re z = 0.
TEST(Algebra, ReductionAgreesWithQuadrature) {
  auto line = [](AiryTerm term) {
    chernoff::quad::LineOptions o;
    return chernoff::quad::integrate_line(
        [term](double y) {
          const Complex z{0, y};
          const auto e = chernoff::airy::airy_ai(z);
          return chernoff::quad::Sample{TermSum(term, 1).evaluate(z, e.ai, e.ai_prime), 0.0};
        },
        o);
  };
  const Complex lhs = line({0, 2, 4}).value;
  const Complex rhs = line({1, 0, 2}).value / 3.0;
  EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::abs(rhs));
  EXPECT_LE(std::abs(line({0, 1, 3}).value), 1e-12);
}

TEST(Algebra, TableOfMomentPolynomials) {
  EXPECT_EQ(moment_polynomial(0), poly({{0, "1"}}));
  EXPECT_EQ(moment_polynomial(2), poly({{1, "-1/3"}}));
  EXPECT_EQ(moment_polynomial(4), poly({{2, "7/15"}}));
  EXPECT_EQ(moment_polynomial(6), poly({{3, "-31/21"}, {0, "26/21"}}));
  EXPECT_EQ(moment_polynomial(8), poly({{4, "127/15"}, {1, "-196/9"}}));
  EXPECT_EQ(moment_polynomial(10), poly({{5, "-2555/33"}, {2, "13160/33"}}));
  EXPECT_EQ(moment_polynomial(12), poly({{6, "1414477/1365"}, {3, "-2419532/273"}, {0, "1989472/1365"}}));
  EXPECT_EQ(moment_polynomial(12).to_string(), "1414477/1365*z^6 - 2419532/273*z^3 + 1989472/1365");
  EXPECT_EQ(moment_polynomial(0).to_string(), "1");
  EXPECT_EQ(moment_polynomial(3).to_string(), "0");
}

TEST(Algebra, StructureUpToOneHundred) {
  const std::vector<Rational> b = bernoulli(100);
  for (int n = 0; n <= 100; ++n) {
    const RationalPoly p = moment_polynomial(n);
    if (n % 2 == 1) {
      EXPECT_TRUE(p.is_zero()) << n;
      continue;
    }
    ASSERT_EQ(p.degree(), n / 2) << n;
    for (const auto& [j, c] : p.coeffs()) EXPECT_EQ((j - n / 2) % 3, 0) << n << " " << j;
    // n! [x^n] x/sinh x = (2 - 2^n) B_n for even n.
    Rational expected = b[n] * (2 - Rational(mpz_class(1) << n));
    expected.canonicalize();
    EXPECT_EQ(p.coefficient(n / 2), expected) << n;
    EXPECT_EQ(sinh_gf_coefficient(n), expected) << n;
  }
}

TEST(Algebra, SinhCoefficients) {
  EXPECT_EQ(sinh_gf_coefficient(0), 1);
  EXPECT_EQ(sinh_gf_coefficient(1), 0);
  EXPECT_EQ(sinh_gf_coefficient(2), Rational(-1, 3));
  EXPECT_EQ(sinh_gf_coefficient(4), Rational(7, 15));
  EXPECT_EQ(sinh_gf_coefficient(6), Rational(-31, 21));
}

TEST(Algebra, ByPartsSplitsAgree) {
  for (int n = 0; n <= 12; ++n) {
    for (int j = 0; j <= n; ++j) {
      EXPECT_EQ(by_parts_polynomial(j, n - j), moment_polynomial(n)) << j << "+" << n - j;
    }
  }
}

TEST(Algebra, InsertionOrderDoesNotMatter) {
  std::vector<std::pair<AiryTerm, Rational>> items;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) items.push_back({{j, k, k + 2}, Rational(j - 2 * k, k + 1)});
  items.push_back({{7, 0, 2}, 5});
  items.push_back({{7, 0, 2}, -5});
  TermSum reference;
  for (const auto& [t, c] : items) reference.add(t, c);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(items.begin(), items.end(), rng);
    TermSum s;
    for (const auto& [t, c] : items) s.add(t, c);
    EXPECT_EQ(s, reference);
    EXPECT_EQ(reduce_sum(s), reduce_sum(reference));
  }
  EXPECT_EQ(reference.coefficient({7, 0, 2}), 0);
  for (const auto& [t, c] : reference.terms()) EXPECT_NE(c, 0);
}

TEST(Algebra, ProductAndShift) {
  const TermSum a({1, 0, 1}, 2);
  const TermSum b({0, 1, 2}, Rational(1, 2));
  EXPECT_EQ(a * b, TermSum({1, 1, 3}, 1));
  EXPECT_EQ(a.shift_ell(2), TermSum({1, 0, 3}, 2));
}

TEST(Algebra, Conjectures) {
  const ConjectureReport report = verify_conjectures(100);
  EXPECT_TRUE(report.all_pass());
  EXPECT_EQ(report.rows.size(), 101u);
  EXPECT_THROW(verify_conjectures(1), chernoff::InvalidArgument);

  std::vector<RationalPoly> polys;
  for (int n = 0; n <= 8; ++n) polys.push_back(moment_polynomial(n));
  polys[8].add(4, 1);
  polys[5].add(1, 1);
  const ConjectureReport broken = check_polynomials(polys);
  EXPECT_FALSE(broken.all_pass());
  EXPECT_EQ(broken.failures().size(), 2u);
}

TEST(Algebra, JsonRoundTrip) {
  for (int n : {0, 2, 7, 12, 30}) {
    const RationalPoly p = moment_polynomial(n);
    const auto j = poly_to_json(n, p);
    EXPECT_EQ(j["n"], n);
    EXPECT_EQ(poly_from_json(j), p);
  }
  EXPECT_EQ(poly_to_json(0, moment_polynomial(0))["coeffs"]["0"], "1/1");
  EXPECT_EQ(rational_string(Rational(-6, 4)), "-3/2");
  nlohmann::json bad = {{"n", 2}, {"coeffs", {{"1", "x/3"}}}};
  EXPECT_THROW(poly_from_json(bad), chernoff::InvalidArgument);
}

TEST(Algebra, ErrorPaths) {
  EXPECT_THROW(reduce_integral({0, 2, 2}), chernoff::NotIntegrable);
  EXPECT_THROW(reduce_integral({1, 3, 1}), chernoff::NotIntegrable);
  EXPECT_THROW(moment_polynomial(-1), chernoff::InvalidArgument);
  EXPECT_THROW(extract_polynomial(TermSum({0, 1, 3}, 1)), std::logic_error);
  EXPECT_THROW(term_sum_derivative(TermSum({0, 1, 0}, 1)), chernoff::InvalidArgument);
}

TEST(Algebra, IndependentPerThread) {
  RationalPoly a, b;
  std::thread t1([&] { a = moment_polynomial(40); });
  std::thread t2([&] { b = moment_polynomial(40); });
  t1.join();
  t2.join();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, moment_polynomial(40));
}

}  // namespace
