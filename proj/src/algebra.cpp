#include "chernoff/algebra.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

#include "chernoff/errors.hpp"

namespace chernoff::algebra {
namespace {

// Worklist order for reduction: larger k first, so every term is expanded
// only after all of its contributions have been merged.
struct HigherKFirst {
  bool operator()(const AiryTerm& a, const AiryTerm& b) const {
    if (a.k != b.k) return a.k > b.k;
    if (a.j != b.j) return a.j < b.j;
    return a.ell < b.ell;
  }
};

Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

AlgebraEngine& thread_engine() {
  thread_local AlgebraEngine engine;
  return engine;
}

std::string term_factor(int degree) {
  if (degree == 0) return "";
  if (degree == 1) return "z";
  return "z^" + std::to_string(degree);
}

}  // namespace

// ---------------------------------------------------------------- TermSum

TermSum::TermSum(AiryTerm term, Rational coeff) { add(term, coeff); }

void TermSum::add(const AiryTerm& term, const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(term, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational TermSum::coefficient(const AiryTerm& term) const {
  const auto it = terms_.find(term);
  return it == terms_.end() ? Rational(0) : it->second;
}

TermSum& TermSum::operator+=(const TermSum& other) {
  for (const auto& [term, coeff] : other.terms_) add(term, coeff);
  return *this;
}

TermSum& TermSum::operator*=(const Rational& scale) {
  if (scale == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& entry : terms_) entry.second *= scale;
  return *this;
}

TermSum operator*(const TermSum& lhs, const TermSum& rhs) {
  TermSum out;
  for (const auto& [a, ca] : lhs.terms_) {
    for (const auto& [b, cb] : rhs.terms_) {
      out.add({a.j + b.j, a.k + b.k, a.ell + b.ell}, ca * cb);
    }
  }
  return out;
}

TermSum TermSum::shift_ell(int shift) const {
  TermSum out;
  for (const auto& [term, coeff] : terms_) {
    out.terms_.emplace(AiryTerm{term.j, term.k, term.ell + shift}, coeff);
  }
  return out;
}

std::complex<double> TermSum::evaluate(std::complex<double> z, std::complex<double> ai,
                                       std::complex<double> ai_prime) const {
  std::complex<double> sum = 0.0;
  for (const auto& [term, coeff] : terms_) {
    sum += coeff.get_d() * std::pow(z, term.j) * std::pow(ai_prime, term.k) /
           std::pow(ai, term.ell);
  }
  return sum;
}

std::string TermSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [term, coeff] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << coeff.get_str() << "*[" << term.j << "," << term.k << "," << term.ell << "]";
  }
  return out.str();
}

// ----------------------------------------------------------- RationalPoly

RationalPoly::RationalPoly(Map coeffs) {
  for (auto& [degree, coeff] : coeffs) add(degree, coeff);
}

void RationalPoly::add(int degree, const Rational& coeff) {
  if (degree < 0) throw InvalidArgument("negative polynomial degree");
  if (coeff == 0) return;
  auto [it, inserted] = coeffs_.try_emplace(degree, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) coeffs_.erase(it);
  }
}

Rational RationalPoly::coefficient(int degree) const {
  const auto it = coeffs_.find(degree);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

int RationalPoly::degree() const {
  return coeffs_.empty() ? kZeroDegree : coeffs_.rbegin()->first;
}

std::complex<double> RationalPoly::operator()(std::complex<double> z) const {
  // Horner over the dense coefficient range.
  std::complex<double> acc = 0.0;
  for (int d = degree(); d >= 0; --d) {
    acc = acc * z + coefficient(d).get_d();
  }
  return acc;
}

std::string RationalPoly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    const auto& [degree, coeff] = *it;
    Rational mag = abs(coeff);
    if (first) {
      if (coeff < 0) out << "-";
    } else {
      out << (coeff < 0 ? " - " : " + ");
    }
    first = false;
    const std::string factor = term_factor(degree);
    if (factor.empty()) {
      out << mag.get_str();
    } else if (mag == 1) {
      out << factor;
    } else {
      out << mag.get_str() << "*" << factor;
    }
  }
  return out.str();
}

// ----------------------------------------------------------------- engine

const TermSum& AlgebraEngine::inv_ai_derivative(int m) {
  if (m < 0) throw InvalidArgument("derivative order must be nonnegative");
  if (derivatives_.empty()) derivatives_.emplace_back(AiryTerm{0, 0, 1}, Rational(1));
  while (static_cast<int>(derivatives_.size()) <= m) {
    derivatives_.push_back(term_sum_derivative(derivatives_.back()));
  }
  return derivatives_[m];
}

TermSum AlgebraEngine::reduce_sum(const TermSum& s) {
  std::map<AiryTerm, Rational, HigherKFirst> work;
  for (const auto& [term, coeff] : s.terms()) {
    if (term.ell <= term.k) {
      throw NotIntegrable("I(" + std::to_string(term.j) + "," + std::to_string(term.k) + "," +
                          std::to_string(term.ell) + ") needs ell > k");
    }
    if (term.j < 0 || term.k < 0) continue;
    work[term] += coeff;
  }

  TermSum out;
  while (!work.empty()) {
    auto node = work.extract(work.begin());
    const AiryTerm t = node.key();
    const Rational& c = node.mapped();
    if (c == 0) continue;
    if (t.k == 0) {
      out.add(t, c);
      continue;
    }
    auto push = [&](AiryTerm child, long num) {
      if (child.j < 0 || child.k < 0 || num == 0) return;
      work[child] += c * ratio(num, t.ell - 1);
    };
    if (t.k == 1) {
      push({t.j - 1, 0, t.ell - 1}, t.j);
    } else {
      push({t.j - 1, t.k - 1, t.ell - 1}, t.j);
      push({t.j + 1, t.k - 2, t.ell - 2}, t.k - 1);
    }
  }
  return out;
}

const TermSum& AlgebraEngine::reduce_integral(const AiryTerm& term) {
  if (auto it = reductions_.find(term); it != reductions_.end()) return it->second;
  TermSum reduced = reduce_sum(TermSum(term, Rational(1)));
  return reductions_.emplace(term, std::move(reduced)).first->second;
}

RationalPoly AlgebraEngine::moment_polynomial(int n) {
  if (n < 0) throw InvalidArgument("moment order must be nonnegative");
  return extract_polynomial(reduce_sum(inv_ai_derivative(n).shift_ell(1)));
}

Rational AlgebraEngine::sinh_gf_coefficient(int n) {
  if (n < 0) throw InvalidArgument("coefficient index must be nonnegative");
  if (n % 2 == 1) return Rational(0);
  const int half = n / 2;
  // sinh(x)/x = sum_i x^{2i} / (2i+1)!; invert term by term in x^2.
  while (static_cast<int>(sinh_series_.size()) <= half) {
    const int m = static_cast<int>(sinh_series_.size());
    if (m == 0) {
      sinh_series_.emplace_back(1);
      continue;
    }
    Rational acc = 0;
    mpz_class fact = 1;  // (2i+1)!
    for (int i = 1; i <= m; ++i) {
      fact *= (2 * i) * (2 * i + 1);
      acc -= sinh_series_[m - i] / Rational(fact);
    }
    sinh_series_.push_back(acc);
  }
  mpz_class n_fact;
  mpz_fac_ui(n_fact.get_mpz_t(), static_cast<unsigned long>(n));
  return sinh_series_[half] * Rational(n_fact);
}

// ------------------------------------------------------- free operations

TermSum term_sum_derivative(const TermSum& s) {
  TermSum out;
  for (const auto& [t, c] : s.terms()) {
    if (t.j > 0) out.add({t.j - 1, t.k, t.ell}, c * t.j);
    if (t.k > 0) {
      if (t.ell < 1) throw InvalidArgument("derivative leaves the Airy-term algebra");
      // Ai'' = z Ai
      out.add({t.j + 1, t.k - 1, t.ell - 1}, c * t.k);
    }
    if (t.ell != 0) out.add({t.j, t.k + 1, t.ell + 1}, -c * t.ell);
  }
  return out;
}

TermSum inv_ai_derivative(int m) { return thread_engine().inv_ai_derivative(m); }

TermSum reduce_integral(const AiryTerm& term) { return thread_engine().reduce_integral(term); }

TermSum reduce_sum(const TermSum& s) { return thread_engine().reduce_sum(s); }

RationalPoly extract_polynomial(const TermSum& reduced) {
  RationalPoly p;
  for (const auto& [t, c] : reduced.terms()) {
    if (t.k != 0 || t.ell != 2) {
      throw std::logic_error("reduced moment integrand contains term outside I(j,0,2): " +
                             reduced.to_string());
    }
    p.add(t.j, c);
  }
  return p;
}

RationalPoly moment_polynomial(int n) { return thread_engine().moment_polynomial(n); }

RationalPoly by_parts_polynomial(int j, int k) {
  if (j < 0 || k < 0) throw InvalidArgument("derivative orders must be nonnegative");
  AlgebraEngine& engine = thread_engine();
  TermSum product = engine.inv_ai_derivative(j) * engine.inv_ai_derivative(k);
  if (j % 2 == 1) product *= Rational(-1);
  return extract_polynomial(engine.reduce_sum(product));
}

Rational sinh_gf_coefficient(int n) { return thread_engine().sinh_gf_coefficient(n); }

// ------------------------------------------------------------ conjectures

bool ConjectureRow::pass() const {
  for (const auto& check : {odd_vanishes, exact_degree, leading_matches_sinh, mod3_support}) {
    if (check.has_value() && !*check) return false;
  }
  return true;
}

bool ConjectureReport::all_pass() const {
  for (const auto& row : rows) {
    if (!row.pass()) return false;
  }
  return true;
}

std::vector<std::string> ConjectureReport::failures() const {
  std::vector<std::string> out;
  for (const auto& row : rows) {
    const std::string tag = "n=" + std::to_string(row.n) + ": ";
    if (row.odd_vanishes == false) out.push_back(tag + "p_n is not the zero polynomial");
    if (row.exact_degree == false) out.push_back(tag + "degree differs from n/2");
    if (row.leading_matches_sinh == false) {
      out.push_back(tag + "leading coefficient differs from n![x^n](x/sinh x)");
    }
    if (row.mod3_support == false) out.push_back(tag + "support not confined to j = n/2 mod 3");
  }
  return out;
}

ConjectureReport check_polynomials(std::span<const RationalPoly> polys) {
  ConjectureReport report;
  report.max_n = static_cast<int>(polys.size()) - 1;
  for (int n = 0; n < static_cast<int>(polys.size()); ++n) {
    const RationalPoly& p = polys[n];
    ConjectureRow row;
    row.n = n;
    if (n % 2 == 1) {
      row.odd_vanishes = p.is_zero();
    } else {
      const int half = n / 2;
      row.exact_degree = p.degree() == half;
      row.leading_matches_sinh = p.coefficient(half) == sinh_gf_coefficient(n);
      bool support = true;
      for (const auto& entry : p.coeffs()) {
        if ((entry.first - half) % 3 != 0) support = false;
      }
      row.mod3_support = support;
    }
    report.rows.push_back(row);
  }
  return report;
}

ConjectureReport verify_conjectures(int max_n) {
  if (max_n < 2) throw InvalidArgument("verify_conjectures needs max_n >= 2");
  std::vector<RationalPoly> polys;
  polys.reserve(max_n + 1);
  for (int n = 0; n <= max_n; ++n) polys.push_back(moment_polynomial(n));
  return check_polynomials(polys);
}

// ------------------------------------------------------------------- JSON

std::string rational_string(const Rational& q) {
  Rational reduced = q;
  reduced.canonicalize();
  return reduced.get_num().get_str() + "/" + reduced.get_den().get_str();
}

nlohmann::json poly_to_json(int n, const RationalPoly& p) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (const auto& [degree, coeff] : p.coeffs()) {
    coeffs[std::to_string(degree)] = rational_string(coeff);
  }
  return {{"n", n}, {"coeffs", coeffs}};
}

RationalPoly poly_from_json(const nlohmann::json& j) {
  RationalPoly p;
  for (const auto& [key, value] : j.at("coeffs").items()) {
    Rational q;
    if (q.set_str(value.get<std::string>(), 10) != 0 || q.get_den() == 0) {
      throw InvalidArgument("malformed rational coefficient: " + value.dump());
    }
    q.canonicalize();
    p.add(std::stoi(key), q);
  }
  return p;
}

}  // namespace chernoff::algebra
