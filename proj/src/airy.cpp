#include "chernoff/airy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "chernoff/errors.hpp"

namespace chernoff::airy {
namespace {

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.772453850905516027298167483341;
constexpr double kSqrt3 = std::numbers::sqrt3;

// Ai(0) and -Ai'(0).
constexpr double kAi0 = 0.355028053887817239260063186004;
constexpr double kMinusAiPrime0 = 0.258819403792806798405183560189;

// exp(-zeta) is formed explicitly; beyond this the result leaves double range.
constexpr double kMaxExponent = 700.0;
constexpr int kMaxSeriesTerms = 1000;
constexpr int kMaxAsymptoticTerms = 200;

const Complex kOmega{-0.5, kSqrt3 / 2};  // exp(2 pi i / 3)

// Neumaier-compensated complex accumulator.
class CompensatedSum {
 public:
  void add(Complex t) {
    add_component(re_, re_c_, t.real());
    add_component(im_, im_c_, t.imag());
  }
  Complex value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_component(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

struct Approx {
  Complex ai;
  Complex ai_prime;
  double bound = 0.0;
};

// The two standard Maclaurin solutions
//   f(z) = sum 3^k (1/3)_k z^{3k} / (3k)!,  g(z) = sum 3^k (2/3)_k z^{3k+1} / (3k+1)!
// and their derivatives, each with an absolute error bound.
struct SeriesSums {
  Complex f, g, fp, gp;
  double err_f = 0.0, err_g = 0.0, err_fp = 0.0, err_gp = 0.0;
};

SeriesSums maclaurin(Complex z, double target) {
  const Complex z3 = z * z * z;
  const double az3 = std::abs(z3);

  Complex a = 1.0, b = z, ap = 0.0, bp = 1.0;
  CompensatedSum f, g, fp, gp;
  f.add(a);
  g.add(b);
  gp.add(bp);
  // Each term carries a relative rounding error of at most (6k + 4) u.
  double round_f = 4 * kUnit, round_g = 4 * kUnit * std::abs(b);
  double round_fp = 0.0, round_gp = 4 * kUnit;
  double max_term = std::max(1.0, std::abs(b));
  double tail_f = 0.0, tail_g = 0.0, tail_fp = 0.0, tail_gp = 0.0;

  int below = 0;
  bool done = false;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double d = 3.0 * k;
    a *= z3 / ((d + 2) * (d + 3));
    b *= z3 / ((d + 3) * (d + 4));
    ap = (k == 0) ? z * z / 2.0 : ap * z3 / ((d + 2) * d);
    bp *= z3 / ((d + 3) * (d + 1));
    f.add(a);
    g.add(b);
    fp.add(ap);
    gp.add(bp);

    const double weight = (6.0 * (k + 1) + 4) * kUnit;
    const double ma = std::abs(a), mb = std::abs(b), map = std::abs(ap), mbp = std::abs(bp);
    round_f += weight * ma;
    round_g += weight * mb;
    round_fp += weight * map;
    round_gp += weight * mbp;
    const double largest = std::max({ma, mb, map, mbp});
    max_term = std::max(max_term, largest);

    // Every later step multiplies by at most this ratio.
    const double next = 3.0 * (k + 1);
    const double r = az3 / (next * (next + 1));
    const double threshold = std::max(target / 10, 1e-3 * kUnit * max_term);
    below = (largest < threshold) ? below + 1 : 0;
    if (r < 0.5 && below >= 2) {
      const double geo = r / (1 - r);
      tail_f = ma * geo;
      tail_g = mb * geo;
      tail_fp = map * geo;
      tail_gp = mbp * geo;
      done = true;
      break;
    }
  }
  if (!done) {
    throw OverflowDomain("Airy Maclaurin series did not terminate");
  }

  SeriesSums s;
  s.f = f.value();
  s.g = g.value();
  s.fp = fp.value();
  s.gp = gp.value();
  s.err_f = tail_f + round_f + 2 * kUnit * std::abs(s.f);
  s.err_g = tail_g + round_g + 2 * kUnit * std::abs(s.g);
  s.err_fp = tail_fp + round_fp + 2 * kUnit * std::abs(s.fp);
  s.err_gp = tail_gp + round_gp + 2 * kUnit * std::abs(s.gp);
  return s;
}

Approx ai_from_series(Complex z, double target) {
  const SeriesSums s = maclaurin(z, target);
  Approx r;
  r.ai = kAi0 * s.f - kMinusAiPrime0 * s.g;
  r.ai_prime = kAi0 * s.fp - kMinusAiPrime0 * s.gp;
  const double e_ai = kAi0 * s.err_f + kMinusAiPrime0 * s.err_g +
                      3 * kUnit * (kAi0 * std::abs(s.f) + kMinusAiPrime0 * std::abs(s.g));
  const double e_aip = kAi0 * s.err_fp + kMinusAiPrime0 * s.err_gp +
                       3 * kUnit * (kAi0 * std::abs(s.fp) + kMinusAiPrime0 * std::abs(s.gp));
  r.bound = std::max(e_ai, e_aip);
  return r;
}

// sqrt(pi) Gamma(n/2 + 1) / Gamma(n/2 + 1/2)
double chi(int n) {
  return kSqrtPi * std::exp(std::lgamma(n / 2.0 + 1) - std::lgamma(n / 2.0 + 0.5));
}

// Poincare expansion, valid for |arg z| <= 2 pi / 3 and large |z|.
Approx ai_asymptotic(Complex z) {
  const Complex sz = std::sqrt(z);
  const Complex zeta = (2.0 / 3.0) * z * sz;
  const Complex z14 = std::sqrt(sz);
  if (-zeta.real() > kMaxExponent) {
    throw OverflowDomain("Ai overflows a double at this argument");
  }
  const double azeta = std::abs(zeta);
  const Complex step = -1.0 / zeta;

  CompensatedSum su, sv;
  su.add(1.0);
  sv.add(1.0);
  Complex power = 1.0;
  double u = 1.0;
  double prev = 1.0;
  double neglected_u = 0.0, neglected_v = 0.0;
  double round_u = kUnit, round_v = kUnit;
  int n = 1;
  for (; n <= kMaxAsymptoticTerms; ++n) {
    u *= (6.0 * n - 5) * (6.0 * n - 3) * (6.0 * n - 1) / ((2.0 * n - 1) * 216.0 * n);
    const double v = -(6.0 * n + 1) / (6.0 * n - 1) * u;
    power *= step;
    const double mag_u = std::abs(u) * std::abs(power);
    const double mag_v = std::abs(v) * std::abs(power);
    const double mag = std::max(mag_u, mag_v);
    if (mag >= prev || mag < 1e-3 * kUnit) {
      neglected_u = mag_u;
      neglected_v = mag_v;
      break;
    }
    su.add(u * power);
    sv.add(v * power);
    round_u += 4.0 * n * kUnit * mag_u;
    round_v += 4.0 * n * kUnit * mag_v;
    prev = mag;
  }

  const double arg = std::abs(std::arg(z));
  const double stretch = std::exp(kPi / (72 * azeta));
  const double factor = arg <= kPi / 3 ? stretch : 2 * chi(n) * stretch;

  const Complex pre = std::exp(-zeta) / (2 * kSqrtPi);
  Approx r;
  const Complex sum_u = su.value(), sum_v = sv.value();
  r.ai = pre / z14 * sum_u;
  r.ai_prime = -pre * z14 * sum_v;
  const double exp_rel = (4 * azeta + 10.0 * n + 10) * kUnit;
  const double e_ai = std::abs(pre / z14) * (factor * neglected_u + round_u) +
                      exp_rel * std::abs(r.ai);
  const double e_aip = std::abs(pre * z14) * (factor * neglected_v + round_v) +
                       exp_rel * std::abs(r.ai_prime);
  r.bound = std::max(e_ai, e_aip);
  return r;
}

// Taylor steps of y'' = z y towards the origin, starting from the asymptotic
// expansion at |z| = kSeriesBandRadius on the same ray. For |arg z| <= pi/3,
// Ai grows in that direction, so errors in the other solution die out;
// beyond that they grow relative to Ai by at most exp(2 Re(zeta - zeta_start)).
Approx ai_inward(Complex z) {
  constexpr double kStep = 0.5;
  constexpr int kMaxTaylorTerms = 200;
  const double mod = std::abs(z);
  const Complex dir = z / mod;
  const Approx start = ai_asymptotic(dir * kSeriesBandRadius);
  Complex y = start.ai, yp = start.ai_prime;
  double rel = start.bound / std::min(std::abs(y), std::abs(yp));

  double pos = kSeriesBandRadius;
  while (pos > mod) {
    const double len = std::min(kStep, pos - mod);
    const Complex z0 = dir * pos;
    const Complex h = -dir * len;
    // n (n - 1) c_n = z0 c_{n-2} + c_{n-3}
    Complex c0 = y, c1 = yp, c2 = z0 * y / 2.0;
    CompensatedSum sy, syp;
    sy.add(c0);
    sy.add(c1 * h);
    sy.add(c2 * h * h);
    syp.add(c1);
    syp.add(2.0 * c2 * h);
    double mag_y = std::abs(c0) + std::abs(c1) * len + std::abs(c2) * len * len;
    double mag_yp = std::abs(c1) + 2 * std::abs(c2) * len;
    Complex hpow = h * h;
    int below = 0;
    int n = 3;
    for (; n < kMaxTaylorTerms; ++n) {
      const Complex cn = (z0 * c1 + c0) / (n * (n - 1.0));
      const Complex dy_term = static_cast<double>(n) * cn * hpow;
      hpow *= h;
      const Complex y_term = cn * hpow;
      sy.add(y_term);
      syp.add(dy_term);
      mag_y += std::abs(y_term);
      mag_yp += std::abs(dy_term);
      const double tiny = 1e-3 * kUnit;
      below = (std::abs(y_term) < tiny * mag_y && std::abs(dy_term) < tiny * mag_yp) ? below + 1 : 0;
      if (below >= 2) break;
      c0 = c1;
      c1 = c2;
      c2 = cn;
    }
    y = sy.value();
    yp = syp.value();
    rel += 4.0 * n * kUnit * std::max(mag_y / std::abs(y), mag_yp / std::abs(yp));
    pos -= len;
  }
  Approx r;
  r.ai = y;
  r.ai_prime = yp;
  const Complex z1 = dir * kSeriesBandRadius;
  const double growth = (2.0 / 3.0) * ((z * std::sqrt(z)).real() - (z1 * std::sqrt(z1)).real());
  r.bound = rel * std::exp(2 * std::max(0.0, growth)) * std::max(std::abs(y), std::abs(yp));
  return r;
}

// Below this modulus the series is accurate enough near the positive axis.
constexpr double kInwardMinRadius = 2.0;

// |arg z| <= 2 pi / 3.
Approx ai_sector(Complex z) {
  const double mod = std::abs(z);
  const bool inward = mod > kInwardMinRadius && mod <= kSeriesBandRadius &&
                      std::abs(std::arg(z)) <= kPi / 2;
  Approx best;
  if (mod <= kSeriesRadius) {
    best = ai_from_series(z, 0.0);
  } else {
    best = ai_asymptotic(z);
    if (mod <= kSeriesBandRadius) {
      const Approx series = ai_from_series(z, 0.0);
      if (series.bound < best.bound) {
        best = series;
      }
    }
  }
  // Only worth trying where the other routes lost relative accuracy.
  const double scale = std::max(std::abs(best.ai), std::abs(best.ai_prime));
  if (inward && best.bound > 1e-13 * scale) {
    const Approx stepped = ai_inward(z);
    if (stepped.bound < best.bound) {
      best = stepped;
    }
  }
  return best;
}

// Ai(z) + w Ai(w z) + w^2 Ai(w^2 z) = 0 with w = exp(2 pi i / 3).
Approx ai_connection(Complex z) {
  const Complex w2 = kOmega * kOmega;
  const Approx first = ai_sector(kOmega * z);
  const Approx second = ai_sector(w2 * z);
  Approx r;
  r.ai = -kOmega * first.ai - w2 * second.ai;
  r.ai_prime = -w2 * first.ai_prime - kOmega * second.ai_prime;
  r.bound = first.bound + second.bound +
            4 * kUnit * std::max(std::abs(first.ai) + std::abs(second.ai),
                                 std::abs(first.ai_prime) + std::abs(second.ai_prime));
  return r;
}

Approx ai_upper(Complex z) {
  const double mod = std::abs(z);
  if (std::arg(z) <= 2 * kPi / 3) {
    return ai_sector(z);
  }
  if (mod <= kSeriesRadius) {
    return ai_from_series(z, 0.0);
  }
  Approx best = ai_connection(z);
  if (mod <= kSeriesBandRadius) {
    const Approx series = ai_from_series(z, 0.0);
    if (series.bound < best.bound) {
      best = series;
    }
  }
  return best;
}

Approx evaluate(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidArgument("Airy argument must be finite");
  }
  if (std::abs(z) > kOverflowRadius) {
    throw OverflowDomain("|z| exceeds the Airy overflow radius");
  }
  if (z.imag() == 0) {
    z.imag(0.0);  // fold -0.0 so the negative real axis uses the connection formula
  }
  Approx r;
  if (z.imag() < 0) {
    r = ai_upper(std::conj(z));
    r.ai = std::conj(r.ai);
    r.ai_prime = std::conj(r.ai_prime);
  } else {
    r = ai_upper(z);
  }
  if (z.imag() == 0) {
    r.ai.imag(0.0);
    r.ai_prime.imag(0.0);
  }
  if (!std::isfinite(std::abs(r.ai)) || !std::isfinite(std::abs(r.ai_prime))) {
    throw OverflowDomain("Ai overflows a double at this argument");
  }
  return r;
}

double bi_asymptotic(double x, double& bound) {
  const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
  if (zeta > kMaxExponent) {
    throw OverflowDomain("Bi overflows a double at this argument");
  }
  double u = 1.0, power = 1.0, sum = 1.0, prev = 1.0, neglected = 0.0;
  int n = 1;
  for (; n <= kMaxAsymptoticTerms; ++n) {
    u *= (6.0 * n - 5) * (6.0 * n - 3) * (6.0 * n - 1) / ((2.0 * n - 1) * 216.0 * n);
    power /= zeta;
    const double term = u * power;
    if (term >= prev || term < 1e-3 * kUnit) {
      neglected = term;
      break;
    }
    sum += term;
    prev = term;
  }
  const double pre = std::exp(zeta) / (kSqrtPi * std::sqrt(std::sqrt(x)));
  const double value = pre * sum;
  // Recessive contribution exp(-2 zeta) is below the neglected term here.
  bound = pre * neglected + (4 * zeta + 10.0 * n + 10) * kUnit * value;
  return value;
}

}  // namespace

AiryEval airy_ai(Complex z) {
  const Approx r = evaluate(z);
  return {r.ai, r.ai_prime, r.bound};
}

AiryEval airy_ai(Complex z, double target_abs_err) {
  if (!(target_abs_err > 0)) {
    throw InvalidArgument("target_abs_err must be positive");
  }
  const Approx r = evaluate(z);
  if (r.bound > target_abs_err) {
    throw AccuracyUnreachable("Ai bound " + format_sci(r.bound) + " exceeds target " +
                              format_sci(target_abs_err));
  }
  return {r.ai, r.ai_prime, r.bound};
}

double airy_bi(double x, double target_abs_err) {
  if (!(target_abs_err > 0)) {
    throw InvalidArgument("target_abs_err must be positive");
  }
  if (!std::isfinite(x)) {
    throw InvalidArgument("Bi argument must be finite");
  }
  double value = 0.0;
  double bound = 0.0;
  if (x > 30.0) {
    value = bi_asymptotic(x, bound);
  } else if (x >= -kSeriesRadius) {
    // All series terms are positive for x > 0, so no cancellation there.
    const SeriesSums s = maclaurin(Complex{x, 0.0}, 0.0);
    value = kSqrt3 * (kAi0 * s.f.real() + kMinusAiPrime0 * s.g.real());
    bound = kSqrt3 * (kAi0 * s.err_f + kMinusAiPrime0 * s.err_g) + 4 * kUnit * std::abs(value);
  } else {
    // Bi(x) = 2 Re(exp(i pi/6) Ai(|x| exp(-i pi/3))) for x < 0.
    if (-x > kOverflowRadius) {
      throw OverflowDomain("|x| exceeds the Airy overflow radius");
    }
    const Complex rotated = std::polar(-x, -kPi / 3);
    const Approx a = ai_upper(std::conj(rotated));
    const Complex ai_rot = std::conj(a.ai);
    value = 2 * (std::polar(1.0, kPi / 6) * ai_rot).real();
    bound = 2 * a.bound + 4 * kUnit * std::abs(ai_rot);
  }
  if (bound > target_abs_err) {
    throw AccuracyUnreachable("Bi bound " + format_sci(bound) + " exceeds target " +
                              format_sci(target_abs_err));
  }
  return value;
}

double airy_zero(int n) {
  if (n < 1 || n > kMaxZeroIndex) {
    throw InvalidArgument("airy_zero index out of range: " + std::to_string(n));
  }
  // a_n ~ -T(3 pi (4n - 1) / 8)
  const double t = 3 * kPi * (4.0 * n - 1) / 8;
  const double t2 = 1 / (t * t);
  const double guess = -std::pow(t, 2.0 / 3.0) *
                       (1 + t2 * (5.0 / 48 + t2 * (-5.0 / 36 + t2 * 77125.0 / 82944)));
  const double spacing = kPi / std::sqrt(-guess);

  auto ai = [](double x) { return evaluate(Complex{x, 0.0}).ai.real(); };
  double lo = guess - 0.25 * spacing;
  double hi = guess + 0.25 * spacing;
  double f_lo = ai(lo);
  const double f_hi = ai(hi);
  if ((f_lo > 0) == (f_hi > 0)) {
    throw NoConvergence("failed to bracket Airy zero " + std::to_string(n));
  }
  for (int it = 0; it < 200 && hi - lo > 4 * kUnit * std::abs(lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = ai(mid);
    if (f_mid == 0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  const Approx at = evaluate(Complex{x, 0.0});
  return x - at.ai.real() / at.ai_prime.real();
}

}  // namespace chernoff::airy
