#include "chernoff/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "chernoff/errors.hpp"

namespace chernoff::quad {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod abscissae on [-1, 1] (positive half); odd indices are the Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  Complex value;
  double err = 0.0;         // discretization estimate; drives refinement
  double sample_err = 0.0;  // propagated integrand error; refinement cannot reduce it
  double l1 = 0.0;
};

Panel evaluate_panel(const LineIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Complex kronrod = 0.0, gauss = 0.0;
  double abs_sum = 0.0, sample_err = 0.0;
  std::array<Complex, 15> values;
  for (int i = 0; i < 8; ++i) {
    const double dx = half * kNodes[i];
    const Sample lo = f(center - dx);
    if (i == 7) {
      values[7] = lo.value;
      kronrod += kKronrodWeights[i] * lo.value;
      gauss += kGaussWeights[3] * lo.value;
      abs_sum += kKronrodWeights[i] * std::abs(lo.value);
      sample_err += kKronrodWeights[i] * lo.abs_error;
      break;
    }
    const Sample hi = f(center + dx);
    values[i] = lo.value;
    values[14 - i] = hi.value;
    kronrod += kKronrodWeights[i] * (lo.value + hi.value);
    abs_sum += kKronrodWeights[i] * (std::abs(lo.value) + std::abs(hi.value));
    sample_err += kKronrodWeights[i] * (lo.abs_error + hi.abs_error);
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (lo.value + hi.value);
  }

  // QUADPACK-style scaling of |K - G| against the spread of the integrand.
  const Complex mean = kronrod * 0.5;
  double asc = 0.0;
  for (int i = 0; i < 15; ++i) {
    const int w = i < 8 ? i : 14 - i;
    asc += kKronrodWeights[w] * std::abs(values[i] - mean);
  }
  asc *= half;
  double err = std::abs((kronrod - gauss) * half);
  if (asc > 0 && err > 0) err = asc * std::min(1.0, std::pow(200 * err / asc, 1.5));
  const double l1 = abs_sum * half;
  err = std::max(err, 50 * kEps * l1);

  Panel p;
  p.a = a;
  p.b = b;
  p.value = kronrod * half;
  p.err = err;
  p.sample_err = sample_err * half;
  p.l1 = l1;
  return p;
}

void add_range(const LineIntegrand& f, double a, double b, std::vector<Panel>& out) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(b - a - 1e-12)));
  const double width = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == pieces) ? b : lo + width;
    out.push_back(evaluate_panel(f, lo, hi));
  }
}

struct Totals {
  Complex value;
  double err = 0.0;
  double sample_err = 0.0;
  double l1 = 0.0;
};

Totals totals(const std::vector<Panel>& panels) {
  Totals t;
  for (const Panel& p : panels) {
    t.value += p.value;
    t.err += p.err;
    t.sample_err += p.sample_err;
    t.l1 += p.l1;
  }
  return t;
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double tolerance_scale(const Totals& t) { return std::max(std::abs(t.value), 1e-2 * t.l1); }

}  // namespace

Complex gauss_kronrod_15(const std::function<Complex(double)>& f, double a, double b,
                         Complex* gauss_7) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Complex kronrod = kKronrodWeights[7] * f(center);
  Complex gauss = kGaussWeights[3] * f(center);
  for (int i = 0; i < 7; ++i) {
    const Complex pair = f(center - half * kNodes[i]) + f(center + half * kNodes[i]);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  if (gauss_7 != nullptr) *gauss_7 = gauss * half;
  return kronrod * half;
}

QuadResult integrate_line(const LineIntegrand& f, const LineOptions& options) {
  if (!(options.truncation_height > 0) || !(options.rel_tol > 0) || options.max_panels < 1) {
    throw InvalidArgument("invalid line-integration options");
  }
  double height = options.truncation_height;
  std::vector<Panel> panels;
  add_range(f, -height, height, panels);

  // Widen until the next ring is negligible; the last ring is kept.
  double ring_contribution = 0.0;
  while (true) {
    std::vector<Panel> ring;
    add_range(f, -2 * height, -height, ring);
    add_range(f, height, 2 * height, ring);
    Complex ring_sum = 0.0;
    for (const Panel& p : ring) ring_sum += p.value;
    const Totals inner = totals(panels);
    panels.insert(panels.end(), ring.begin(), ring.end());
    height *= 2;
    ring_contribution = std::abs(ring_sum);
    if (ring_contribution <= options.rel_tol / 10 * tolerance_scale(inner)) break;
    if (2 * height > options.max_height) {
      throw NoConvergence("integrand not negligible at |y| = " + format_sci(height));
    }
  }

  while (true) {
    Totals t = totals(panels);
    const double target = options.rel_tol * tolerance_scale(t);
    if (t.err + ring_contribution <= target) {
      std::sort(panels.begin(), panels.end(),
                [](const Panel& x, const Panel& y) { return x.a < y.a; });
      t = totals(panels);
      QuadResult r;
      r.value = t.value;
      r.err_estimate = t.err + t.sample_err + ring_contribution;
      r.panels_used = static_cast<int>(panels.size());
      r.truncation_height = height;
      return r;
    }
    if (static_cast<int>(panels.size()) >= options.max_panels) {
      throw NoConvergence("adaptive quadrature exhausted " + std::to_string(options.max_panels) +
                          " panels (error " + format_sci(t.err) + ", target " +
                          format_sci(target) + ")");
    }
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const Panel& x, const Panel& y) { return x.err < y.err; });
    const double a = worst->a, b = worst->b, mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) {
      throw NoConvergence("panel cannot be bisected further near y = " + format_sci(a));
    }
    *worst = evaluate_panel(f, a, mid);
    panels.push_back(evaluate_panel(f, mid, b));
  }
}

}  // namespace chernoff::quad
