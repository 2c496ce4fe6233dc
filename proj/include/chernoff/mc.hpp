#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace chernoff::mc {

/// Philox4x32-10 counter-based generator (Salmon et al.): a keyed bijection
/// on 128-bit counters, so any draw is addressable without stepping.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key);
};

struct SimConfig {
  double gamma = 0.70710678118654752440;
  double horizon = 4.0;  // grid covers [-horizon, horizon]
  double step = 1e-3;
  long num_paths = 1;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks hardware concurrency. Results do not depend on it.
  int threads = 0;

  void validate() const;
  /// Grid points on each side of 0.
  long half_steps() const;
};

struct SampleRecord {
  double v = 0.0;
  double m = 0.0;
  double w_at_argmax = 0.0;  // == m + gamma v^2, computed that way
};

/// Per-path argmax and max on the grid of spacing h, together with the same
/// paths restricted to every second grid point (spacing 2h).
struct SampleSet {
  SimConfig config;
  std::vector<SampleRecord> records;
  std::vector<SampleRecord> coarse_records;
};

/// Two-sided random walk W with N(0, h) increments and W(0) = 0, minus
/// gamma t^2; records the grid argmax (ties go to the smaller |t|, then to
/// t > 0) and the max. Path p only reads normals addressed by (seed, p).
SampleSet simulate(const SimConfig& cfg);

struct VMoment {
  int n;
};
struct MMean {};
struct WAtArgmaxMean {};
struct CosV {
  double t;
};
using Statistic = std::variant<VMoment, MMean, WAtArgmaxMean, CosV>;

/// Parses "v_moment(n)", "m_mean", "w_at_argmax_mean" or "cos_v(t)".
/// Throws UnknownStatistic otherwise.
Statistic parse_statistic(const std::string& text);
std::string statistic_name(const Statistic& s);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

Estimate estimate(const std::vector<SampleRecord>& records, const Statistic& statistic);
Estimate estimate(const SampleSet& samples, const Statistic& statistic);

/// E[numerator] / E[denominator] with a delta-method standard error.
Estimate estimate_ratio(const std::vector<SampleRecord>& records, const Statistic& numerator,
                        const Statistic& denominator);

/// Grid bias estimate from the coupled h / 2h samples, assuming the bias
/// behaves like c sqrt(h) (the rate of the discrete maximum of a random
/// walk; a faster rate only makes the allowance more conservative).
struct Calibrated {
  Estimate fine;
  Estimate coarse;
  double bias = 0.0;       // estimated (fine - continuum)
  double allowance = 0.0;  // |bias| + 3 paired standard errors, scaled alike
};

Calibrated calibrate(const SampleSet& samples, const Statistic& statistic);
Calibrated calibrate_ratio(const SampleSet& samples, const Statistic& numerator,
                           const Statistic& denominator);

/// Fraction of paths whose |v| exceeds horizon - margin.
double horizon_exceedance(const SampleSet& samples, double margin = 0.5);

/// CSV with header "v,m,w_at_argmax".
void write_csv(const SampleSet& samples, const std::filesystem::path& path);
std::string to_csv(const SampleSet& samples);
nlohmann::json sidecar_json(const SampleSet& samples);

}  // namespace chernoff::mc
