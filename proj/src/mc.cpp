#include "chernoff/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>
#include <thread>

#include "chernoff/errors.hpp"

namespace chernoff::mc {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

// Normals for one path: block b of the counter yields normals 2b and 2b+1.
class PathNormals {
 public:
  PathNormals(std::uint64_t seed, std::uint64_t path)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path)),
        path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const Philox4x32::Counter out = Philox4x32::apply(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
         path_lo_, path_hi_},
        key_);
    ++block_;
    const double u1 = to_unit(out[0], out[1]);
    const double u2 = to_unit(out[2], out[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  // Uniform on (0, 1), never 0.
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t path_lo_, path_hi_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct Best {
  double value = 0.0;
  double t = 0.0;
};

struct PathResult {
  SampleRecord fine;
  SampleRecord coarse;
};

SampleRecord make_record(const Best& best, double gamma) {
  SampleRecord r;
  r.v = best.t;
  r.m = best.value;
  r.w_at_argmax = r.m + gamma * r.v * r.v;
  return r;
}

PathResult simulate_path(const SimConfig& cfg, long n_side, std::uint64_t path) {
  PathNormals normals(cfg.seed, path);
  const double sd = std::sqrt(cfg.step);
  Best fine, coarse;  // t = 0, value 0
  // Right half first, then left; strict '>' keeps the smaller |t| (and t > 0
  // on exact mirror ties, since the left side is scanned second).
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    double w = 0.0;
    for (long i = 1; i <= n_side; ++i) {
      w += sd * normals.next();
      const double t = static_cast<double>(i) * cfg.step;
      const double value = w - cfg.gamma * t * t;
      if (value > fine.value || (value == fine.value && t < std::abs(fine.t))) {
        fine = {value, sign * t};
      }
      if (i % 2 == 0 &&
          (value > coarse.value || (value == coarse.value && t < std::abs(coarse.t)))) {
        coarse = {value, sign * t};
      }
    }
  }
  return {make_record(fine, cfg.gamma), make_record(coarse, cfg.gamma)};
}

double statistic_value(const SampleRecord& r, const Statistic& s) {
  return std::visit(
      [&](const auto& stat) -> double {
        using T = std::decay_t<decltype(stat)>;
        if constexpr (std::is_same_v<T, VMoment>) {
          return std::pow(r.v, stat.n);
        } else if constexpr (std::is_same_v<T, MMean>) {
          return r.m;
        } else if constexpr (std::is_same_v<T, WAtArgmaxMean>) {
          return r.w_at_argmax;
        } else {
          return std::cos(stat.t * r.v);
        }
      },
      s);
}

struct Moments2 {
  double mean_x = 0.0, mean_y = 0.0, var_x = 0.0, var_y = 0.0, cov = 0.0;
};

Moments2 paired_moments(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  Moments2 m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x, dy = y[i] - m.mean_y;
    m.var_x += dx * dx;
    m.var_y += dy * dy;
    m.cov += dx * dy;
  }
  m.var_x /= n - 1;
  m.var_y /= n - 1;
  m.cov /= n - 1;
  return m;
}

void require_samples(std::size_t n) {
  if (n < 2) throw InvalidArgument("estimates need at least two samples");
}

std::vector<double> column(const std::vector<SampleRecord>& records, const Statistic& s) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(statistic_value(r, s));
  return out;
}

Estimate mean_and_error(const std::vector<double>& x) {
  require_samples(x.size());
  const Moments2 m = paired_moments(x, x);
  return {m.mean_x, std::sqrt(m.var_x / static_cast<double>(x.size()))};
}

// sqrt(2h) - sqrt(h) in units of sqrt(h)
const double kRateFactor = std::numbers::sqrt2 - 1.0;

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void SimConfig::validate() const {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
  if (!(horizon > 0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be positive");
  if (!(step > 0) || step > horizon) throw InvalidArgument("step must lie in (0, horizon]");
  if (num_paths < 1) throw InvalidArgument("num_paths must be at least 1");
  if (threads < 0) throw InvalidArgument("threads must be nonnegative");
}

long SimConfig::half_steps() const {
  return static_cast<long>(std::floor(horizon / step + 1e-9));
}

SampleSet simulate(const SimConfig& cfg) {
  cfg.validate();
  const long n_side = cfg.half_steps();
  SampleSet out;
  out.config = cfg;
  out.records.resize(cfg.num_paths);
  out.coarse_records.resize(cfg.num_paths);

  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, cfg.num_paths));

  auto run = [&](long begin, long end) {
    for (long p = begin; p < end; ++p) {
      const PathResult r = simulate_path(cfg, n_side, static_cast<std::uint64_t>(p));
      out.records[p] = r.fine;
      out.coarse_records[p] = r.coarse;
    }
  };
  if (workers <= 1) {
    run(0, cfg.num_paths);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const long chunk = (cfg.num_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const long begin = static_cast<long>(w) * chunk;
      const long end = std::min(cfg.num_paths, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
  }
  return out;
}

Statistic parse_statistic(const std::string& text) {
  static const std::regex v_moment(R"(v_moment\((\d+)\))");
  static const std::regex cos_v(R"(cos_v\(([-+0-9.eE]+)\))");
  std::smatch match;
  if (std::regex_match(text, match, v_moment)) return VMoment{std::stoi(match[1])};
  if (std::regex_match(text, match, cos_v)) {
    try {
      return CosV{std::stod(match[1])};
    } catch (const std::exception&) {
      throw UnknownStatistic("malformed statistic: " + text);
    }
  }
  if (text == "m_mean") return MMean{};
  if (text == "w_at_argmax_mean") return WAtArgmaxMean{};
  throw UnknownStatistic("unknown statistic: " + text);
}

std::string statistic_name(const Statistic& s) {
  return std::visit(
      [](const auto& stat) -> std::string {
        using T = std::decay_t<decltype(stat)>;
        if constexpr (std::is_same_v<T, VMoment>) {
          return "v_moment(" + std::to_string(stat.n) + ")";
        } else if constexpr (std::is_same_v<T, MMean>) {
          return "m_mean";
        } else if constexpr (std::is_same_v<T, WAtArgmaxMean>) {
          return "w_at_argmax_mean";
        } else {
          char buf[48];
          std::snprintf(buf, sizeof buf, "cos_v(%g)", stat.t);
          return buf;
        }
      },
      s);
}

Estimate estimate(const std::vector<SampleRecord>& records, const Statistic& statistic) {
  return mean_and_error(column(records, statistic));
}

Estimate estimate(const SampleSet& samples, const Statistic& statistic) {
  return estimate(samples.records, statistic);
}

Estimate estimate_ratio(const std::vector<SampleRecord>& records, const Statistic& numerator,
                        const Statistic& denominator) {
  require_samples(records.size());
  const Moments2 m = paired_moments(column(records, numerator), column(records, denominator));
  const double ratio = m.mean_x / m.mean_y;
  const double var = (m.var_x - 2 * ratio * m.cov + ratio * ratio * m.var_y) /
                     (m.mean_y * m.mean_y * static_cast<double>(records.size()));
  return {ratio, std::sqrt(std::max(var, 0.0))};
}

Calibrated calibrate(const SampleSet& samples, const Statistic& statistic) {
  const std::vector<double> fine = column(samples.records, statistic);
  const std::vector<double> coarse = column(samples.coarse_records, statistic);
  std::vector<double> diff(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) diff[i] = fine[i] - coarse[i];
  Calibrated c;
  c.fine = mean_and_error(fine);
  c.coarse = mean_and_error(coarse);
  const Estimate d = mean_and_error(diff);
  // fine - coarse = c sqrt(h) (1 - sqrt 2)
  c.bias = -d.value / kRateFactor;
  c.allowance = (std::abs(d.value) + 3 * d.std_error) / kRateFactor;
  return c;
}

Calibrated calibrate_ratio(const SampleSet& samples, const Statistic& numerator,
                           const Statistic& denominator) {
  Calibrated c;
  c.fine = estimate_ratio(samples.records, numerator, denominator);
  c.coarse = estimate_ratio(samples.coarse_records, numerator, denominator);
  // Linearized per-path change of the ratio between the two grids.
  const std::vector<double> num_f = column(samples.records, numerator);
  const std::vector<double> den_f = column(samples.records, denominator);
  const std::vector<double> num_c = column(samples.coarse_records, numerator);
  const std::vector<double> den_c = column(samples.coarse_records, denominator);
  double mean_den = 0.0;
  for (double x : den_f) mean_den += x;
  mean_den /= static_cast<double>(den_f.size());
  std::vector<double> q(num_f.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = ((num_f[i] - num_c[i]) - c.fine.value * (den_f[i] - den_c[i])) / mean_den;
  }
  const Estimate dq = mean_and_error(q);
  const double delta = c.fine.value - c.coarse.value;
  c.bias = -delta / kRateFactor;
  c.allowance = (std::abs(delta) + 3 * dq.std_error) / kRateFactor;
  return c;
}

double horizon_exceedance(const SampleSet& samples, double margin) {
  if (samples.records.empty()) return 0.0;
  const double limit = samples.config.horizon - margin;
  const auto count = std::count_if(samples.records.begin(), samples.records.end(),
                                   [&](const SampleRecord& r) { return std::abs(r.v) > limit; });
  return static_cast<double>(count) / static_cast<double>(samples.records.size());
}

std::string to_csv(const SampleSet& samples) {
  std::ostringstream out;
  out << "v,m,w_at_argmax\n";
  char line[128];
  for (const auto& r : samples.records) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", r.v, r.m, r.w_at_argmax);
    out << line;
  }
  return out.str();
}

void write_csv(const SampleSet& samples, const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) throw Error("cannot open " + path.string() + " for writing");
  file << to_csv(samples);
  if (!file) throw Error("failed writing " + path.string());
}

nlohmann::json sidecar_json(const SampleSet& samples) {
  const SimConfig& c = samples.config;
  return {{"gamma", c.gamma},
          {"horizon", c.horizon},
          {"step", c.step},
          {"num_paths", c.num_paths},
          {"seed", c.seed},
          {"generator", "philox4x32-10/box-muller"},
          {"grid_points_per_side", c.half_steps()},
          {"columns", {"v", "m", "w_at_argmax"}}};
}

}  // namespace chernoff::mc
