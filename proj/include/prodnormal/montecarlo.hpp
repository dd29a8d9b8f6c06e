#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "detail/philox.hpp"
#include "detail/scaled_float.hpp"
#include "errors.hpp"
#include "params.hpp"

namespace prodnormal::montecarlo {

struct SimulationConfig {
  std::uint64_t n_samples = 10'000'000;
  std::uint64_t seed = 0;
  /// 0 selects the available hardware parallelism.
  unsigned n_chunks = 0;
  /// Probability levels the summary must be able to answer; they size the order-statistic blocks.
  std::vector<double> levels;
  /// Points at which exceedance counts are streamed over every sample.
  std::vector<double> thresholds;
  /// Upper bound on the number of block values held across all chunks.
  std::uint64_t max_block_values = std::uint64_t{1} << 26;
};

struct EmpiricalSummary {
  std::uint64_t n = 0;
  std::vector<double> sorted_top_block;     ///< largest values, descending
  std::vector<double> sorted_bottom_block;  ///< smallest values, ascending
  double mean = 0.0;
  double m2 = 0.0;  ///< sum of squared deviations from the mean
  double sum = 0.0;
  std::vector<double> thresholds;
  std::vector<std::uint64_t> exceed_counts;  ///< samples strictly above each threshold

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  bool operator==(const EmpiricalSummary&) const = default;
};

namespace detail {

inline unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PRODNORMAL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) cap = std::min<unsigned>(cap, static_cast<unsigned>(v));
  }
  return cap;
}

inline double std_normal(double u) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u); }

struct block_sizes {
  std::uint64_t top;
  std::uint64_t bottom;
};

inline block_sizes block_sizes_for(std::uint64_t n, const std::vector<double>& levels) {
  double upper = 0.0, lower = 0.0;
  for (double p : levels) {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("simulation level must lie in (0,1)");
    if (p >= 0.5)
      upper = std::max(upper, 1.0 - p);
    else
      lower = std::max(lower, p);
  }
  const auto size = [n](double frac) {
    const double k = std::ceil(static_cast<double>(n) * frac) + 64.0;
    return std::min<std::uint64_t>(n, static_cast<std::uint64_t>(k));
  };
  return {size(upper), size(lower)};
}

/// Keeps the K most extreme values under `Cmp` using a 2K buffer.
template <class Cmp>
class extreme_block {
 public:
  explicit extreme_block(std::size_t k) : k_(k) { buf_.reserve(2 * k + 1); }

  void push(double v) {
    if (k_ == 0) return;
    if (pruned_ && !Cmp{}(v, cut_)) return;
    buf_.push_back(v);
    if (buf_.size() == 2 * k_) prune();
  }

  std::vector<double> finish() {
    if (buf_.size() > k_) prune();
    std::sort(buf_.begin(), buf_.end(), Cmp{});
    return std::move(buf_);
  }

 private:
  void prune() {
    std::nth_element(buf_.begin(), buf_.begin() + (k_ - 1), buf_.end(), Cmp{});
    buf_.resize(k_);
    cut_ = *std::max_element(buf_.begin(), buf_.end(), Cmp{});
    pruned_ = true;
  }

  std::size_t k_;
  std::vector<double> buf_;
  double cut_ = 0.0;
  bool pruned_ = false;  // cut_ is meaningful only after the first prune
};

template <class Cmp>
std::vector<double> merge_blocks(std::vector<std::vector<double>>& parts, std::size_t k) {
  std::vector<double> all;
  for (auto& b : parts) all.insert(all.end(), b.begin(), b.end());
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + k, all.end(), Cmp{});
  all.resize(k);
  return all;
}

struct chunk_result {
  std::uint64_t n = 0;
  double mean = 0.0, m2 = 0.0, sum = 0.0;
  std::vector<double> top, bottom;
  std::vector<std::uint64_t> counts;
};

template <class Source>
chunk_result run_chunk(Source&& next, std::uint64_t n, const block_sizes& ks,
                       const std::vector<double>& thresholds) {
  chunk_result r;
  r.counts.assign(thresholds.size(), 0);
  extreme_block<std::greater<>> top(std::min(ks.top, n));
  extreme_block<std::less<>> bottom(std::min(ks.bottom, n));
  prodnormal::detail::neumaier_sum<double> total;
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double z = next(i);
    const double d = z - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (z - mean);
    total.add(z);
    top.push(z);
    bottom.push(z);
    for (std::size_t t = 0; t < thresholds.size(); ++t) r.counts[t] += z > thresholds[t];
  }
  r.n = n;
  r.mean = mean;
  r.m2 = m2;
  r.sum = total.value();
  r.top = top.finish();
  r.bottom = bottom.finish();
  return r;
}

inline EmpiricalSummary merge(std::vector<chunk_result>& parts, const block_sizes& ks,
                              const std::vector<double>& thresholds) {
  EmpiricalSummary s;
  s.thresholds = thresholds;
  s.exceed_counts.assign(thresholds.size(), 0);
  prodnormal::detail::neumaier_sum<double> total;
  std::vector<std::vector<double>> tops, bottoms;
  for (auto& c : parts) {
    if (c.n == 0) continue;
    const double na = static_cast<double>(s.n), nb = static_cast<double>(c.n);
    const double delta = c.mean - s.mean;
    s.n += c.n;
    const double nt = static_cast<double>(s.n);
    s.mean += delta * nb / nt;
    s.m2 += c.m2 + delta * delta * na * nb / nt;
    total.add(c.sum);
    for (std::size_t t = 0; t < thresholds.size(); ++t) s.exceed_counts[t] += c.counts[t];
    tops.push_back(std::move(c.top));
    bottoms.push_back(std::move(c.bottom));
  }
  s.sum = total.value();
  s.sorted_top_block = merge_blocks<std::greater<>>(tops, ks.top);
  s.sorted_bottom_block = merge_blocks<std::less<>>(bottoms, ks.bottom);
  return s;
}

inline std::uint64_t rank_k(std::uint64_t n, double p) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("probability level must lie in (0,1)");
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * (1.0 - p))) + 1;
}

}  // namespace detail

/// Z for one pair of independent standard normal deviates.
inline double sample_product(const ProductParams& p, double u, double v) {
  const double r = p.rho();
  const double x = p.mu_x() + p.sigma_x() * u;
  const double y = p.mu_y() + p.sigma_y() * (r * u + std::sqrt((1.0 - r) * (1.0 + r)) * v);
  return x * y;
}

/// Standard normal pair for sample `index` of chunk `chunk` under `seed`.
inline std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t chunk,
                                             std::uint64_t index) {
  const prodnormal::detail::philox4x32 gen(
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const auto out = gen({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                        static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)});
  const std::uint64_t b0 = (std::uint64_t{out[1]} << 32) | out[0];
  const std::uint64_t b1 = (std::uint64_t{out[3]} << 32) | out[2];
  return {detail::std_normal(prodnormal::detail::open_unit(b0)),
          detail::std_normal(prodnormal::detail::open_unit(b1))};
}

inline EmpiricalSummary simulate(const ProductParams& p, const SimulationConfig& cfg) {
  if (cfg.n_samples < 1) throw domain_error("n_samples must be positive");
  const unsigned chunks = cfg.n_chunks ? cfg.n_chunks : std::max(1u, std::thread::hardware_concurrency());
  const auto ks = detail::block_sizes_for(cfg.n_samples, cfg.levels);
  const std::uint64_t per = cfg.n_samples / chunks, extra = cfg.n_samples % chunks;
  const std::uint64_t held = 2 * (std::min(ks.top, per + 1) + std::min(ks.bottom, per + 1)) * chunks;
  if (held > cfg.max_block_values)
    throw resource_error("order-statistic blocks need " + std::to_string(held) +
                         " values, above the memory budget of " + std::to_string(cfg.max_block_values));

  std::vector<detail::chunk_result> parts(chunks);
  std::atomic<unsigned> next_chunk{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (unsigned c; (c = next_chunk++) < chunks;) {
      try {
        const std::uint64_t n = per + (c < extra ? 1 : 0);
        auto draw = [&](std::uint64_t i) {
          const auto [u, v] = normal_pair(cfg.seed, c, i);
          return sample_product(p, u, v);
        };
        parts[c] = detail::run_chunk(draw, n, ks, cfg.thresholds);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::min(chunks, detail::thread_cap());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return detail::merge(parts, ks, cfg.thresholds);
}

/// Summary of an explicit sample set, for feeding other distributions through the same estimators.
inline EmpiricalSummary summarize(std::span<const double> samples, const std::vector<double>& levels,
                                  const std::vector<double>& thresholds = {}) {
  if (samples.empty()) throw domain_error("empty sample set");
  const auto ks = detail::block_sizes_for(samples.size(), levels);
  std::vector<detail::chunk_result> parts;
  parts.push_back(detail::run_chunk([&](std::uint64_t i) { return samples[i]; }, samples.size(), ks,
                                    thresholds));
  return detail::merge(parts, ks, thresholds);
}

/// k-th largest sample with k = floor(N(1-p)) + 1.
inline double empirical_quantile(const EmpiricalSummary& s, double p) {
  const std::uint64_t k = detail::rank_k(s.n, p);
  if (k <= s.sorted_top_block.size()) return s.sorted_top_block[k - 1];
  const std::uint64_t j = s.n - k + 1;  // rank from below
  if (j <= s.sorted_bottom_block.size()) return s.sorted_bottom_block[j - 1];
  throw insufficient_block_error("order-statistic blocks do not reach rank " + std::to_string(k));
}

/// Mean of the k largest samples, same k rule.
inline double empirical_tvar(const EmpiricalSummary& s, double p) {
  const std::uint64_t k = detail::rank_k(s.n, p);
  prodnormal::detail::neumaier_sum<double> acc;
  if (k <= s.sorted_top_block.size()) {
    for (std::uint64_t i = 0; i < k; ++i) acc.add(s.sorted_top_block[i]);
    return acc.value() / static_cast<double>(k);
  }
  const std::uint64_t rest = s.n - k;
  if (rest <= s.sorted_bottom_block.size()) {
    acc.add(s.sum);
    for (std::uint64_t i = 0; i < rest; ++i) acc.add(-s.sorted_bottom_block[i]);
    return acc.value() / static_cast<double>(k);
  }
  throw insufficient_block_error("order-statistic blocks do not reach rank " + std::to_string(k));
}

/// Fraction of samples strictly above x. Uses the streamed count when x was a configured threshold.
inline double empirical_tail_prob(const EmpiricalSummary& s, double x) {
  if (x == std::numeric_limits<double>::infinity()) return 0.0;
  if (x == -std::numeric_limits<double>::infinity()) return 1.0;
  const double n = static_cast<double>(s.n);
  for (std::size_t t = 0; t < s.thresholds.size(); ++t)
    if (s.thresholds[t] == x) return static_cast<double>(s.exceed_counts[t]) / n;
  const auto& top = s.sorted_top_block;
  if (!top.empty() && (x >= top.back() || top.size() == s.n)) {
    const auto n_above = std::lower_bound(top.begin(), top.end(), x, std::greater<>{}) - top.begin();
    return static_cast<double>(n_above) / n;
  }
  const auto& bot = s.sorted_bottom_block;
  if (!bot.empty() && x < bot.back()) {
    const auto n_le = std::upper_bound(bot.begin(), bot.end(), x) - bot.begin();
    return 1.0 - static_cast<double>(n_le) / n;
  }
  throw insufficient_block_error("x is not a streamed threshold and lies outside the stored blocks");
}

/// Streams a fresh simulation that counts exceedances of x.
inline double empirical_tail_prob(const ProductParams& p, SimulationConfig cfg, double x) {
  if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
  cfg.thresholds = {x};
  cfg.levels.clear();
  return empirical_tail_prob(simulate(p, cfg), x);
}

}  // namespace prodnormal::montecarlo
