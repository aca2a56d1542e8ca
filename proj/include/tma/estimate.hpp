#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tma/model.hpp"
#include "tma/stationary.hpp"

namespace tma {

struct DecayFit {
  double rate = 0.0;       // exp(slope) of the log-magnitude regression
  double intercept = 0.0;  // at lag 0
  double r2 = 0.0;
  std::pair<std::size_t, std::size_t> lag_range{0, 0};  // lags actually used
  std::size_t lags_used = 0;
};

struct AcfReport {
  std::vector<std::size_t> lags;  // 0..max_lag
  std::vector<double> rho_hat;
  std::size_t n = 0;
  double band = 0.0;  // +-2/sqrt(n) white-noise band
  std::optional<DecayFit> decay_fit;

  /// Per-lag standard error at the white-noise scale, 1/sqrt(n).
  double se() const { return 1.0 / std::sqrt(static_cast<double>(n)); }
};

/// Biased-denominator sample autocorrelations (divide by n, keeping the
/// sequence nonnegative definite). Requires values.size() >= 4*max_lag.
AcfReport sample_acf(std::span<const double> values, std::size_t max_lag);
AcfReport sample_acf(const SeriesPath& path, std::size_t max_lag);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // central m2 (divide by n)
  double skewness = 0.0;
  double kurtosis = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  double se_skewness = 0.0;
  double se_kurtosis = 0.0;
  std::size_t batches = 0;
};

/// Standard central-moment estimators with batch-means standard errors
/// (ceil(sqrt(n)) batches). Requires length >= 1e4 and a nondegenerate path.
Moments sample_moments(std::span<const double> values);

struct DependenceReport {
  std::vector<std::size_t> lags;
  std::vector<double> dep;  // |P(y_0<=u, y_k<=v) - P(y_0<=u) P(y_k<=v)|
  std::vector<double> se;
  double u = 0.0;
  double v = 0.0;
  std::size_t replicates = 0;
};

/// Estimates the joint-minus-product dependence measure from independent
/// replicate paths: replicate r runs its own substream
/// (kStreamReplicateBase + r) through burn-in B and reads the pair
/// (y_B, y_{B+k}) for every requested lag, so replicates are exactly
/// independent and the standard errors are plain sample-covariance SEs of
/// indicator pairs. B defaults to default_burn_in on a delta estimate.
/// Requires replicates >= 1e5 and nonempty lags.
DependenceReport dependence_decay(const TmaModel& model, double u, double v,
                                  std::span<const std::size_t> lags,
                                  std::size_t replicates, std::uint64_t seed,
                                  std::optional<std::size_t> burn_in = {});

/// Least-squares fit of log|value| on lag over [range.first, range.second].
/// Lags whose magnitude is below 5x their standard error are dropped (the
/// used range is recorded); a zero magnitude in range or fewer than 4 usable
/// lags is an error.
DecayFit fit_decay(std::span<const std::size_t> lags,
                   std::span<const double> values, std::span<const double> ses,
                   std::pair<std::size_t, std::size_t> lag_range);
DecayFit fit_decay(const AcfReport& report,
                   std::pair<std::size_t, std::size_t> lag_range);
DecayFit fit_decay(const DependenceReport& report,
                   std::pair<std::size_t, std::size_t> lag_range);

/// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
double two_sample_ks(std::span<const double> a, std::span<const double> b);

struct BatchStat {
  double value = 0.0;  // statistic on the full sample
  double se = 0.0;     // batch-means standard error
  std::size_t batches = 0;
};

/// Batch-means machinery for an arbitrary per-window statistic: the value is
/// stat(full series), the SE the spread of stat over ceil(sqrt(n)) batches.
template <class F>
BatchStat batch_statistic(std::span<const double> values, F&& stat) {
  const std::size_t n = values.size();
  const std::size_t b = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n))));
  const std::size_t len = n / b;
  BatchStat out;
  out.value = stat(values);
  out.batches = b;
  if (len == 0 || b < 2) return out;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const double s = stat(values.subspan(i * len, len));
    sum += s;
    sum2 += s * s;
  }
  const double mean = sum / static_cast<double>(b);
  const double var = sum2 / static_cast<double>(b) - mean * mean;
  out.se = std::sqrt(std::max(var, 0.0) / static_cast<double>(b));
  return out;
}

}  // namespace tma
