#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tma/model.hpp"

namespace tma {

/// Thrown when a requested computation is numerically unusable (delta
/// estimate too close to 1 for the closed-form tail bound). Maps to CLI
/// exit code 4.
struct NumericRefusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A realized trajectory. Layout invariants:
///   values[i]      = y_{s+i}            (s = burn_in + 1)
///   innovations[k] = e_{s-q+k}          (length values.size() + q; the first
///                                         q entries are pre-sample)
///   pre_values[j]  = y_{s-d+j}          (the d lagged values the first d
///                                         emitted values switch on)
///   alpha[i]       = regime indicator used for values[i] (closed-form runs
///                                         only, empty otherwise)
/// Every emitted value satisfies the model recursion exactly (bitwise)
/// against its own innovation window and lagged value.
struct SeriesPath {
  std::vector<double> values;
  std::vector<double> innovations;
  std::vector<double> pre_values;
  std::vector<std::uint8_t> alpha;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  std::string model_hash;
};

/// One evaluation of the truncated regime-indicator series
///   alpha_{n,K} = sum_{j=1..K} (prod_{s=1..j-1} W_{n-sd}) U_{n-jd}.
/// `terminated` means a zero partial product was reached, so the truncation
/// is exact (further terms vanish identically).
struct AlphaEntry {
  int value = 0;
  std::size_t terms_used = 0;
  bool terminated = false;
};

struct AlphaSeries {
  std::size_t truncation_k = 0;
  std::vector<std::uint32_t> terms_used;
  std::vector<std::uint8_t> alpha;
  double tail_bound = 0.0;  // (m+1) delta^floor((K-1)/(m+1)) / (1 - delta)
};

/// Geometric tail bound on P(alpha_{n,K} != alpha_n).
double alpha_tail_bound(int m, double delta, std::size_t k);

/// Smallest K whose tail bound is below `tail_tol`, capped at 10^4. The
/// series evaluation short-circuits on the first zero partial product, so
/// the cap binds only for delta extremely close to 1.
std::size_t default_truncation(int m, double delta, double tail_tol = 1e-12);

/// Default recursive burn-in: 10 (m+1)/(1 - delta), at least 500 (capped at
/// 10^6 when delta is nearly 1).
std::size_t default_burn_in(int m, double delta);

/// Iterates the model recursion from initial values. `init` is laid out
/// newest-first, init[j] = y_{-j}, and must have length max(d, q) (only the
/// first d entries feed the switch; the length is uniform so the same init
/// shape serves every model). Pass an empty span for the all-zero default.
/// Innovations (including the q pre-sample values) are a pure function of
/// `seed`, shared with simulate_closed_form.
SeriesPath simulate_recursive(const TmaModel& model, std::size_t n,
                              std::size_t burn_in, std::span<const double> init,
                              std::uint64_t seed);

/// K-term partial sum of the indicator series at one index.
/// innovations[index_of_n] = e_n; requires index_of_n >= K*d + q. The value
/// is always exactly 0 or 1; empty products count as 1.
AlphaEntry alpha_series_entry(const TmaModel& model,
                              std::span<const double> innovations,
                              std::size_t index_of_n, std::size_t K);

struct ClosedFormOptions {
  std::optional<std::size_t> truncation;  // default: default_truncation rule
  double tail_tolerance = 1e-12;
  std::size_t delta_samples = 1'000'000;
  std::optional<DeltaEstimate> delta;     // reuse a previous estimate
};

struct ClosedFormResult {
  SeriesPath path;
  AlphaSeries alpha;
  DeltaEstimate delta;
  std::size_t truncation_k = 0;
};

/// Builds the stationary path directly from the innovation stream: the
/// indicator series is evaluated by full truncated scans at the d root
/// indices below the sample window and extended by the exact one-step
/// recursion alpha_v = U_v + W_v alpha_{v-d}. The emitted path therefore
/// satisfies the model recursion exactly at every index, and with the same
/// seed it shares e_n with simulate_recursive. Throws NumericRefusal when
/// the delta estimate is >= 1 - 1e-9.
ClosedFormResult simulate_closed_form(const TmaModel& model, std::size_t n,
                                      std::uint64_t seed,
                                      const ClosedFormOptions& options = {});

struct CouplingPair {
  std::size_t first_init = 0;
  std::size_t second_init = 0;
  /// First index after which the two paths are bit-identical forever within
  /// the horizon (0 = identical throughout); empty if they still differ at
  /// the final index.
  std::optional<std::size_t> time;
};

struct CouplingReport {
  std::size_t horizon = 0;
  std::vector<CouplingPair> pairs;
  bool all_coupled() const;
  std::size_t max_time() const;
};

/// Runs the recursion from each initial vector under one shared innovation
/// stream and reports pairwise coupling times.
CouplingReport coupling_check(const TmaModel& model, std::size_t n,
                              const std::vector<std::vector<double>>& inits,
                              std::uint64_t seed);

/// Coupling time of two equal-length value sequences (see CouplingPair).
std::optional<std::size_t> coupling_time(std::span<const double> x,
                                         std::span<const double> y);

/// Index of the first emitted value that fails the bitwise recursion check,
/// or nullopt when the whole path is exact.
std::optional<std::size_t> first_exactness_violation(const TmaModel& model,
                                                     const SeriesPath& path);

struct TruncationCheck {
  double p_hat = 0.0;
  double se = 0.0;
  std::size_t trials = 0;
  std::size_t mismatches = 0;
};

/// Monte Carlo estimate of P(alpha_{n,K} != alpha_{n,K+extra}) under the
/// stationary innovation law. Each trial uses its own replicate substream
/// and draws innovation history lazily, only as deep as the series scan
/// actually reaches before a zero partial product.
TruncationCheck alpha_truncation_check(const TmaModel& model, std::size_t K,
                                       std::size_t extra, std::size_t trials,
                                       std::uint64_t seed);

}  // namespace tma
