#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tma/innovation.hpp"

namespace tma {

/// Two-regime threshold moving-average model:
///
///   y_n = mu1 + e_n + sum_i phi_i e_{n-i}   if y_{n-d} <= r
///   y_n = mu2 + e_n + sum_i psi_i e_{n-i}   if y_{n-d} >  r
///
/// phi/psi share length q (q = 0 is pure regime-switching drift). Threshold
/// comparisons are exact "<=": ties have probability zero for the shipped
/// innovation laws, and epsilon fuzz would break the bit-exact coupling
/// checks.
struct TmaModel {
  double mu1 = 0.0;
  double mu2 = 0.0;
  std::vector<double> phi;
  std::vector<double> psi;
  int d = 1;
  double r = 0.0;
  Innovation innovation = Innovation::standard_normal();

  std::size_t q() const { return phi.size(); }
};

/// Throws std::invalid_argument unless the model invariants hold
/// (phi/psi same length, d >= 1, finite parameters); returns its argument.
const TmaModel& validate(const TmaModel& model);

/// Both regime values on one innovation window: a = upper regime (mu2, psi),
/// b = lower regime (mu1, phi).
struct RegimePair {
  double a = 0.0;
  double b = 0.0;
};

struct IndicatorPair {
  int u = 0;  // 1(a <= r)
  int w = 0;  // 1(b <= r) - 1(a <= r)
};

namespace detail {

// Single accumulation order for both regimes, shared by every caller so the
// recursive and closed-form constructions produce bit-identical values.
// lag(j) must return e_{n-j} for j = 0..q.
template <class Lag>
inline RegimePair regime_pair_impl(const TmaModel& m, Lag&& lag) {
  const double e0 = lag(0);
  RegimePair p{m.mu2 + e0, m.mu1 + e0};
  const std::size_t q = m.q();
  for (std::size_t j = 1; j <= q; ++j) {
    const double ej = lag(j);
    p.a += m.psi[j - 1] * ej;
    p.b += m.phi[j - 1] * ej;
  }
  return p;
}

}  // namespace detail

/// Regime pair from a window laid out newest-first: window[j] = e_{n-j}.
RegimePair regime_pair(const TmaModel& model, std::span<const double> window);

/// Regime pair reading a contiguous ascending innovation array; `e_n` points
/// at the newest value and e_{n-j} sits at e_n[-j].
inline RegimePair regime_pair_at(const TmaModel& model, const double* e_n) {
  return detail::regime_pair_impl(model,
                                  [e_n](std::size_t j) { return e_n[-static_cast<long>(j)]; });
}

inline IndicatorPair indicators(const RegimePair& pair, double r) {
  const int u = pair.a <= r ? 1 : 0;
  return {u, (pair.b <= r ? 1 : 0) - u};
}

/// The unique nonnegative integer m with m*d < max(d, q+1) <= (m+1)*d. It
/// spaces an independent subsequence inside the q-dependent indicator
/// sequence and drives every geometric-decay constant below.
int structural_m(int d, std::size_t q);

struct DeltaEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
  bool exact = false;

  /// Conservative upper confidence value, clamped into [0, 1].
  double upper(double z = 3.0) const;
};

/// Contraction factor delta = E|W_1| = P(exactly one of a_1, b_1 <= r).
/// Exact via the innovation CDF when q = 0; Monte Carlo with binomial
/// standard error otherwise (substream kStreamDelta of `seed`).
DeltaEstimate contraction_delta(const TmaModel& model, std::size_t mc_samples,
                                std::uint64_t seed);

/// FNV-1a digest of the canonical parameter string; identifies a model in
/// path provenance and output metadata.
std::uint64_t model_hash(const TmaModel& model);
std::string model_hash_hex(const TmaModel& model);

}  // namespace tma
