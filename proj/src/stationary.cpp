#include "tma/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tma {

double alpha_tail_bound(int m, double delta, std::size_t k) {
  if (k == 0) throw std::invalid_argument("alpha_tail_bound: K must be >= 1");
  if (delta >= 1.0) return std::numeric_limits<double>::infinity();
  if (delta < 0.0) throw std::invalid_argument("alpha_tail_bound: delta < 0");
  const double expo = static_cast<double>((k - 1) / static_cast<std::size_t>(m + 1));
  return (m + 1.0) * std::pow(delta, expo) / (1.0 - delta);
}

std::size_t default_truncation(int m, double delta, double tail_tol) {
  if (!(tail_tol > 0.0)) throw std::invalid_argument("default_truncation: tolerance <= 0");
  constexpr std::size_t kCap = 10'000;
  if (delta >= 1.0) return kCap;
  if (delta <= 0.0) return std::min<std::size_t>(kCap, static_cast<std::size_t>(m) + 2);
  const double target = tail_tol * (1.0 - delta) / (m + 1.0);
  std::size_t k = 1;
  if (target < 1.0) {
    const double t0 = std::ceil(std::log(target) / std::log(delta));
    const double kd = t0 * (m + 1.0) + 1.0;
    k = kd >= static_cast<double>(kCap) ? kCap : static_cast<std::size_t>(kd);
  }
  while (k > 1 && alpha_tail_bound(m, delta, k - 1) < tail_tol) --k;
  while (k < kCap && alpha_tail_bound(m, delta, k) >= tail_tol) ++k;
  return k;
}

std::size_t default_burn_in(int m, double delta) {
  constexpr std::size_t kFloor = 500;
  constexpr std::size_t kCap = 1'000'000;
  if (delta >= 1.0) return kCap;
  const double steps = std::ceil(10.0 * (m + 1.0) / (1.0 - delta));
  if (steps >= static_cast<double>(kCap)) return kCap;
  return std::max<std::size_t>(kFloor, static_cast<std::size_t>(steps));
}

SeriesPath simulate_recursive(const TmaModel& model, std::size_t n,
                              std::size_t burn_in, std::span<const double> init,
                              std::uint64_t seed) {
  validate(model);
  if (n == 0) throw std::invalid_argument("simulate_recursive: n must be >= 1");
  const std::size_t q = model.q();
  const int d = model.d;
  const std::size_t init_len = std::max<std::size_t>(d, q);
  std::vector<double> init_v(init.begin(), init.end());
  if (init_v.empty()) init_v.assign(init_len, 0.0);
  if (init_v.size() != init_len) {
    throw std::invalid_argument("simulate_recursive: init must have length max(d, q)");
  }
  const long total = static_cast<long>(burn_in + n);
  const InnovationBlock e(model.innovation, 1 - static_cast<long>(q), total, seed);

  std::vector<double> y(static_cast<std::size_t>(total));  // y[i-1] = y_i
  for (long i = 1; i <= total; ++i) {
    const RegimePair rp = regime_pair_at(model, e.ptr(i));
    const double lag = (i > d) ? y[static_cast<std::size_t>(i - d - 1)]
                               : init_v[static_cast<std::size_t>(d - i)];
    y[static_cast<std::size_t>(i - 1)] = (lag <= model.r) ? rp.b : rp.a;
  }

  const long s = static_cast<long>(burn_in) + 1;
  SeriesPath path;
  path.values.assign(y.begin() + (s - 1), y.end());
  path.innovations.resize(n + q);
  for (std::size_t k = 0; k < path.innovations.size(); ++k) {
    path.innovations[k] = e[s - static_cast<long>(q) + static_cast<long>(k)];
  }
  path.pre_values.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const long idx = s - d + j;
    path.pre_values[static_cast<std::size_t>(j)] =
        (idx >= 1) ? y[static_cast<std::size_t>(idx - 1)]
                   : init_v[static_cast<std::size_t>(-idx)];
  }
  path.burn_in = burn_in;
  path.seed = seed;
  path.model_hash = model_hash_hex(model);
  return path;
}

AlphaEntry alpha_series_entry(const TmaModel& model,
                              std::span<const double> innovations,
                              std::size_t index_of_n, std::size_t K) {
  validate(model);
  if (K == 0) throw std::invalid_argument("alpha_series_entry: K must be >= 1");
  if (index_of_n >= innovations.size()) {
    throw std::invalid_argument("alpha_series_entry: index outside innovation span");
  }
  const std::size_t need = K * static_cast<std::size_t>(model.d) + model.q();
  if (index_of_n < need) {
    throw std::invalid_argument("alpha_series_entry: insufficient innovation history");
  }
  int sum = 0;
  int prod = 1;  // empty product convention
  std::size_t terms = 0;
  for (std::size_t j = 1; j <= K; ++j) {
    const double* en = innovations.data() + (index_of_n - j * model.d);
    const IndicatorPair ind = indicators(regime_pair_at(model, en), model.r);
    sum += prod * ind.u;
    prod *= ind.w;
    terms = j;
    if (prod == 0) break;
  }
  return {sum, terms, prod == 0};
}

ClosedFormResult simulate_closed_form(const TmaModel& model, std::size_t n,
                                      std::uint64_t seed,
                                      const ClosedFormOptions& options) {
  validate(model);
  if (n == 0) throw std::invalid_argument("simulate_closed_form: n must be >= 1");
  const DeltaEstimate delta =
      options.delta ? *options.delta
                    : contraction_delta(model, options.delta_samples, seed);
  if (delta.value >= 1.0 - 1e-9) {
    throw NumericRefusal("simulate_closed_form: delta estimate " +
                         std::to_string(delta.value) +
                         " leaves the truncation tail bound unusable");
  }
  const int m = structural_m(model.d, model.q());
  const std::size_t K =
      options.truncation
          ? *options.truncation
          : default_truncation(m, delta.value, options.tail_tolerance);
  const int d = model.d;
  const std::size_t q = model.q();

  // Indicators are needed on [1-(K+2)d, n]: the d root indices sit at
  // [1-2d, -d] and their truncated scans reach K*d further down.
  const long lo = 1 - static_cast<long>(K + 2) * d;
  const InnovationBlock e(model.innovation, lo - static_cast<long>(q),
                          static_cast<long>(n), seed);
  const std::size_t span_len = static_cast<std::size_t>(static_cast<long>(n) - lo + 1);
  std::vector<double> va(span_len);
  std::vector<double> vb(span_len);
  std::vector<std::int8_t> vu(span_len);
  std::vector<std::int8_t> vw(span_len);
  auto at = [lo](long t) { return static_cast<std::size_t>(t - lo); };
  for (long t = lo; t <= static_cast<long>(n); ++t) {
    const RegimePair rp = regime_pair_at(model, e.ptr(t));
    const IndicatorPair ind = indicators(rp, model.r);
    va[at(t)] = rp.a;
    vb[at(t)] = rp.b;
    vu[at(t)] = static_cast<std::int8_t>(ind.u);
    vw[at(t)] = static_cast<std::int8_t>(ind.w);
  }

  // alpha_v on [1-2d, n-d]: truncated scans at the roots, then the exact
  // one-step recursion. U + W*alpha stays in {0,1} identically, so the whole
  // field is a bona fide indicator solution for the given innovations.
  const long alpha_lo = 1 - 2 * static_cast<long>(d);
  std::vector<std::int8_t> alpha(
      static_cast<std::size_t>(static_cast<long>(n) - d - alpha_lo + 1));
  std::vector<std::uint32_t> depth(alpha.size());
  auto aat = [alpha_lo](long v) { return static_cast<std::size_t>(v - alpha_lo); };
  for (long v = alpha_lo; v <= static_cast<long>(n) - d; ++v) {
    if (v < alpha_lo + d) {
      int sum = 0;
      int prod = 1;
      std::size_t terms = 0;
      for (std::size_t j = 1; j <= K; ++j) {
        const std::size_t k = at(v - static_cast<long>(j) * d);
        sum += prod * vu[k];
        prod *= vw[k];
        terms = j;
        if (prod == 0) break;
      }
      alpha[aat(v)] = static_cast<std::int8_t>(sum);
      depth[aat(v)] = static_cast<std::uint32_t>(terms);
    } else {
      const std::size_t k = at(v);
      const std::size_t prev = aat(v - d);
      alpha[aat(v)] = static_cast<std::int8_t>(vu[k] + vw[k] * alpha[prev]);
      depth[aat(v)] =
          vw[k] == 0 ? 1u
                     : static_cast<std::uint32_t>(std::min<std::uint64_t>(
                           static_cast<std::uint64_t>(depth[prev]) + 1, K));
    }
  }

  ClosedFormResult result;
  result.delta = delta;
  result.truncation_k = K;
  result.alpha.truncation_k = K;
  result.alpha.tail_bound = alpha_tail_bound(m, delta.value, K);
  result.alpha.alpha.resize(n);
  result.alpha.terms_used.resize(n);

  SeriesPath& path = result.path;
  path.values.resize(n);
  path.alpha.resize(n);
  path.innovations.resize(n + q);
  path.pre_values.resize(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < path.innovations.size(); ++k) {
    path.innovations[k] = e[1 - static_cast<long>(q) + static_cast<long>(k)];
  }
  for (long i = 1 - d; i <= 0; ++i) {
    const std::int8_t av = alpha[aat(i - d)];
    path.pre_values[static_cast<std::size_t>(i - (1 - d))] =
        av == 1 ? vb[at(i)] : va[at(i)];
  }
  for (long i = 1; i <= static_cast<long>(n); ++i) {
    const std::int8_t av = alpha[aat(i - d)];
    const std::size_t out = static_cast<std::size_t>(i - 1);
    path.values[out] = av == 1 ? vb[at(i)] : va[at(i)];
    path.alpha[out] = static_cast<std::uint8_t>(av);
    result.alpha.alpha[out] = static_cast<std::uint8_t>(av);
    result.alpha.terms_used[out] = depth[aat(i - d)];
  }
  path.burn_in = 0;
  path.seed = seed;
  path.model_hash = model_hash_hex(model);
  return result;
}

std::optional<std::size_t> coupling_time(std::span<const double> x,
                                         std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("coupling_time: length mismatch");
  }
  std::size_t last_diff = 0;  // 1-based; 0 = identical throughout
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] != y[i]) {
      last_diff = i + 1;
      break;
    }
  }
  if (last_diff == x.size() && !x.empty()) return std::nullopt;
  return last_diff;
}

bool CouplingReport::all_coupled() const {
  return std::all_of(pairs.begin(), pairs.end(),
                     [](const CouplingPair& p) { return p.time.has_value(); });
}

std::size_t CouplingReport::max_time() const {
  std::size_t worst = 0;
  for (const auto& p : pairs) {
    if (p.time) worst = std::max(worst, *p.time);
  }
  return worst;
}

CouplingReport coupling_check(const TmaModel& model, std::size_t n,
                              const std::vector<std::vector<double>>& inits,
                              std::uint64_t seed) {
  if (inits.size() < 2) {
    throw std::invalid_argument("coupling_check: need at least 2 initial vectors");
  }
  std::vector<SeriesPath> paths;
  paths.reserve(inits.size());
  for (const auto& init : inits) {
    paths.push_back(simulate_recursive(model, n, 0, init, seed));
  }
  CouplingReport report;
  report.horizon = n;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      report.pairs.push_back(
          {i, j, coupling_time(paths[i].values, paths[j].values)});
    }
  }
  return report;
}

TruncationCheck alpha_truncation_check(const TmaModel& model, std::size_t K,
                                       std::size_t extra, std::size_t trials,
                                       std::uint64_t seed) {
  validate(model);
  if (K == 0 || trials == 0) {
    throw std::invalid_argument("alpha_truncation_check: K and trials must be >= 1");
  }
  const int d = model.d;
  std::size_t mismatches = 0;
  std::vector<double> hist;  // hist[k] = e_{-k}, grown on demand
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = substream_rng(seed, kStreamReplicateBase + t);
    hist.clear();
    auto e_at = [&](long i) {
      const std::size_t k = static_cast<std::size_t>(-i);
      while (hist.size() <= k) hist.push_back(model.innovation.draw(rng));
      return hist[k];
    };
    int sum = 0;
    int prod = 1;
    int val_k = 0;
    bool have_k = false;
    for (std::size_t j = 1; j <= K + extra; ++j) {
      const long base = -static_cast<long>(j) * d;
      const RegimePair rp = detail::regime_pair_impl(
          model, [&](std::size_t jj) { return e_at(base - static_cast<long>(jj)); });
      const IndicatorPair ind = indicators(rp, model.r);
      sum += prod * ind.u;
      prod *= ind.w;
      if (j == K) {
        val_k = sum;
        have_k = true;
      }
      if (prod == 0) break;
    }
    if (!have_k) val_k = sum;  // zero product before K: deeper terms vanish
    mismatches += static_cast<std::size_t>(val_k != sum);
  }
  const double p = static_cast<double>(mismatches) / static_cast<double>(trials);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return {p, se, trials, mismatches};
}

std::optional<std::size_t> first_exactness_violation(const TmaModel& model,
                                                     const SeriesPath& path) {
  validate(model);
  const std::size_t q = model.q();
  const std::size_t d = static_cast<std::size_t>(model.d);
  if (path.innovations.size() != path.values.size() + q ||
      path.pre_values.size() != d) {
    throw std::invalid_argument("first_exactness_violation: malformed path layout");
  }
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const RegimePair rp = regime_pair_at(model, path.innovations.data() + i + q);
    const double lag = i >= d ? path.values[i - d] : path.pre_values[i];
    const double expect = (lag <= model.r) ? rp.b : rp.a;
    if (expect != path.values[i]) return i;
  }
  return std::nullopt;
}

}  // namespace tma
