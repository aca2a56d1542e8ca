#include "tma/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tma {

AcfReport sample_acf(std::span<const double> values, std::size_t max_lag) {
  const std::size_t n = values.size();
  if (max_lag == 0) throw std::invalid_argument("sample_acf: max_lag must be >= 1");
  if (n < 4 * max_lag) {
    throw std::invalid_argument("sample_acf: path too short (need n >= 4*max_lag)");
  }
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double y : values) c0 += (y - mean) * (y - mean);
  if (c0 == 0.0) throw std::invalid_argument("sample_acf: degenerate path");
  AcfReport report;
  report.n = n;
  report.band = 2.0 / std::sqrt(static_cast<double>(n));
  report.lags.resize(max_lag + 1);
  report.rho_hat.resize(max_lag + 1);
  report.lags[0] = 0;
  report.rho_hat[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) {
      ck += (values[t] - mean) * (values[t + k] - mean);
    }
    report.lags[k] = k;
    report.rho_hat[k] = ck / c0;
  }
  return report;
}

AcfReport sample_acf(const SeriesPath& path, std::size_t max_lag) {
  return sample_acf(std::span<const double>(path.values), max_lag);
}

namespace {

struct CentralMoments {
  double mean, m2, m3, m4;
};

CentralMoments central_moments(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double c = x - mean;
    const double c2 = c * c;
    m2 += c2;
    m3 += c2 * c;
    m4 += c2 * c2;
  }
  return {mean, m2 / n, m3 / n, m4 / n};
}

}  // namespace

Moments sample_moments(std::span<const double> values) {
  if (values.size() < 10'000) {
    throw std::invalid_argument("sample_moments: path length must be >= 1e4");
  }
  const CentralMoments full = central_moments(values);
  if (full.m2 == 0.0) {
    throw std::invalid_argument("sample_moments: degenerate (zero-variance) path");
  }
  Moments out;
  out.mean = full.mean;
  out.variance = full.m2;
  out.skewness = full.m3 / std::pow(full.m2, 1.5);
  out.kurtosis = full.m4 / (full.m2 * full.m2);

  const auto mean_stat = [](std::span<const double> v) {
    return central_moments(v).mean;
  };
  const auto var_stat = [](std::span<const double> v) {
    return central_moments(v).m2;
  };
  const auto skew_stat = [](std::span<const double> v) {
    const auto m = central_moments(v);
    return m.m2 > 0.0 ? m.m3 / std::pow(m.m2, 1.5) : 0.0;
  };
  const auto kurt_stat = [](std::span<const double> v) {
    const auto m = central_moments(v);
    return m.m2 > 0.0 ? m.m4 / (m.m2 * m.m2) : 0.0;
  };
  out.se_mean = batch_statistic(values, mean_stat).se;
  out.se_variance = batch_statistic(values, var_stat).se;
  out.se_skewness = batch_statistic(values, skew_stat).se;
  const auto kb = batch_statistic(values, kurt_stat);
  out.se_kurtosis = kb.se;
  out.batches = kb.batches;
  return out;
}

DependenceReport dependence_decay(const TmaModel& model, double u, double v,
                                  std::span<const std::size_t> lags,
                                  std::size_t replicates, std::uint64_t seed,
                                  std::optional<std::size_t> burn_in) {
  validate(model);
  if (lags.empty()) throw std::invalid_argument("dependence_decay: no lags given");
  if (replicates < 100'000) {
    throw std::invalid_argument("dependence_decay: replicates must be >= 1e5");
  }
  for (std::size_t k : lags) {
    if (k == 0) throw std::invalid_argument("dependence_decay: lags must be >= 1");
  }
  const std::size_t max_lag = *std::max_element(lags.begin(), lags.end());
  std::size_t burn = 0;
  if (burn_in) {
    burn = std::max<std::size_t>(1, *burn_in);  // the pair anchor is y_burn
  } else {
    const int m = structural_m(model.d, model.q());
    burn = default_burn_in(m, contraction_delta(model, 100'000, seed).value);
  }

  const std::size_t q = model.q();
  const int d = model.d;
  const std::size_t total = burn + max_lag;
  std::vector<double> window(q + 1);                        // window[j] = e_{t-j}
  std::vector<double> ylag(static_cast<std::size_t>(d), 0.0);  // ylag[j] = y_{t-1-j}
  std::vector<double> tail(max_lag + 1);                    // y_burn .. y_{burn+max}

  // Joint indicator counts per lag; n1 counts 1(y_B <= u), n2/n11 per lag.
  std::size_t n1 = 0;
  std::vector<std::size_t> n2(lags.size(), 0);
  std::vector<std::size_t> n11(lags.size(), 0);

  for (std::size_t rep = 0; rep < replicates; ++rep) {
    auto rng = substream_rng(seed, kStreamReplicateBase + rep);
    for (std::size_t j = 0; j < q; ++j) window[j + 1] = model.innovation.draw(rng);
    std::fill(ylag.begin(), ylag.end(), 0.0);
    for (std::size_t t = 1; t <= total; ++t) {
      // Slide the innovation window one step and draw e_t.
      for (std::size_t j = q; j >= 1; --j) window[j] = window[j - 1];
      window[0] = model.innovation.draw(rng);
      const RegimePair rp = detail::regime_pair_impl(
          model, [&](std::size_t j) { return window[j]; });
      const double lag_y = ylag[static_cast<std::size_t>(d - 1)];
      const double y = (lag_y <= model.r) ? rp.b : rp.a;
      for (std::size_t j = static_cast<std::size_t>(d) - 1; j >= 1; --j) {
        ylag[j] = ylag[j - 1];
      }
      ylag[0] = y;
      if (t >= burn) tail[t - burn] = y;
    }
    const bool x = tail[0] <= u;
    n1 += static_cast<std::size_t>(x);
    for (std::size_t li = 0; li < lags.size(); ++li) {
      const bool yk = tail[lags[li]] <= v;
      n2[li] += static_cast<std::size_t>(yk);
      n11[li] += static_cast<std::size_t>(x && yk);
    }
  }

  DependenceReport report;
  report.lags.assign(lags.begin(), lags.end());
  report.u = u;
  report.v = v;
  report.replicates = replicates;
  report.dep.resize(lags.size());
  report.se.resize(lags.size());
  const double R = static_cast<double>(replicates);
  const double p1 = static_cast<double>(n1) / R;
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double p2 = static_cast<double>(n2[li]) / R;
    const double pj = static_cast<double>(n11[li]) / R;
    const double cov = pj - p1 * p2;
    report.dep[li] = std::abs(cov);
    // The centered product (x-p1)(y-p2) takes four values; its variance
    // follows from the joint counts.
    const double c11 = static_cast<double>(n11[li]);
    const double c10 = static_cast<double>(n1) - c11;
    const double c01 = static_cast<double>(n2[li]) - c11;
    const double c00 = R - c10 - c01 - c11;
    const double g11 = (1.0 - p1) * (1.0 - p2);
    const double g10 = -(1.0 - p1) * p2;
    const double g01 = -p1 * (1.0 - p2);
    const double g00 = p1 * p2;
    const double eg2 = (c11 * g11 * g11 + c10 * g10 * g10 + c01 * g01 * g01 +
                        c00 * g00 * g00) / R;
    report.se[li] = std::sqrt(std::max(eg2 - cov * cov, 0.0) / R);
  }
  return report;
}

DecayFit fit_decay(std::span<const std::size_t> lags,
                   std::span<const double> values, std::span<const double> ses,
                   std::pair<std::size_t, std::size_t> lag_range) {
  if (lags.size() != values.size() ||
      (!ses.empty() && ses.size() != values.size())) {
    throw std::invalid_argument("fit_decay: length mismatch");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::size_t k = lags[i];
    if (k < std::max<std::size_t>(lag_range.first, 1) || k > lag_range.second) continue;
    const double mag = std::abs(values[i]);
    if (mag == 0.0) {
      throw std::invalid_argument("fit_decay: zero magnitude inside the fit range");
    }
    const double se = ses.empty() ? 0.0 : ses[i];
    if (mag <= 5.0 * se) continue;  // below noise: drop, record the used range
    if (xs.empty()) lo = k;
    hi = k;
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(mag));
  }
  if (xs.size() < 4) {
    throw std::invalid_argument("fit_decay: fewer than 4 usable lags");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ymean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = intercept + slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
  }
  DecayFit fit;
  fit.rate = std::exp(slope);
  fit.intercept = intercept;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.lag_range = {lo, hi};
  fit.lags_used = xs.size();
  return fit;
}

DecayFit fit_decay(const AcfReport& report,
                   std::pair<std::size_t, std::size_t> lag_range) {
  std::vector<double> ses(report.lags.size(), report.se());
  return fit_decay(report.lags, report.rho_hat, ses, lag_range);
}

DecayFit fit_decay(const DependenceReport& report,
                   std::pair<std::size_t, std::size_t> lag_range) {
  return fit_decay(report.lags, report.dep, report.se, lag_range);
}

double two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0, ib = 0;
  double sup = 0.0;
  while (ia < sa.size() && ib < sb.size()) {
    const double x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= x) ++ia;
    while (ib < sb.size() && sb[ib] <= x) ++ib;
    sup = std::max(sup, std::abs(static_cast<double>(ia) / na -
                                 static_cast<double>(ib) / nb));
  }
  return sup;
}

}  // namespace tma
