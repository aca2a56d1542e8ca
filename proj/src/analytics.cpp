#include "tma/analytics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tma/special.hpp"

namespace tma {

bool is_ex31_shape(const TmaModel& model) {
  return model.q() == 0 && model.d == 1;
}

bool is_ex32_shape(const TmaModel& model) {
  return model.q() == 1 && model.d == 2 && model.mu1 == 0.0 && model.mu2 == 0.0;
}

Ex31Constants ex31_constants(double mu1, double mu2, double r,
                             const Innovation& dist) {
  if (!dist.finite_variance()) {
    throw std::domain_error("ex31_constants: innovation variance is infinite");
  }
  Ex31Constants c;
  const double g1 = dist.cdf(r - mu1);
  const double g2 = dist.cdf(r - mu2);
  c.beta = g1 - g2;
  c.delta0 = g2 / (1.0 - g1 + g2);
  const double p1 = dist.partial_first_moment(r - mu1);
  const double p2 = dist.partial_first_moment(r - mu2);
  c.lambda1 = p2 + c.delta0 * (p1 - p2);
  c.sigma2 = dist.variance();
  return c;
}

double ex31_mean(const Ex31Constants& c, double mu1, double mu2) {
  return mu2 + (mu1 - mu2) * c.delta0;
}

double ex31_variance(const Ex31Constants& c, double mu1, double mu2) {
  const double diff = mu1 - mu2;
  return c.sigma2 + diff * diff * c.delta0 * (1.0 - c.delta0);
}

namespace {

// rho_k = C beta^{k-1} with C = [dm lambda1 + dm^2 d0(1-d0) beta] / variance;
// both numerator terms carry one factor of beta per extra lag.
double ex31_acf_scale(const Ex31Constants& c, double mu1, double mu2) {
  const double dm = mu1 - mu2;
  const double num = dm * c.lambda1 + dm * dm * c.delta0 * (1.0 - c.delta0) * c.beta;
  return num / ex31_variance(c, mu1, mu2);
}

}  // namespace

double ex31_acf(std::size_t k, const Ex31Constants& c, double mu1, double mu2) {
  if (k == 0) throw std::invalid_argument("ex31_acf: k must be >= 1");
  double pw = 1.0;
  for (std::size_t i = 1; i < k; ++i) pw *= c.beta;
  return ex31_acf_scale(c, mu1, mu2) * pw;
}

std::vector<double> ex31_acf_range(std::size_t k_max, const Ex31Constants& c,
                                   double mu1, double mu2) {
  std::vector<double> out(k_max);
  const double scale = ex31_acf_scale(c, mu1, mu2);
  double pw = 1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    out[k - 1] = scale * pw;
    pw *= c.beta;
  }
  return out;
}

SkewKurt ex31_skewness_kurtosis(double mu1, double mu2, double r,
                                const Innovation& dist) {
  if (!(dist.kind() != InnovationKind::StudentT || dist.param() > 4.0)) {
    throw std::domain_error("ex31_skewness_kurtosis: fourth moment undefined");
  }
  const Ex31Constants c = ex31_constants(mu1, mu2, r, dist);
  const double d0 = c.delta0;
  const double dm = mu1 - mu2;
  const double var = ex31_variance(c, mu1, mu2);
  const double e3 = dist.raw_moment(3);
  const double e4 = dist.raw_moment(4);
  const double m3b = d0 - 3.0 * d0 * d0 + 2.0 * d0 * d0 * d0;
  const double m4b = d0 - 4.0 * d0 * d0 + 6.0 * d0 * d0 * d0 - 3.0 * d0 * d0 * d0 * d0;
  SkewKurt out;
  out.skewness = (e3 + dm * dm * dm * m3b) / std::pow(var, 1.5);
  out.kurtosis =
      (e4 + 6.0 * c.sigma2 * dm * dm * d0 * (1.0 - d0) + dm * dm * dm * dm * m4b) /
      (var * var);
  return out;
}

double ex31_marginal_density(double x, double mu1, double mu2, double r,
                             const Innovation& dist) {
  const Ex31Constants c = ex31_constants(mu1, mu2, r, dist);
  return c.delta0 * dist.density(x - mu1) + (1.0 - c.delta0) * dist.density(x - mu2);
}

Ex32Acf1 ex32_acf1(double phi, double psi, double r, const Innovation& dist,
                   std::size_t mc_samples, std::uint64_t seed) {
  if (!dist.finite_variance()) {
    throw std::domain_error("ex32_acf1: innovation variance is infinite");
  }
  Ex32Acf1 out;
  const bool normal_kind = dist.kind() == InnovationKind::StandardNormal ||
                           dist.kind() == InnovationKind::ScaledNormal;
  if (normal_kind) {
    // e2 + c e1 is normal with sd sigma sqrt(1 + c^2).
    const double sigma = dist.kind() == InnovationKind::StandardNormal ? 1.0 : dist.param();
    const double p_psi = special::normal_cdf(r / (sigma * std::sqrt(1.0 + psi * psi)));
    const double p_phi = special::normal_cdf(r / (sigma * std::sqrt(1.0 + phi * phi)));
    out.varrho = p_psi / (1.0 - p_phi + p_psi);
    out.exact = true;
  } else {
    if (mc_samples < 10'000) {
      throw std::invalid_argument("ex32_acf1: mc_samples must be >= 1e4");
    }
    auto rng = substream_rng(seed, kStreamAux);
    std::size_t hit_psi = 0;
    std::size_t hit_phi = 0;
    for (std::size_t s = 0; s < mc_samples; ++s) {
      const double e1 = dist.draw(rng);
      const double e2 = dist.draw(rng);
      hit_psi += static_cast<std::size_t>(e2 + psi * e1 <= r);
      hit_phi += static_cast<std::size_t>(e2 + phi * e1 <= r);
    }
    const double n = static_cast<double>(mc_samples);
    const double p_psi = static_cast<double>(hit_psi) / n;
    const double p_phi = static_cast<double>(hit_phi) / n;
    out.varrho = p_psi / (1.0 - p_phi + p_psi);
    // Crude delta-method scale: dominated by the two binomial numerators.
    out.varrho_se = std::sqrt(p_psi * (1.0 - p_psi) / n + p_phi * (1.0 - p_phi) / n);
    out.exact = false;
  }
  const double vr = out.varrho;
  out.value = (psi + (phi - psi) * vr) /
              (1.0 + psi * psi + (phi * phi - psi * psi) * vr);
  return out;
}

std::size_t CovarianceBound::min_lag() const {
  return static_cast<std::size_t>((m + 2) * d) + q;
}

double CovarianceBound::operator()(std::size_t k) const {
  if (k < min_lag()) return std::numeric_limits<double>::infinity();
  if (H == 0.0) return 0.0;
  const double sd = std::sqrt(delta_upper);
  if (sd >= 1.0) return std::numeric_limits<double>::infinity();
  const long expo =
      static_cast<long>((k - q - static_cast<std::size_t>(d)) /
                        (static_cast<std::size_t>(d) * (m + 1))) - 1;
  return H * (m + 1.0) / (1.0 - sd) * std::pow(sd, static_cast<double>(expo));
}

CovarianceBound thm31_bound_constants(const TmaModel& model,
                                      std::size_t delta_samples,
                                      std::uint64_t seed) {
  validate(model);
  const double e2 = model.innovation.variance();  // throws when infinite
  const double root = std::sqrt(e2);
  double diff_sum = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < model.q(); ++i) {
    diff_sum += std::abs(model.phi[i] - model.psi[i]);
    abs_sum += std::abs(model.phi[i]) + std::abs(model.psi[i]);
  }
  CovarianceBound bound;
  bound.H = (std::abs(model.mu1 - model.mu2) + root * diff_sum) *
            (std::abs(model.mu1) + std::abs(model.mu2) + root * abs_sum);
  bound.m = structural_m(model.d, model.q());
  bound.delta = contraction_delta(model, delta_samples, seed);
  bound.delta_upper = bound.delta.upper(3.0);
  bound.d = model.d;
  bound.q = model.q();
  return bound;
}

}  // namespace tma
