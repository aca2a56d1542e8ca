#pragma once

#include <cstdint>
#include <vector>

#include "tma/model.hpp"

namespace tma {

/// q = 0, d = 1: the drift-switching shape with a fully explicit ACF.
bool is_ex31_shape(const TmaModel& model);
/// q = 1, d = 2, mu1 = mu2 = 0: the driftless shape whose ACF cuts off.
bool is_ex32_shape(const TmaModel& model);

/// Closed-form constants for the q = 0, d = 1 shape, from the innovation
/// CDF G: beta = G(r-mu1) - G(r-mu2), delta0 = G(r-mu2)/(1-G(r-mu1)+G(r-mu2))
/// (the stationary probability of the lower regime), lambda1 the
/// innovation-indicator cross moment, sigma2 the innovation variance.
struct Ex31Constants {
  double beta = 0.0;
  double delta0 = 0.0;
  double lambda1 = 0.0;
  double sigma2 = 0.0;
};

/// Requires a finite-variance innovation. lambda1 is assembled from
/// truncated first moments as
///   lambda1 = E[e 1(e<=r-mu2)] + delta0 (E[e 1(e<=r-mu1)] - E[e 1(e<=r-mu2)]),
/// and lambda_k = beta^{k-1} lambda1 thereafter; the lambda recursion is
/// cross-checked against a simulation oracle in the test suite before
/// anything downstream trusts it.
Ex31Constants ex31_constants(double mu1, double mu2, double r,
                             const Innovation& dist);

double ex31_mean(const Ex31Constants& c, double mu1, double mu2);
double ex31_variance(const Ex31Constants& c, double mu1, double mu2);

/// rho_k = [(mu1-mu2) lambda_k + (mu1-mu2)^2 delta0(1-delta0) beta^k]
///         / [sigma2 + (mu1-mu2)^2 delta0(1-delta0)], k >= 1.
double ex31_acf(std::size_t k, const Ex31Constants& c, double mu1, double mu2);

/// rho_1..rho_k_max with the powers accumulated iteratively (bitwise equal
/// to the scalar version).
std::vector<double> ex31_acf_range(std::size_t k_max, const Ex31Constants& c,
                                   double mu1, double mu2);

struct SkewKurt {
  double skewness = 0.0;
  double kurtosis = 0.0;
};

/// Marginal skewness and kurtosis of the q = 0, d = 1 shape; needs the
/// third and fourth raw innovation moments.
SkewKurt ex31_skewness_kurtosis(double mu1, double mu2, double r,
                                const Innovation& dist);

/// Marginal density of the q = 0, d = 1 shape:
///   f_y(x) = delta0 h(x - mu1) + (1 - delta0) h(x - mu2),
/// a two-component mixture that turns bimodal once the drifts separate.
double ex31_marginal_density(double x, double mu1, double mu2, double r,
                             const Innovation& dist);

struct Ex32Acf1 {
  double value = 0.0;      // rho_1; rho_k = 0 for k >= 2 (cut-off after lag q)
  double varrho = 0.0;     // P(e2+psi e1 <= r) / [P(e2+phi e1 > r) + P(e2+psi e1 <= r)]
  double varrho_se = 0.0;  // 0 when varrho is exact
  bool exact = false;
};

/// Lag-1 ACF of the q = 1, d = 2 driftless shape,
///   rho_1 = [psi + (phi-psi) varrho] / [1 + psi^2 + (phi^2-psi^2) varrho].
/// varrho uses the exact normal convolution for (scaled) normal innovations
/// and falls back to Monte Carlo (substream kStreamAux) otherwise. The k >= 2
/// cut-off is exact for this shape.
Ex32Acf1 ex32_acf1(double phi, double psi, double r, const Innovation& dist,
                   std::size_t mc_samples, std::uint64_t seed);

/// Evaluable envelope for |Cov(y_0, y_k)|:
///   bound(k) = H (m+1) / (1 - sqrt(du)) * sqrt(du)^(floor((k-q-d)/(d(m+1))) - 1),
/// valid for k >= (m+2)d + q, with du a conservative upper confidence value
/// of delta (estimate + 3 SE) and
///   H = [|mu1-mu2| + sqrt(E e^2) sum|phi_i-psi_i|]
///       * [|mu1| + |mu2| + sqrt(E e^2) sum(|phi_i|+|psi_i|)].
struct CovarianceBound {
  double H = 0.0;
  int m = 0;
  DeltaEstimate delta;
  double delta_upper = 0.0;
  int d = 1;
  std::size_t q = 0;

  std::size_t min_lag() const;
  /// +infinity below min_lag(); the envelope value otherwise.
  double operator()(std::size_t k) const;
};

CovarianceBound thm31_bound_constants(const TmaModel& model,
                                      std::size_t delta_samples,
                                      std::uint64_t seed);

}  // namespace tma
