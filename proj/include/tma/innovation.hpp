#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tma/rng.hpp"

namespace tma {

enum class InnovationKind { StandardNormal, StudentT, Laplace, ScaledNormal };

/// Zero-mean innovation law with a strictly positive continuous density.
/// Exposes the analytic functionals the autocorrelation formulas consume
/// (CDF, density, truncated first moment, raw moments) plus seeded sampling.
class Innovation {
 public:
  static Innovation standard_normal();
  static Innovation student_t(double dof);
  static Innovation laplace(double scale);
  static Innovation scaled_normal(double sigma);

  InnovationKind kind() const { return kind_; }
  /// dof (StudentT), scale (Laplace), sigma (ScaledNormal); 1 for StandardNormal.
  double param() const { return param_; }

  double cdf(double x) const;
  double density(double x) const;

  /// E[e * 1(e <= c)]. Closed form for normal kinds and Laplace; adaptive
  /// quadrature (abs tol 1e-9) for StudentT. Requires a finite first moment,
  /// so StudentT with dof <= 1 is rejected.
  double partial_first_moment(double c) const;

  /// Exact analytic raw moment E[e^order], order in 1..4. StudentT requires
  /// dof > order.
  double raw_moment(int order) const;

  bool finite_variance() const;
  /// Variance; throws std::domain_error when infinite (StudentT dof <= 2).
  double variance() const;

  /// One variate from `rng`. Uniform consumption per draw may vary for
  /// StudentT (rejection), but the output sequence is a pure function of the
  /// generator state.
  double draw(Xoshiro256PlusPlus& rng) const;

  /// Canonical text form, e.g. "laplace(1)"; feeds the model hash.
  std::string canonical() const;

  bool operator==(const Innovation&) const = default;

 private:
  Innovation(InnovationKind kind, double param) : kind_(kind), param_(param) {}
  InnovationKind kind_;
  double param_;
};

/// n i.i.d. draws from substream kStreamMain of `seed`; identical
/// (dist, n, seed) gives bit-identical output, and the result is a prefix of
/// the e_1, e_2, ... stream the simulators consume for the same seed.
std::vector<double> sample(const Innovation& dist, std::size_t n, std::uint64_t seed);

/// Innovations e_i for i in [lo, hi]. Indices i >= 1 come from the main
/// substream in forward order; i <= 0 from the presample substream in the
/// order e_0, e_{-1}, .... Two blocks with the same seed therefore agree on
/// every shared index, which is what lets the recursive and closed-form
/// constructions share one innovation stream.
class InnovationBlock {
 public:
  InnovationBlock(const Innovation& dist, long lo, long hi, std::uint64_t seed);

  double operator[](long i) const { return data_[static_cast<std::size_t>(i - lo_)]; }
  /// Pointer positioned at e_i; e_{i-j} sits at ptr(i)[-j].
  const double* ptr(long i) const { return data_.data() + (i - lo_); }
  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(data_.size()) - 1; }

 private:
  long lo_;
  std::vector<double> data_;
};

}  // namespace tma
