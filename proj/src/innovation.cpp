#include "tma/innovation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "tma/special.hpp"

namespace tma {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

// Student-t tail cutoff: beyond T the density is below C*(x^2/dof)^-(dof+1)/2,
// so |int_T^inf x f dx| <= C * dof^{(dof+1)/2} * T^{1-dof} / (dof-1).
double student_tail_cutoff(double dof, double mass_tol) {
  const double c = special::student_t_pdf(0.0, dof);  // the normalizing constant
  const double lead = c * std::pow(dof, 0.5 * (dof + 1.0)) / (dof - 1.0);
  const double t = std::exp(std::log(lead / mass_tol) / (dof - 1.0));
  return std::max(t, 16.0);
}

// E[e 1(e<=c)] for StudentT by adaptive Simpson over dyadic segments anchored
// at 0 and c; the segmentation keeps the quadrature from stepping over the
// density peak when the domain reaches far into the tail.
double student_partial_first_moment(double dof, double c) {
  const double tol = 1e-9;
  const double lo = -student_tail_cutoff(dof, 0.25 * tol);
  if (c <= lo) return 0.0;
  std::vector<double> pts;
  pts.push_back(lo);
  for (double b = std::exp2(std::ceil(std::log2(-lo))); b >= 0.5; b *= 0.5) {
    if (-b > lo && -b < c) pts.push_back(-b);
  }
  if (0.0 < c && 0.0 > lo) pts.push_back(0.0);
  for (double b = 0.5; b < c; b *= 2.0) {
    if (b > lo) pts.push_back(b);
  }
  pts.push_back(c);
  const double seg_tol = 0.5 * tol / static_cast<double>(pts.size());
  double total = 0.0;
  auto integrand = [dof](double x) { return x * special::student_t_pdf(x, dof); };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += special::adaptive_simpson(integrand, pts[i], pts[i + 1], seg_tol);
  }
  return total;
}

// Bailey's polar method: (u,v) uniform in the unit disc, w = u^2 + v^2,
// t = u * sqrt(dof * (w^{-2/dof} - 1) / w). Reduces to Marsaglia polar
// normal sampling as dof -> infinity.
double draw_student_t(double dof, Xoshiro256PlusPlus& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform01() - 1.0;
    const double v = 2.0 * rng.uniform01() - 1.0;
    const double w = u * u + v * v;
    if (w >= 1.0 || w == 0.0) continue;
    return u * std::sqrt(dof * (std::pow(w, -2.0 / dof) - 1.0) / w);
  }
}

}  // namespace

Innovation Innovation::standard_normal() {
  return Innovation(InnovationKind::StandardNormal, 1.0);
}

Innovation Innovation::student_t(double dof) {
  require(dof > 0.0 && std::isfinite(dof), "student_t: dof must be a positive real");
  return Innovation(InnovationKind::StudentT, dof);
}

Innovation Innovation::laplace(double scale) {
  require(scale > 0.0 && std::isfinite(scale), "laplace: scale must be positive");
  return Innovation(InnovationKind::Laplace, scale);
}

Innovation Innovation::scaled_normal(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), "scaled_normal: sigma must be positive");
  return Innovation(InnovationKind::ScaledNormal, sigma);
}

double Innovation::cdf(double x) const {
  switch (kind_) {
    case InnovationKind::StandardNormal:
      return special::normal_cdf(x);
    case InnovationKind::ScaledNormal:
      return special::normal_cdf(x / param_);
    case InnovationKind::Laplace: {
      const double z = x / param_;
      return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    }
    case InnovationKind::StudentT:
      return special::student_t_cdf(x, param_);
  }
  return 0.0;
}

double Innovation::density(double x) const {
  switch (kind_) {
    case InnovationKind::StandardNormal:
      return special::normal_pdf(x);
    case InnovationKind::ScaledNormal:
      return special::normal_pdf(x / param_) / param_;
    case InnovationKind::Laplace:
      return 0.5 / param_ * std::exp(-std::abs(x) / param_);
    case InnovationKind::StudentT:
      return special::student_t_pdf(x, param_);
  }
  return 0.0;
}

double Innovation::partial_first_moment(double c) const {
  if (std::isnan(c)) throw std::domain_error("partial_first_moment: c is NaN");
  switch (kind_) {
    case InnovationKind::StandardNormal:
      if (std::isinf(c)) return 0.0;
      return -special::normal_pdf(c);
    case InnovationKind::ScaledNormal:
      if (std::isinf(c)) return 0.0;
      return -param_ * special::normal_pdf(c / param_);
    case InnovationKind::Laplace: {
      if (std::isinf(c)) return 0.0;
      const double b = param_;
      if (c <= 0.0) return 0.5 * std::exp(c / b) * (c - b);
      return -0.5 * std::exp(-c / b) * (c + b);
    }
    case InnovationKind::StudentT:
      require(param_ > 1.0, "partial_first_moment: StudentT needs dof > 1");
      if (std::isinf(c)) return 0.0;
      return student_partial_first_moment(param_, c);
  }
  return 0.0;
}

double Innovation::raw_moment(int order) const {
  require(order >= 1 && order <= 4, "raw_moment: order must be in 1..4");
  switch (kind_) {
    case InnovationKind::StandardNormal:
      return (order == 2) ? 1.0 : (order == 4) ? 3.0 : 0.0;
    case InnovationKind::ScaledNormal: {
      const double s2 = param_ * param_;
      return (order == 2) ? s2 : (order == 4) ? 3.0 * s2 * s2 : 0.0;
    }
    case InnovationKind::Laplace: {
      const double b2 = param_ * param_;
      return (order == 2) ? 2.0 * b2 : (order == 4) ? 24.0 * b2 * b2 : 0.0;
    }
    case InnovationKind::StudentT: {
      const double v = param_;
      require(v > order, "raw_moment: StudentT needs dof > order");
      if (order % 2 == 1) return 0.0;
      if (order == 2) return v / (v - 2.0);
      return 3.0 * v * v / ((v - 2.0) * (v - 4.0));
    }
  }
  return 0.0;
}

bool Innovation::finite_variance() const {
  return kind_ != InnovationKind::StudentT || param_ > 2.0;
}

double Innovation::variance() const {
  require(finite_variance(), "variance: infinite for StudentT with dof <= 2");
  return raw_moment(2);
}

double Innovation::draw(Xoshiro256PlusPlus& rng) const {
  switch (kind_) {
    case InnovationKind::StandardNormal:
      return special::normal_quantile(rng.uniform01());
    case InnovationKind::ScaledNormal:
      return param_ * special::normal_quantile(rng.uniform01());
    case InnovationKind::Laplace: {
      const double u = rng.uniform01();
      return u < 0.5 ? param_ * std::log(2.0 * u) : -param_ * std::log(2.0 * (1.0 - u));
    }
    case InnovationKind::StudentT:
      return draw_student_t(param_, rng);
  }
  return 0.0;
}

std::string Innovation::canonical() const {
  char buf[64];
  const char* name = "";
  switch (kind_) {
    case InnovationKind::StandardNormal:
      return "normal";
    case InnovationKind::StudentT:
      name = "student_t";
      break;
    case InnovationKind::Laplace:
      name = "laplace";
      break;
    case InnovationKind::ScaledNormal:
      name = "scaled_normal";
      break;
  }
  std::snprintf(buf, sizeof(buf), "%s(%.17g)", name, param_);
  return buf;
}

std::vector<double> sample(const Innovation& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  auto rng = substream_rng(seed, kStreamMain);
  std::vector<double> out(n);
  for (auto& x : out) x = dist.draw(rng);
  return out;
}

InnovationBlock::InnovationBlock(const Innovation& dist, long lo, long hi,
                                 std::uint64_t seed)
    : lo_(lo) {
  if (hi < lo) throw std::invalid_argument("InnovationBlock: hi < lo");
  data_.resize(static_cast<std::size_t>(hi - lo + 1));
  if (hi >= 1) {
    auto rng = substream_rng(seed, kStreamMain);
    for (long i = 1; i <= hi; ++i) {
      const double x = dist.draw(rng);
      if (i >= lo) data_[static_cast<std::size_t>(i - lo_)] = x;
    }
  }
  if (lo <= 0) {
    auto rng = substream_rng(seed, kStreamPresample);
    for (long i = 0; i >= lo; --i) {
      const double x = dist.draw(rng);
      if (i <= hi) data_[static_cast<std::size_t>(i - lo_)] = x;
    }
  }
}

}  // namespace tma
