#include "tma/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tma {

namespace {

std::string canonical_model_string(const TmaModel& m) {
  char buf[64];
  std::string s;
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s=%.17g;", key, v);
    s += buf;
  };
  put("mu1", m.mu1);
  put("mu2", m.mu2);
  s += "phi=";
  for (double v : m.phi) {
    std::snprintf(buf, sizeof(buf), "%.17g,", v);
    s += buf;
  }
  s += ";psi=";
  for (double v : m.psi) {
    std::snprintf(buf, sizeof(buf), "%.17g,", v);
    s += buf;
  }
  std::snprintf(buf, sizeof(buf), ";d=%d;", m.d);
  s += buf;
  put("r", m.r);
  s += "innovation=" + m.innovation.canonical();
  return s;
}

}  // namespace

const TmaModel& validate(const TmaModel& model) {
  if (model.phi.size() != model.psi.size()) {
    throw std::invalid_argument("TmaModel: phi and psi must have the same length q");
  }
  if (model.d < 1) {
    throw std::invalid_argument("TmaModel: delay d must be >= 1");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(model.mu1) || !finite(model.mu2) || !finite(model.r) ||
      !std::all_of(model.phi.begin(), model.phi.end(), finite) ||
      !std::all_of(model.psi.begin(), model.psi.end(), finite)) {
    throw std::invalid_argument("TmaModel: parameters must be finite");
  }
  return model;
}

RegimePair regime_pair(const TmaModel& model, std::span<const double> window) {
  if (window.size() != model.q() + 1) {
    throw std::invalid_argument("regime_pair: window must have length q+1");
  }
  return detail::regime_pair_impl(model, [&](std::size_t j) { return window[j]; });
}

int structural_m(int d, std::size_t q) {
  if (d < 1) throw std::invalid_argument("structural_m: d must be >= 1");
  const long top = std::max<long>(d, static_cast<long>(q) + 1);
  return static_cast<int>((top - 1) / d);
}

double DeltaEstimate::upper(double z) const {
  return std::clamp(value + z * se, 0.0, 1.0);
}

DeltaEstimate contraction_delta(const TmaModel& model, std::size_t mc_samples,
                                std::uint64_t seed) {
  validate(model);
  if (model.q() == 0) {
    // a = mu2 + e, b = mu1 + e: exactly one is <= r iff e lands between
    // r - max(mu) and r - min(mu).
    const double delta =
        std::abs(model.innovation.cdf(model.r - model.mu1) -
                 model.innovation.cdf(model.r - model.mu2));
    return {delta, 0.0, 0, true};
  }
  if (mc_samples < 10'000) {
    throw std::invalid_argument("contraction_delta: mc_samples must be >= 1e4");
  }
  auto rng = substream_rng(seed, kStreamDelta);
  const std::size_t q = model.q();
  std::vector<double> window(q + 1);  // window[j] = e_{1-j}
  std::size_t hits = 0;
  for (std::size_t s = 0; s < mc_samples; ++s) {
    for (std::size_t j = 0; j <= q; ++j) window[j] = model.innovation.draw(rng);
    const auto ind = indicators(detail::regime_pair_impl(
                                    model, [&](std::size_t j) { return window[j]; }),
                                model.r);
    hits += static_cast<std::size_t>(ind.w != 0);
  }
  const double p = static_cast<double>(hits) / static_cast<double>(mc_samples);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(mc_samples));
  return {p, se, mc_samples, false};
}

std::uint64_t model_hash(const TmaModel& model) {
  const std::string s = canonical_model_string(model);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string model_hash_hex(const TmaModel& model) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(model_hash(model)));
  return buf;
}

}  // namespace tma
