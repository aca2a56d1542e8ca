// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Returns nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tma/analytics.hpp"
#include "tma/estimate.hpp"
#include "tma/io_util.hpp"
#include "tma/model_io.hpp"
#include "tma/stationary.hpp"
#include "tma/verify.hpp"

using namespace tma;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, bool passed, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, passed ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<TmaModel> shipped() {
  return {testutil::ex31(), testutil::ex32(), testutil::eq31()};
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double acf1_stat(std::span<const double> v) {
  const double mean = mean_of(v);
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    c0 += (v[t] - mean) * (v[t] - mean);
    if (t + 1 < v.size()) c1 += (v[t] - mean) * (v[t + 1] - mean);
  }
  return c0 > 0.0 ? c1 / c0 : 0.0;
}

std::string cli_path() { return TMASIM_CLI_PATH; }
std::string models_dir() { return TMASIM_MODELS_DIR; }

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_1_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t violations = 0;
  for (const TmaModel& m : shipped()) {
    const DeltaEstimate delta = contraction_delta(m, 1'000'000, 42);
    const std::size_t burn = default_burn_in(structural_m(m.d, m.q()), delta.value);
    const SeriesPath rec = simulate_recursive(m, 20'000, burn, {}, 42);
    violations += first_exactness_violation(m, rec).has_value();
    ClosedFormOptions opts;
    opts.delta = delta;
    const ClosedFormResult cf = simulate_closed_form(m, 10'000, 42, opts);
    violations += first_exactness_violation(m, cf.path).has_value();
  }
  auto rng = substream_rng(7777, 0);
  int closed_checked = 0;
  for (int i = 0; i < 100; ++i) {
    const TmaModel m = testutil::random_model(rng);
    const SeriesPath rec = simulate_recursive(m, 500, 100, {}, 5000 + i);
    violations += first_exactness_violation(m, rec).has_value();
    const DeltaEstimate delta = contraction_delta(m, 100'000, 5000 + i);
    if (delta.upper(3.0) < 0.99) {
      ClosedFormOptions opts;
      opts.delta = delta;
      const ClosedFormResult cf = simulate_closed_form(m, 300, 5000 + i, opts);
      violations += first_exactness_violation(m, cf.path).has_value();
      ++closed_checked;
    }
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "bitwise recursion on 3 shipped + 100 random models "
                "(%d closed-form), %zu violations, %.1fs (< 30s)",
                closed_checked, violations, secs);
  report(1, violations == 0 && secs < 30.0, buf);
}

void criterion_2_uniqueness() {
  std::size_t failures = 0;
  std::size_t worst_time = 0;
  for (const TmaModel& m : shipped()) {
    const DeltaEstimate delta = contraction_delta(m, 1'000'000, 42);
    const std::size_t len = std::max<std::size_t>(m.d, m.q());
    std::vector<std::vector<double>> inits;
    for (double level : {0.0, 10.0, -10.0, 3.0, -3.0}) inits.emplace_back(len, level);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const CouplingReport cr = coupling_check(m, 10'000, inits, seed);
      if (!cr.all_coupled()) ++failures;
      worst_time = std::max(worst_time, cr.max_time());
      ClosedFormOptions opts;
      opts.delta = delta;
      const ClosedFormResult cf = simulate_closed_form(m, 10'000, seed, opts);
      const SeriesPath rec = simulate_recursive(m, 10'000, 0, {}, seed);
      if (!coupling_time(cf.path.values, rec.values).has_value()) ++failures;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "5 inits + closed-form agreement, 3 models x 100 seeds: "
                "%zu failures, worst coupling time %zu",
                failures, worst_time);
  report(2, failures == 0, buf);
}

void criterion_3_truncation() {
  bool ok = true;
  std::string detail;
  for (const TmaModel& m : shipped()) {
    const DeltaEstimate delta = contraction_delta(m, 1'000'000, 11);
    const int sm = structural_m(m.d, m.q());
    const std::size_t K = default_truncation(sm, delta.value);
    const TruncationCheck tc = alpha_truncation_check(m, K, 50, 100'000, 11);
    const double bound = alpha_tail_bound(sm, delta.value, K);
    ok = ok && tc.p_hat <= bound + 3.0 * tc.se;
    char buf[96];
    std::snprintf(buf, sizeof(buf), " [K=%zu p=%.2g bound=%.2g]", K, tc.p_hat, bound);
    detail += buf;
  }
  report(3, ok, "P(alpha_K != alpha_K+50) within the analytic tail bound +3SE, 1e5 trials:" + detail);
}

void criterion_4_ex31_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  const TmaModel m = testutil::ex31();
  const SeriesPath path = simulate_recursive(m, 1'000'000, 500, {}, 2024);
  const Moments mom = sample_moments(path.values);
  const Ex31Constants c = ex31_constants(m.mu1, m.mu2, m.r, m.innovation);
  const SkewKurt sk = ex31_skewness_kurtosis(m.mu1, m.mu2, m.r, m.innovation);
  const auto rho1 = batch_statistic(std::span<const double>(path.values), acf1_stat);
  double worst = 0.0;
  worst = std::max(worst, std::abs(rho1.value - ex31_acf(1, c, m.mu1, m.mu2)) /
                              (4.0 * rho1.se));
  worst = std::max(worst, std::abs(mom.variance - ex31_variance(c, m.mu1, m.mu2)) /
                              (4.0 * mom.se_variance));
  worst = std::max(worst,
                   std::abs(mom.skewness - sk.skewness) / (4.0 * mom.se_skewness));
  worst = std::max(worst,
                   std::abs(mom.kurtosis - sk.kurtosis) / (4.0 * mom.se_kurtosis));
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "rho1/variance/skewness/kurtosis vs formulas at n=1e6: worst "
                "|dev|/4SE = %.3f, %.1fs (< 120s)",
                worst, secs);
  report(4, worst <= 1.0 && secs < 120.0, buf);
}

void criterion_5_lambda_recursion() {
  const TmaModel m = testutil::ex31();
  const SeriesPath path = simulate_recursive(m, 1'000'000, 500, {}, 31415);
  const Ex31Constants c = ex31_constants(m.mu1, m.mu2, m.r, m.innovation);
  const std::size_t n = path.values.size();
  auto z = [&](std::size_t k, std::size_t t) {  // e_{t+1-k} * 1(y_t <= r)
    const double ind = path.values[t] <= m.r ? 1.0 : 0.0;
    return path.innovations[t + 1 - k + m.q()] * ind;
  };
  const auto mean_stat = [](std::span<const double> v) { return mean_of(v); };
  bool ok = true;
  double worst = 0.0;
  {
    std::vector<double> z1;
    z1.reserve(n);
    for (std::size_t t = 1; t + 1 < n; ++t) z1.push_back(z(1, t));
    const BatchStat l1 = batch_statistic(std::span<const double>(z1), mean_stat);
    const double dev = std::abs(l1.value - c.lambda1) / (3.0 * l1.se);
    worst = std::max(worst, dev);
    ok = ok && dev <= 1.0;
  }
  for (std::size_t k = 2; k <= 6; ++k) {
    std::vector<double> diff;
    diff.reserve(n);
    for (std::size_t t = k; t + 1 < n; ++t) {
      diff.push_back(z(k, t) - c.beta * z(k - 1, t));
    }
    const BatchStat d = batch_statistic(std::span<const double>(diff), mean_stat);
    const double dev = std::abs(d.value) / (3.0 * d.se);
    worst = std::max(worst, dev);
    ok = ok && dev <= 1.0;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "lambda_1 matches the closed form and lambda_k = beta lambda_{k-1} "
                "for k=2..6 within 3SE (worst %.3f)",
                worst);
  report(5, ok, buf);
}

void criterion_6_ex32_cutoff() {
  const TmaModel m = testutil::ex32();
  const SeriesPath path = simulate_recursive(m, 1'000'000, 500, {}, 606);
  const Ex32Acf1 a1 = ex32_acf1(m.phi[0], m.psi[0], m.r, m.innovation, 10'000, 606);
  const auto rho1 = batch_statistic(std::span<const double>(path.values), acf1_stat);
  const AcfReport acf = sample_acf(path, 10);
  double worst = std::abs(rho1.value - a1.value) / (3.0 * rho1.se);
  const double cut_tol = 3.0 / std::sqrt(static_cast<double>(path.values.size()));
  for (std::size_t k = 2; k <= 10; ++k) {
    worst = std::max(worst, std::abs(acf.rho_hat[k]) / cut_tol);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "rho1 vs formula (3SE) and cut-off at lags 2..10 (3/sqrt(n)) at "
                "n=1e6: worst ratio %.3f",
                worst);
  report(6, worst <= 1.0, buf);
}

void criterion_7_covariance_bound() {
  bool ok = true;
  // analytic route for the explicit shape
  const TmaModel e31 = testutil::ex31();
  const CovarianceBound b31 = thm31_bound_constants(e31, 1'000'000, 3);
  const Ex31Constants c = ex31_constants(e31.mu1, e31.mu2, e31.r, e31.innovation);
  const double var = ex31_variance(c, e31.mu1, e31.mu2);
  const auto rho = ex31_acf_range(100, c, e31.mu1, e31.mu2);
  for (std::size_t k = b31.min_lag(); k <= 100; ++k) {
    ok = ok && std::abs(rho[k - 1]) * var <= b31(k);
  }
  // decay-rate recovery on the analytic ACF
  std::vector<std::size_t> lags;
  std::vector<double> values, ses;
  for (std::size_t k = 5; k <= 50; ++k) {
    lags.push_back(k);
    values.push_back(rho[k - 1]);
    ses.push_back(0.0);
  }
  const DecayFit fit = fit_decay(lags, values, ses, {5, 50});
  const double rate_err = std::abs(fit.rate - std::abs(c.beta));
  ok = ok && rate_err < 1e-6;
  // MC route for the near-long-memory model
  const TmaModel m = testutil::eq31();
  const CovarianceBound bound = thm31_bound_constants(m, 1'000'000, 3);
  const std::size_t burn = default_burn_in(bound.m, bound.delta.value);
  const SeriesPath path = simulate_recursive(m, 1'000'000, burn, {}, 99);
  double worst_ratio = 0.0;
  for (std::size_t k = bound.min_lag(); k <= 100; ++k) {
    const auto ck = batch_statistic(
        std::span<const double>(path.values), [k](std::span<const double> v) {
          const double mean = mean_of(v);
          double s = 0.0;
          for (std::size_t t = 0; t + k < v.size(); ++t) {
            s += (v[t] - mean) * (v[t + k] - mean);
          }
          return s / static_cast<double>(v.size());
        });
    const double ratio = std::abs(ck.value) / (bound(k) + 4.0 * ck.se);
    worst_ratio = std::max(worst_ratio, ratio);
    ok = ok && ratio <= 1.0;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "analytic cov <= bound, MC cov <= bound+4SE up to lag 100 "
                "(worst ratio %.3f), analytic decay rate err %.2g (< 1e-6)",
                worst_ratio, rate_err);
  report(7, ok, buf);
}

void criterion_8_dependence_decay() {
  const TmaModel m = testutil::eq31();
  std::vector<std::size_t> lags;
  for (std::size_t k = 100; k <= 1500; k += 100) lags.push_back(k);
  const DependenceReport dep =
      dependence_decay(m, 0.5, 0.5, lags, 100'000, 808);
  bool ok = true;
  double rate = 0.0, r2 = 0.0;
  try {
    const DecayFit fit = fit_decay(dep, {1, 1500});
    rate = fit.rate;
    r2 = fit.r2;
    ok = fit.rate < 1.0 && fit.r2 >= 0.9;
  } catch (const std::invalid_argument&) {
    ok = false;
  }
  // i.i.d. control: dependence indistinguishable from zero at every lag
  const TmaModel iid = testutil::linear_ma({});
  std::vector<std::size_t> small{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const DependenceReport ctrl = dependence_decay(iid, 0.0, 0.0, small, 100'000, 808, 20);
  double worst_ctrl = 0.0;
  for (std::size_t i = 0; i < ctrl.lags.size(); ++i) {
    worst_ctrl = std::max(worst_ctrl, ctrl.dep[i] / (3.0 * ctrl.se[i]));
  }
  ok = ok && worst_ctrl <= 1.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "log-linear fit at (u,v)=(0.5,0.5): rate %.5f, r2 %.3f (>= 0.9); "
                "iid control worst |dep|/3SE %.3f",
                rate, r2, worst_ctrl);
  report(8, ok, buf);
}

void criterion_9_figures() {
  const fs::path dir = fs::temp_directory_path() / "tma_acceptance";
  fs::create_directories(dir);
  bool ok = true;
  std::string detail;
  {
    const fs::path out = dir / "fig1.csv";
    ok = ok && run_cli("figure fig1 --out " + out.string()) == 0;
    const CsvTable t = read_csv(out.string());
    bool pos = false, neg = false;
    double kurt_max = 0.0;
    for (const auto& row : t.rows) {
      pos = pos || row[1] > 1e-3;
      neg = neg || row[1] < -1e-3;
      kurt_max = std::max(kurt_max, row[2]);
    }
    ok = ok && pos && neg && kurt_max > 3.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "fig1: skewness sign change %s, max kurtosis %.2f;",
                  (pos && neg) ? "yes" : "NO", kurt_max);
    detail += buf;
  }
  {
    int passing = 0;
    const int seeds = 100;
    for (int s = 1; s <= seeds; ++s) {
      const fs::path out = dir / ("fig2_" + std::to_string(s) + ".csv");
      if (run_cli("figure fig2 --seed " + std::to_string(s) + " --max-lag 20 --out " +
                  out.string()) != 0) {
        continue;
      }
      const CsvTable t = read_csv(out.string());
      bool above = true;
      for (const auto& row : t.rows) {
        const std::size_t lag = static_cast<std::size_t>(row[0]);
        if (lag >= 1 && lag <= 20) above = above && std::abs(row[1]) > row[3];
      }
      passing += above;
    }
    ok = ok && passing >= 95;
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  " fig2: |rho_k| above the 2/sqrt(n) band through lag 20 for %d/100 seeds",
                  passing);
    detail += buf;
  }
  report(9, ok, detail);
}

void criterion_10_determinism() {
  const fs::path dir = fs::temp_directory_path() / "tma_acceptance";
  fs::create_directories(dir);
  const std::string md = models_dir();
  struct Cmd {
    std::string name;
    std::string args;        // with {OUT} placeholder
    std::vector<std::string> sidecars;
  };
  const std::vector<Cmd> cmds = {
      {"simulate-rec", "simulate --model " + md + "/eq31.json --seed 5 --n 500 --out {OUT}",
       {".meta.json"}},
      {"simulate-cf",  "simulate --model " + md + "/ex31.json --seed 5 --n 500 --method closed-form --out {OUT}",
       {".meta.json"}},
      {"acf", "acf --model " + md + "/ex32.json --seed 5 --n 20000 --max-lag 10 --out {OUT}",
       {".summary.json"}},
      {"theory", "theory --model " + md + "/ex31.json --max-lag 10 --out {OUT}", {}},
      {"theory-grid", "theory --model " + md + "/ex31.json --grid -1:1:0.5 --out {OUT}", {}},
      {"moments", "moments --model " + md + "/ex31.json --seed 5 --n 20000 --out {OUT}", {}},
      {"figure-fig1", "figure fig1 --grid -2:2:0.25 --out {OUT}", {}},
      {"figure-fig2", "figure fig2 --seed 5 --out {OUT}", {}},
      {"decay", "decay --model " + md + "/ex31.json --seed 5 --lags 1,2,3,4,5 "
                "--replicates 100000 --burn-in 50 --out {OUT}",
       {".summary.json"}},
      {"simulate-json", "simulate --model " + md + "/ex32.json --seed 5 --n 500 "
                        "--format json --out {OUT}",
       {".meta.json"}},
  };
  bool ok = true;
  std::string bad;
  for (const auto& cmd : cmds) {
    const std::string out_a = (dir / (cmd.name + "_a.out")).string();
    const std::string out_b = (dir / (cmd.name + "_b.out")).string();
    auto subst = [&](const std::string& out) {
      std::string s = cmd.args;
      s.replace(s.find("{OUT}"), 5, out);
      return s;
    };
    const bool ran = run_cli(subst(out_a)) == 0 && run_cli(subst(out_b)) == 0;
    bool same = ran && slurp(out_a) == slurp(out_b) && !slurp(out_a).empty();
    for (const auto& suffix : cmd.sidecars) {
      same = same && slurp(out_a + suffix) == slurp(out_b + suffix);
    }
    if (!same) {
      ok = false;
      bad += " " + cmd.name;
    }
  }
  report(10, ok,
         ok ? "10 command configurations rerun byte-identically (primary outputs + sidecars)"
            : "non-deterministic or failing commands:" + bad);
}

}  // namespace

int main() {
  std::printf("acceptance suite (models: %s)\n", models_dir().c_str());
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_exactness();
  criterion_2_uniqueness();
  criterion_3_truncation();
  criterion_4_ex31_agreement();
  criterion_5_lambda_recursion();
  criterion_6_ex32_cutoff();
  criterion_7_covariance_bound();
  criterion_8_dependence_decay();
  criterion_9_figures();
  criterion_10_determinism();
  std::printf("acceptance total: %.1fs, %d failure(s)\n", seconds_since(t0),
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
