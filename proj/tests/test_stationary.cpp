#include <doctest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "tma/estimate.hpp"
#include "tma/stationary.hpp"

using namespace tma;

TEST_CASE("equal regimes reduce to the linear MA path") {
  const TmaModel lin = testutil::linear_ma({0.5}, 0.0);
  const SeriesPath path = simulate_recursive(lin, 2000, 0, {}, 21);
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const double expect = 0.0 + path.innovations[i + 1] + 0.5 * path.innovations[i];
    CHECK(path.values[i] == expect);
  }
  const ClosedFormResult cf = simulate_closed_form(lin, 2000, 21);
  CHECK(cf.path.values == path.values);
}

TEST_CASE("both regimes are visited") {
  const SeriesPath path = simulate_recursive(testutil::eq31(), 10'000, 500, {}, 3);
  const double frac =
      static_cast<double>(std::count_if(path.values.begin(), path.values.end(),
                                        [](double y) { return y > 0.5; })) /
      static_cast<double>(path.values.size());
  CHECK(frac > 0.0);
  CHECK(frac < 1.0);
}

TEST_CASE("init vector is forgotten after burn-in") {
  // ex31 couples at rate delta ~ 0.84 per step; 500 steps is plenty
  const std::vector<double> init_a{7.0};
  const std::vector<double> init_b{-9.0};
  const SeriesPath a = simulate_recursive(testutil::ex31(), 4000, 500, init_a, 17);
  const SeriesPath b = simulate_recursive(testutil::ex31(), 4000, 500, init_b, 17);
  CHECK(a.values == b.values);
  // eq31 mixes much more slowly; its default burn-in covers it
  const TmaModel m = testutil::eq31();
  const std::size_t burn = default_burn_in(
      structural_m(m.d, m.q()), contraction_delta(m, 1'000'000, 17).value);
  const std::vector<double> ia{10.0};
  const std::vector<double> ib{-10.0};
  CHECK(simulate_recursive(m, 2000, burn, ia, 17).values ==
        simulate_recursive(m, 2000, burn, ib, 17).values);
}

TEST_CASE("init length is validated") {
  const std::vector<double> too_long{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(simulate_recursive(testutil::eq31(), 10, 0, too_long, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_recursive(testutil::eq31(), 0, 0, {}, 1),
                  std::invalid_argument);
}

TEST_CASE("every emitted value satisfies the recursion bitwise") {
  for (const TmaModel& m : {testutil::ex31(), testutil::ex32(), testutil::eq31()}) {
    const SeriesPath rec = simulate_recursive(m, 5000, 250, {}, 99);
    CHECK_FALSE(first_exactness_violation(m, rec).has_value());
    const ClosedFormResult cf = simulate_closed_form(m, 5000, 99);
    CHECK_FALSE(first_exactness_violation(m, cf.path).has_value());
  }
  auto rng = substream_rng(2024, 0);
  for (int i = 0; i < 25; ++i) {
    const TmaModel m = testutil::random_model(rng);
    const SeriesPath rec = simulate_recursive(m, 600, 60, {}, 1000 + i);
    CHECK_FALSE(first_exactness_violation(m, rec).has_value());
  }
}

TEST_CASE("a corrupted path is caught by the exactness check") {
  SeriesPath path = simulate_recursive(testutil::eq31(), 500, 100, {}, 5);
  path.values[250] += 1e-9;
  const auto bad = first_exactness_violation(testutil::eq31(), path);
  REQUIRE(bad.has_value());
  CHECK(*bad <= 251);
}

TEST_CASE("alpha series entries are 0/1 and stabilize after termination") {
  auto rng = substream_rng(8, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const TmaModel m = testutil::random_model(rng);
    const std::size_t K = 40;
    const std::size_t hist = (K + 10) * static_cast<std::size_t>(m.d) + m.q() + 5;
    const InnovationBlock block(m.innovation, -static_cast<long>(hist), 0, 900 + trial);
    std::vector<double> innov;
    for (long i = block.lo(); i <= 0; ++i) innov.push_back(block[i]);
    const std::size_t index = innov.size() - 1;
    const AlphaEntry e1 = alpha_series_entry(m, innov, index, K);
    CHECK((e1.value == 0 || e1.value == 1));
    if (e1.terminated) {
      const AlphaEntry e2 = alpha_series_entry(m, innov, index, K + 10);
      CHECK(e2.value == e1.value);
      CHECK(e2.terms_used == e1.terms_used);
    }
  }
}

TEST_CASE("degenerate regimes make the series equal its first term") {
  const TmaModel lin = testutil::linear_ma({0.3});
  const InnovationBlock block(lin.innovation, -20, 0, 44);
  std::vector<double> innov;
  for (long i = block.lo(); i <= 0; ++i) innov.push_back(block[i]);
  const std::size_t index = innov.size() - 1;
  const AlphaEntry e = alpha_series_entry(lin, innov, index, 10);
  // W == 0 identically, so the scan stops after U_{n-d}
  CHECK(e.terms_used == 1);
  CHECK(e.terminated);
  const RegimePair rp = regime_pair_at(lin, innov.data() + index - 1);
  CHECK(e.value == indicators(rp, lin.r).u);
}

TEST_CASE("alpha series demands enough history") {
  const TmaModel m = testutil::eq31();
  const std::vector<double> innov(20, 0.1);
  CHECK_THROWS_AS(alpha_series_entry(m, innov, 19, 40), std::invalid_argument);
  CHECK_THROWS_AS(alpha_series_entry(m, innov, 25, 2), std::invalid_argument);
  CHECK_THROWS_AS(alpha_series_entry(m, innov, 19, 0), std::invalid_argument);
}

TEST_CASE("tail bound and default truncation") {
  // m = 1, delta = 0.5: bound(K) = 2 * 0.5^floor((K-1)/2) / 0.5
  CHECK(alpha_tail_bound(1, 0.5, 1) == doctest::Approx(4.0));
  CHECK(alpha_tail_bound(1, 0.5, 3) == doctest::Approx(2.0));
  CHECK(alpha_tail_bound(1, 0.5, 5) == doctest::Approx(1.0));
  CHECK(alpha_tail_bound(0, 0.0, 2) == 0.0);
  for (double delta : {0.1, 0.5, 0.9, 0.99}) {
    for (int m = 0; m <= 3; ++m) {
      const std::size_t k = default_truncation(m, delta, 1e-12);
      if (k < 10'000) CHECK(alpha_tail_bound(m, delta, k) < 1e-12);
      if (k > 1) CHECK(alpha_tail_bound(m, delta, k - 1) >= 1e-12);
    }
  }
  CHECK(default_truncation(1, 0.9999, 1e-12) == 10'000);  // cap binds
  CHECK(default_burn_in(0, 0.5) == 500);
  CHECK(default_burn_in(1, 0.99) == 2000);
}

TEST_CASE("closed form refuses a delta estimate at 1") {
  TmaModel m = testutil::ex31();
  m.mu1 = 50.0;
  m.mu2 = -50.0;  // exact delta rounds to 1
  CHECK_THROWS_AS(simulate_closed_form(m, 100, 1), NumericRefusal);
}

TEST_CASE("closed form couples with the recursive construction") {
  for (const TmaModel& m : {testutil::ex31(), testutil::ex32(), testutil::eq31()}) {
    const ClosedFormResult cf = simulate_closed_form(m, 10'000, 71);
    const SeriesPath rec = simulate_recursive(m, 10'000, 0, {}, 71);
    CHECK(cf.path.innovations == rec.innovations);  // shared stream
    const auto t = coupling_time(cf.path.values, rec.values);
    REQUIRE(t.has_value());
    CHECK(*t < 10'000);
    for (const std::uint8_t a : cf.path.alpha) CHECK((a == 0 || a == 1));
  }
}

TEST_CASE("closed form matches recursive for 100 random mixing models") {
  auto rng = substream_rng(31337, 0);
  int accepted = 0;
  int attempts = 0;
  while (accepted < 100 && attempts < 1000) {
    ++attempts;
    const TmaModel m = testutil::random_model(rng);
    const DeltaEstimate delta = contraction_delta(m, 100'000, 555);
    if (delta.upper(3.0) >= 0.99) continue;
    ++accepted;
    const int sm = structural_m(m.d, m.q());
    const std::size_t horizon = std::max<std::size_t>(
        2000, static_cast<std::size_t>(12.0 * (sm + 1.0) * m.d /
                                       std::max(0.01, 1.0 - delta.value)));
    ClosedFormOptions opts;
    opts.delta = delta;
    const ClosedFormResult cf = simulate_closed_form(m, horizon, 600 + accepted, opts);
    const SeriesPath rec = simulate_recursive(m, horizon, 0, {}, 600 + accepted);
    const auto t = coupling_time(cf.path.values, rec.values);
    REQUIRE(t.has_value());
    CHECK_FALSE(first_exactness_violation(m, cf.path).has_value());
  }
  CHECK(accepted == 100);
}

TEST_CASE("coupling report conventions") {
  const TmaModel m = testutil::eq31();
  const std::vector<std::vector<double>> same{{2.0}, {2.0}};
  const CouplingReport r0 = coupling_check(m, 200, same, 9);
  REQUIRE(r0.pairs.size() == 1);
  REQUIRE(r0.pairs[0].time.has_value());
  CHECK(*r0.pairs[0].time == 0);

  const std::vector<std::vector<double>> far{{10.0}, {-10.0}};
  const CouplingReport r1 = coupling_check(m, 10'000, far, 9);
  REQUIRE(r1.pairs[0].time.has_value());
  CHECK(*r1.pairs[0].time > 0);
  CHECK(r1.all_coupled());

  // regimes identical: the init never matters, coupling time 0 <= d + q
  const TmaModel lin = testutil::linear_ma({0.4});
  const std::vector<std::vector<double>> inits{{5.0}, {-5.0}};
  const CouplingReport r2 = coupling_check(lin, 500, inits, 9);
  CHECK(*r2.pairs[0].time <= static_cast<std::size_t>(lin.d) + lin.q());

  CHECK_THROWS_AS(coupling_check(m, 100, {{1.0}}, 9), std::invalid_argument);
}

TEST_CASE("closed-form paths satisfy the indicator identity 1(y<=r) = alpha") {
  auto check_identity = [](const TmaModel& m, const SeriesPath& p) {
    const std::size_t d = static_cast<std::size_t>(m.d);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      const double lag = i >= d ? p.values[i - d] : p.pre_values[i];
      CHECK(static_cast<int>(p.alpha[i]) == (lag <= m.r ? 1 : 0));
    }
  };
  for (const TmaModel& m : {testutil::ex31(), testutil::ex32(), testutil::eq31()}) {
    check_identity(m, simulate_closed_form(m, 4000, 57).path);
  }
  auto rng = substream_rng(97, 0);
  int accepted = 0;
  int attempts = 0;
  while (accepted < 20 && attempts < 200) {
    ++attempts;
    const TmaModel m = testutil::random_model(rng);
    const DeltaEstimate delta = contraction_delta(m, 100'000, 91);
    if (delta.upper(3.0) >= 0.99) continue;
    ++accepted;
    ClosedFormOptions opts;
    opts.delta = delta;
    check_identity(m, simulate_closed_form(m, 1000, 91, opts).path);
  }
  CHECK(accepted == 20);
}

TEST_CASE("path alpha agrees with the per-index series evaluation") {
  const TmaModel m = testutil::ex31();
  const std::size_t n = 2000;
  const ClosedFormResult cf = simulate_closed_form(m, n, 73);
  const std::size_t K = cf.truncation_k;
  // same seed, deep enough history for standalone series evaluations
  const long lo = -static_cast<long>(K * m.d + m.q()) - 4;
  const InnovationBlock block(m.innovation, lo, static_cast<long>(n), 73);
  std::vector<double> innov;
  for (long i = block.lo(); i <= static_cast<long>(n); ++i) innov.push_back(block[i]);
  std::size_t compared = 0;
  for (std::size_t t = 100; t + m.d <= n; t += 97) {
    // alpha used by y_{t+d} is alpha_t
    const std::size_t pos = static_cast<std::size_t>(static_cast<long>(t) - block.lo());
    const AlphaEntry e = alpha_series_entry(m, innov, pos, K);
    if (!e.terminated) continue;  // truncation-exact entries only
    CHECK(e.value == static_cast<int>(cf.path.alpha[t + m.d - 1]));
    ++compared;
  }
  CHECK(compared >= 15);
}

TEST_CASE("closed-form regime fraction matches the stationary probability") {
  // fraction of alpha = 1 estimates delta0 = P(y <= r)
  const ClosedFormResult cf = simulate_closed_form(testutil::ex31(), 1'000'000, 13);
  std::vector<double> ind(cf.path.alpha.size());
  for (std::size_t i = 0; i < ind.size(); ++i) ind[i] = cf.path.alpha[i];
  const BatchStat frac = batch_statistic(
      std::span<const double>(ind), [](std::span<const double> v) {
        return std::accumulate(v.begin(), v.end(), 0.0) /
               static_cast<double>(v.size());
      });
  CHECK(std::abs(frac.value - 0.4569265040100385) <= 3.0 * frac.se);
}

TEST_CASE("truncation residual obeys the analytic tail bound") {
  for (const TmaModel& m : {testutil::ex31(), testutil::ex32()}) {
    const DeltaEstimate delta = contraction_delta(m, 1'000'000, 23);
    const int sm = structural_m(m.d, m.q());
    const std::size_t K = default_truncation(sm, delta.value);
    const TruncationCheck tc = alpha_truncation_check(m, K, 50, 20'000, 23);
    CHECK(tc.p_hat <= alpha_tail_bound(sm, delta.value, K) + 3.0 * tc.se);
  }
  // sensitivity control: a hopeless truncation must show real mismatches
  const TruncationCheck shallow =
      alpha_truncation_check(testutil::eq31(), 1, 50, 5000, 23);
  CHECK(shallow.p_hat > 0.01);
}

TEST_CASE("stationarity smoke test: the two path halves agree in KS distance") {
  for (const TmaModel& m : {testutil::ex31(), testutil::eq31()}) {
    const std::size_t n = 200'000;
    const DeltaEstimate delta = contraction_delta(m, 1'000'000, 29);
    ClosedFormOptions opts;
    opts.delta = delta;
    const ClosedFormResult cf = simulate_closed_form(m, n, 29, opts);
    const std::span<const double> v(cf.path.values);
    const double ks = two_sample_ks(v.first(n / 2), v.subspan(n / 2));
    const int sm = structural_m(m.d, m.q());
    const double tau = static_cast<double>(m.q() + 1) +
                       (sm + 1.0) * m.d / std::max(1e-3, 1.0 - delta.value);
    const double n_eff = static_cast<double>(n / 2) / tau;
    CHECK(ks <= 2.0 * 1.36 * std::sqrt(2.0 / n_eff));
  }
}
