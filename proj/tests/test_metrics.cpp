// Copyright 2026 The Matchmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "matchmarket/experiments.hpp"
#include "matchmarket/metrics.hpp"
#include "matchmarket/scenario.hpp"

using namespace matchmarket;

TEST_CASE("gap stats on the Example-1 instance") {
  ScenarioFile sf = example1_preset();
  GapStats gaps = compute_gap_stats(sf.scenario.true_prefs);
  CHECK(gaps.delta_min == doctest::Approx(0.1));
  for (double d : gaps.delta_max_user) CHECK(d == doctest::Approx(0.3));
  for (double d : gaps.delta_max_provider) CHECK(d == doctest::Approx(0.3));
  // The {3,2,1}/10 cardinal choice produces tied rho values.
  CHECK_FALSE(gaps.rho_pairwise_unique);
  CHECK(gaps.delta_rho_min == doctest::Approx(0.0));
  CHECK(gaps.rho.user_pref(0, 0) == doctest::Approx(0.2));
  CHECK(gaps.rho.user_pref(0, 0) == gaps.rho.provider_pref(0, 0));
}

TEST_CASE("theoretical bounds: frozen closed-form values") {
  // Prop-1 pessimal with N=3, L=3, Delta_max = 1, sigma2 = 1, alpha = 3,
  // Delta_min = 0.1, log T = 1: 2*9*3*1*(8*3/0.01 + 3) = 129762.
  GapStats gaps;
  gaps.delta_min = 0.1;
  gaps.delta_max_user = {1.0, 1.0, 1.0};
  gaps.delta_max_provider = {1.0, 1.0, 1.0};
  auto prop1 = theoretical_bound_logt(BoundKind::Prop1Pessimal, gaps, {3, 3}, 1.0, 3.0, 1.0);
  REQUIRE(prop1.size() == 6);
  for (double b : prop1) CHECK(b == doctest::Approx(129762.0).epsilon(1e-12));

  // Thm-1 with Delta*_rho_max = 0.5, N = L = 2, sigma2 = 0.25, alpha = 4,
  // Delta_rho_min = 0.2, log T = 2: 0.5*4*2*(8*0.25*4*2/0.04 + 2) = 1608.
  GapStats g1;
  g1.delta_rho_min = 0.2;
  g1.rho_stable = Matching({0, 1}, 2);
  g1.delta_rho_max_star_user = {0.5, 0.5};
  g1.delta_rho_max_star_provider = {0.5, 0.5};
  auto thm1 = theoretical_bound_logt(BoundKind::Thm1, g1, {2, 2}, 0.25, 4.0, 2.0);
  for (double b : thm1) CHECK(b == doctest::Approx(1608.0).epsilon(1e-12));

  // A zero multiplicative factor nulls the bound.
  GapStats g0 = gaps;
  g0.delta_max_user = {0.0, 0.0, 0.0};
  g0.delta_max_provider = {0.0, 0.0, 0.0};
  auto zero = theoretical_bound_logt(BoundKind::Prop1Pessimal, g0, {3, 3}, 1.0, 3.0, 1.0);
  for (double b : zero) CHECK(b == 0.0);

  GapStats tied = gaps;
  tied.delta_min = 0.0;
  CHECK_THROWS_AS(theoretical_bound_logt(BoundKind::Prop1Pessimal, tied, {3, 3}, 1.0, 3.0, 1.0),
                  tie_error);
}

TEST_CASE("extremal matchings on Example 1 match the paper's table") {
  ScenarioFile sf = example1_preset();
  ExtremalMatchings ext = extremal_matchings(sf.scenario.true_prefs, sf.scenario.rule);
  Matching m1({1, 0, 2}, 3);
  Matching m2({2, 0, 1}, 3);
  REQUIRE(ext.stable.matchings.size() == 2);
  CHECK(ext.optimal(provider(0)) == m1);
  CHECK(ext.optimal(user(1)) == m2);
  CHECK(ext.optimal(user(2)) == m2);
  CHECK(ext.optimal(provider(2)) == m1);
  // u1 and p2 are matched to the same partner in both stable matchings.
  CHECK(ext.optimal(user(0)).partner(user(0)) == ext.pessimal(user(0)).partner(user(0)));
  CHECK(ext.pessimal(provider(0)) == m2);
}

TEST_CASE("Example-1 ordinals with pairwise-unique rho: singleton set, shared extremal") {
  // Alternative cardinal values realizing the Example-1 ordinal table whose
  // symmetrized preferences are pairwise-unique.
  PreferenceTable mu(MarketShape{3, 3});
  const double u_rows[3][3] = {{0.11, 0.23, 0.34}, {0.22, 0.13, 0.31}, {0.32, 0.21, 0.12}};
  const double p_rows[3][3] = {{0.33, 0.24, 0.145}, {0.35, 0.26, 0.17}, {0.15, 0.25, 0.36}};
  for (int u = 0; u < 3; ++u)
    for (int p = 0; p < 3; ++p) mu.set_user_pref(u, p, u_rows[u][p]);
  for (int p = 0; p < 3; ++p)
    for (int u = 0; u < 3; ++u) mu.set_provider_pref(p, u, p_rows[p][u]);
  // Same ordinal structure as the canonical instance.
  CHECK(rank(mu, user(1), provider(2)) == 1);
  CHECK(rank(mu, provider(0), user(0)) == 1);

  GapStats gaps = compute_gap_stats(mu);
  REQUIRE(gaps.rho_pairwise_unique);
  StableSet stable = enumerate_stable(payoff_table(BalancedRule{}, mu));
  CHECK(stable.matchings.size() == 1);
  ExtremalMatchings ext = extremal_matchings(mu, BalancedRule{});
  for (int u = 0; u < 3; ++u) {
    CHECK(ext.optimal(user(u)) == stable.matchings[0]);
    CHECK(ext.pessimal(user(u)) == stable.matchings[0]);
  }
  for (int p = 0; p < 3; ++p) CHECK(ext.optimal(provider(p)) == stable.matchings[0]);
}

TEST_CASE("unique stable set collapses optimal and pessimal") {
  std::mt19937_64 rng(15);
  PreferenceTable psi = random_prefs_rho_grid({3, 3}, 0.05, rng);
  ExtremalMatchings ext = extremal_matchings(psi, BalancedRule{});
  REQUIRE(ext.stable.matchings.size() == 1);
  for (int u = 0; u < 3; ++u) CHECK(ext.optimal(user(u)) == ext.pessimal(user(u)));
  for (int p = 0; p < 3; ++p) CHECK(ext.optimal(provider(p)) == ext.pessimal(provider(p)));
}

TEST_CASE("regret curves: optimal play has zero optimal regret, curves ordered") {
  ScenarioFile sf = example1_preset();
  Scenario sc = sf.scenario;
  sc.horizon = 64;
  sc.seed = 12;
  Trace trace = run(sc);
  ExtremalMatchings ext = extremal_matchings(sc.true_prefs, sc.rule);

  // Synthetic trace that always plays p1's optimal stable matching.
  Trace ideal = trace;
  for (StepRecord& rec : ideal.records) rec.matching = ext.optimal(provider(0));
  std::vector<long long> cp = {8, 16, 32, 64};
  RegretCurves curves = regret_curves({ideal}, ext, sc.rule, sc.true_prefs, cp);
  for (double v : curves.optimal_provider[0]) CHECK(v == doctest::Approx(0.0));

  RegretCurves real_curves = regret_curves({trace}, ext, sc.rule, sc.true_prefs, cp);
  for (int u = 0; u < 3; ++u)
    for (size_t k = 0; k < cp.size(); ++k)
      CHECK(real_curves.optimal_user[static_cast<size_t>(u)][k] >=
            real_curves.pessimal_user[static_cast<size_t>(u)][k] - 1e-12);
}

TEST_CASE("regret curves: Example-1 increments appear exactly on M2 steps for p1") {
  ScenarioFile sf = example1_preset();
  Scenario sc = sf.scenario;
  sc.horizon = 200;
  sc.seed = 19;
  Trace trace = run(sc);
  ExtremalMatchings ext = extremal_matchings(sc.true_prefs, sc.rule);
  Matching m2({2, 0, 1}, 3);
  long long m2_steps = 0;
  double other_regret = 0.0;
  for (const StepRecord& rec : trace.records) {
    if (rec.matching == m2)
      ++m2_steps;
    else if (!(rec.matching == ext.optimal(provider(0)))) {
      // steps outside {M1, M2} contribute mu(p1, u2) - mu(p1, assigned)
      other_regret += 0.2 - sc.true_prefs.provider_pref(0, rec.matching.user_of(0));
    }
  }
  RegretCurves curves =
      regret_curves({trace}, ext, sc.rule, sc.true_prefs, {sc.horizon});
  // mu(p1,u2) - mu(p1,u3) = 0.1 per M2 step, plus the off-stable-set steps.
  CHECK(curves.optimal_provider[0][0] ==
        doctest::Approx(0.1 * static_cast<double>(m2_steps) + other_regret));
}

TEST_CASE("regret curves: rule mismatch and bad checkpoints rejected") {
  ScenarioFile sf = example1_preset();
  Scenario sc = sf.scenario;
  sc.horizon = 16;
  Trace trace = run(sc);
  ExtremalMatchings ext = extremal_matchings(sc.true_prefs, sc.rule);
  CHECK_THROWS_AS(regret_curves({trace}, ext, BalancedRule{}, sc.true_prefs, {8}),
                  parameter_error);
  CHECK_THROWS_AS(regret_curves({trace}, ext, sc.rule, sc.true_prefs, {32}), parameter_error);
}

TEST_CASE("welfare ratios: balanced traces stay above one half; 1x1 is exactly 1") {
  std::mt19937_64 rng(23);
  Scenario sc;
  sc.shape = {3, 3};
  sc.true_prefs = random_prefs_rows(sc.shape, 0.05, 0.1, 0.9, rng);
  sc.rule = BalancedRule{};
  sc.sigma2 = 0.25;
  sc.horizon = 150;
  sc.seed = 8;
  WelfareRatios wr = welfare_ratio_series(run(sc));
  CHECK(wr.min_ratio >= 0.5);
  CHECK(wr.degenerate_steps == 0);

  Scenario one;
  one.shape = {1, 1};
  one.true_prefs = PreferenceTable(one.shape);
  one.true_prefs.set_user_pref(0, 0, 0.6);
  one.true_prefs.set_provider_pref(0, 0, 0.4);
  one.horizon = 20;
  one.seed = 2;
  WelfareRatios ratios_1x1 = welfare_ratio_series(run(one));
  for (double r : ratios_1x1.ratio) CHECK(r == 1.0);
}

TEST_CASE("welfare ratios: the gamma = 1 degenerate-zero flag") {
  Trace trace;
  trace.scenario.shape = {2, 2};
  StepRecord rec;
  rec.welfare = 0.0;
  rec.welfare_max = 0.0;
  trace.records.assign(5, rec);
  WelfareRatios wr = welfare_ratio_series(trace);
  CHECK(wr.degenerate_steps == 5);
  for (double r : wr.ratio) CHECK(r == 1.0);
}

TEST_CASE("growth classifier: the three synthetic shapes") {
  std::vector<CurvePoint> log_curve, lin_curve, const_curve;
  for (double h : {2000.0, 4000.0, 8000.0, 16000.0}) {
    log_curve.push_back({h, 5.0 * std::log(h)});
    lin_curve.push_back({h, 0.3 * h});
    const_curve.push_back({h, 7.25});
  }
  CHECK(growth_classifier(log_curve) == Growth::Logarithmic);
  CHECK(growth_classifier(lin_curve) == Growth::Linear);
  CHECK(growth_classifier(const_curve) == Growth::Logarithmic);
}

TEST_CASE("growth classifier: scale anchor separates slow drift from real growth") {
  // A drift of ~1% of the per-step scale reads Logarithmic even though its
  // shape is linear; the same shape at 50% of scale reads Linear.
  std::vector<CurvePoint> drift, strong;
  for (double h : {2000.0, 4000.0, 8000.0, 16000.0}) {
    drift.push_back({h, 0.001 * h - 12.0});
    strong.push_back({h, 0.1 * h});
  }
  CHECK(growth_classifier(drift, 0.1) == Growth::Logarithmic);
  CHECK(growth_classifier(strong, 0.2) == Growth::Linear);
}

TEST_CASE("growth classifier: input validation") {
  std::vector<CurvePoint> three = {{1, 0}, {2, 1}, {4, 2}};
  CHECK_THROWS_AS(growth_classifier(three), parameter_error);
  std::vector<CurvePoint> unsorted = {{4, 0}, {2, 1}, {8, 2}, {16, 3}};
  CHECK_THROWS_AS(growth_classifier(unsorted), parameter_error);
}

TEST_CASE("geometric checkpoints end at the horizon") {
  auto cp = geometric_checkpoints(16000, 8);
  REQUIRE(cp.size() == 8);
  CHECK(cp.front() == 125);
  CHECK(cp.back() == 16000);
  auto small = geometric_checkpoints(4, 8);
  CHECK(small.back() == 4);
}

TEST_CASE("proportional scaling: gamma 0 and 0.5 agree up to the (1-gamma) factor") {
  std::mt19937_64 rng(33);
  Scenario base;
  base.shape = {3, 3};
  base.true_prefs = random_prefs_rows(base.shape, 0.05, 0.1, 0.9, rng);
  base.sigma2 = 0.25;
  base.horizon = 400;
  base.seed = 21;
  base.rule = ProportionalRule{0.0};
  Scenario scaled = base;
  scaled.rule = ProportionalRule{0.5};

  Trace t0 = run(base);
  Trace t5 = run(scaled);
  std::vector<long long> cp = {50, 100, 200, 400};
  RegretCurves c0 = regret_curves({t0}, extremal_matchings(base.true_prefs, base.rule), base.rule,
                                  base.true_prefs, cp);
  RegretCurves c5 = regret_curves({t5}, extremal_matchings(scaled.true_prefs, scaled.rule),
                                  scaled.rule, scaled.true_prefs, cp);
  for (size_t i = 0; i < t0.records.size(); ++i)
    REQUIRE(t0.records[i].matching == t5.records[i].matching);
  for (int u = 0; u < 3; ++u)
    for (size_t k = 0; k < cp.size(); ++k) {
      double expected = 0.5 * c0.optimal_user[static_cast<size_t>(u)][k];
      CHECK(c5.optimal_user[static_cast<size_t>(u)][k] ==
            doctest::Approx(expected).epsilon(1e-9));
    }
}
