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
#include <random>

#include "doctest.h"
#include "matchmarket/market.hpp"
#include "matchmarket/scenario.hpp"
#include "matchmarket/stable.hpp"

using namespace matchmarket;

namespace {

Scenario small_scenario(RuleRegime rule, long long horizon, std::uint64_t seed) {
  std::mt19937_64 rng(99);
  Scenario sc;
  sc.shape = {3, 2};
  sc.true_prefs = random_prefs_rows(sc.shape, 0.05, 0.1, 0.9, rng);
  sc.rule = std::move(rule);
  sc.sigma2 = 0.25;
  sc.alpha = 3.0;
  sc.warm_start = 1;
  sc.horizon = horizon;
  sc.seed = seed;
  return sc;
}

bool traces_equal(const Trace& a, const Trace& b) {
  if (a.records.size() != b.records.size()) return false;
  for (size_t i = 0; i < a.records.size(); ++i) {
    const StepRecord& ra = a.records[i];
    const StepRecord& rb = b.records[i];
    if (!(ra.matching == rb.matching) || ra.transient_digest != rb.transient_digest ||
        ra.user_payoffs != rb.user_payoffs || ra.provider_payoffs != rb.provider_payoffs ||
        ra.welfare != rb.welfare || ra.welfare_max != rb.welfare_max ||
        ra.stable_under_transient != rb.stable_under_transient)
      return false;
  }
  return a.final_learners == b.final_learners;
}

}  // namespace

TEST_CASE("1x1 market: forced matching, stable at every step") {
  Scenario sc;
  sc.shape = {1, 1};
  sc.true_prefs = PreferenceTable(sc.shape);
  sc.true_prefs.set_user_pref(0, 0, 0.6);
  sc.true_prefs.set_provider_pref(0, 0, 0.4);
  sc.horizon = 25;
  sc.sigma2 = 0.25;
  sc.seed = 3;
  for (RuleRegime rule :
       {RuleRegime{ZeroRule{}}, RuleRegime{BalancedRule{}}, RuleRegime{ProportionalRule{0.5}}}) {
    sc.rule = rule;
    Trace trace = run(sc);
    REQUIRE(trace.records.size() == 25);
    for (const StepRecord& rec : trace.records) {
      CHECK(rec.matching == Matching({0}, 1));
      CHECK(rec.stable_under_transient);
      CHECK(rec.welfare == rec.welfare_max);
    }
  }
}

TEST_CASE("identical seeds give identical traces") {
  Scenario sc = small_scenario(BalancedRule{}, 120, 77);
  CHECK(traces_equal(run(sc), run(sc)));
}

TEST_CASE("different seeds differ somewhere") {
  Scenario a = small_scenario(ZeroRule{}, 120, 1);
  Scenario b = small_scenario(ZeroRule{}, 120, 2);
  CHECK_FALSE(traces_equal(run(a), run(b)));
}

TEST_CASE("zero horizon: empty records, learners equal the warm start") {
  Scenario sc = small_scenario(ZeroRule{}, 0, 5);
  Trace trace = run(sc);
  CHECK(trace.records.empty());
  std::mt19937_64 rng(5);
  LearnerState warm = init_warm_start(sc.shape, sc.sigma2, sc.alpha, sc.warm_start, sc.true_prefs,
                                      sc.reward_dist, rng);
  CHECK(trace.final_learners == warm);
}

TEST_CASE("final counts account for warm start plus one pair per provider per step") {
  Scenario sc = small_scenario(ZeroRule{}, 200, 11);
  sc.warm_start = 3;
  Trace trace = run(sc);
  long long n = sc.shape.n_users, l = sc.shape.n_providers;
  CHECK(trace.final_learners.total_count() == 2 * (3 * n * l + sc.horizon * l));
}

TEST_CASE("count symmetry holds after a run") {
  Scenario sc = small_scenario(BalancedRule{}, 150, 13);
  Trace trace = run(sc);
  for (int u = 0; u < sc.shape.n_users; ++u)
    for (int p = 0; p < sc.shape.n_providers; ++p)
      CHECK(trace.final_learners.count(user(u), provider(p)) ==
            trace.final_learners.count(provider(p), user(u)));
}

TEST_CASE("per-step transfers net to zero exactly and payoffs decompose") {
  for (RuleRegime rule : {RuleRegime{BalancedRule{}},
                          RuleRegime{PricingRule{0.0, -2.0, {2.0, 0.0}}}}) {
    Scenario sc = small_scenario(rule, 60, 17);
    Trace trace = run(sc);
    for (const StepRecord& rec : trace.records) {
      double net = 0.0;
      for (const Settlement& s : rec.user_settlements) net += s.transfer;
      for (const Settlement& s : rec.provider_settlements) net += s.transfer;
      CHECK(net == 0.0);
      for (int p = 0; p < sc.shape.n_providers; ++p) {
        int u = rec.matching.user_of(p);
        CHECK(rec.user_payoffs[static_cast<size_t>(u)] ==
              rec.user_rewards[static_cast<size_t>(u)] -
                  rec.user_settlements[static_cast<size_t>(u)].cost +
                  rec.user_settlements[static_cast<size_t>(u)].transfer);
      }
      for (int u = 0; u < sc.shape.n_users; ++u)
        if (rec.matching.provider_of(u) == Matching::kUnmatched)
          CHECK(rec.user_payoffs[static_cast<size_t>(u)] == 0.0);
    }
  }
}

TEST_CASE("incentive compatibility: GS matcher keeps every step stable over a long run") {
  ScenarioFile sf = example1_preset();
  Scenario sc = sf.scenario;
  sc.horizon = 10000;
  sc.seed = 4;
  Trace trace = run(sc);
  long long stable_steps = 0;
  for (const StepRecord& rec : trace.records) stable_steps += rec.stable_under_transient ? 1 : 0;
  CHECK(stable_steps == sc.horizon);
}

TEST_CASE("balanced welfare: per-pair symmetric route gives the same sum exactly") {
  Scenario sc = small_scenario(BalancedRule{}, 80, 23);
  Trace trace = run(sc);
  std::mt19937_64 rng(sc.seed);
  LearnerState learners = init_warm_start(sc.shape, sc.sigma2, sc.alpha, sc.warm_start,
                                          sc.true_prefs, sc.reward_dist, rng);
  for (long long t = 1; t <= sc.horizon; ++t) {
    PreferenceTable nu = learners.transient_prefs(t);
    PayoffTable v = payoff_table(sc.rule, nu);
    StepRecord rec = step(sc, learners, rng, t);
    // V(u,p) = V(p,u) under the balanced rule, so W_t = 2 * sum of the
    // matched user-direction payoffs, summed in the same provider order.
    double twice_user_side = 0.0;
    for (int p = 0; p < sc.shape.n_providers; ++p) {
      double vu = v.user_pref(rec.matching.user_of(p), p);
      twice_user_side += vu + vu;
    }
    CHECK(rec.welfare == twice_user_side);
    CHECK(rec.welfare <= rec.welfare_max + 1e-12);
  }
}

TEST_CASE("gamma = 1: chosen matchings settle to zero welfare and zero payoff table") {
  Scenario sc = small_scenario(ProportionalRule{1.0}, 0, 29);
  sc.horizon = 10;
  std::mt19937_64 rng(sc.seed);
  LearnerState learners = init_warm_start(sc.shape, sc.sigma2, sc.alpha, sc.warm_start,
                                          sc.true_prefs, sc.reward_dist, rng);
  for (long long t = 1; t <= sc.horizon; ++t) {
    PreferenceTable nu = learners.transient_prefs(t);
    StepRecord rec = settle_step(sc, Matching({0, 1}, 3), nu, learners, rng, t);
    CHECK(rec.welfare == 0.0);
    CHECK(rec.welfare_max == 0.0);
    CHECK(rec.stable_under_transient);
    // U_t = X_t - nu_t(a, match): generally nonzero even though V is zero.
    CHECK(rec.user_settlements[0].cost == nu.user_pref(0, 0));
  }
}

TEST_CASE("gamma = 1 with the GS matcher aborts on the all-tied payoff table") {
  Scenario sc = small_scenario(ProportionalRule{1.0}, 5, 31);
  CHECK_THROWS_AS(run(sc), tie_error);
}

TEST_CASE("greedy matcher matches GS on balanced payoffs step by step") {
  Scenario gs_sc = small_scenario(BalancedRule{}, 100, 37);
  Scenario greedy_sc = gs_sc;
  greedy_sc.matcher = MatcherKind::GreedyBalanced;
  Trace a = run(gs_sc);
  Trace b = run(greedy_sc);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].matching == b.records[i].matching);
}

TEST_CASE("greedy matcher demands the balanced rule") {
  Scenario sc = small_scenario(ZeroRule{}, 5, 41);
  sc.matcher = MatcherKind::GreedyBalanced;
  CHECK_THROWS_AS(run(sc), parameter_error);
}

TEST_CASE("scenario validation rejects tied true preferences") {
  Scenario sc = small_scenario(ZeroRule{}, 5, 43);
  sc.true_prefs.set_user_pref(0, 0, sc.true_prefs.user_pref(0, 1));
  CHECK_THROWS_AS(run(sc), tie_error);
}
