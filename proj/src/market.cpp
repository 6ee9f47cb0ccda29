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

#include "matchmarket/market.hpp"

#include <bit>
#include <cstring>

#include "matchmarket/stable.hpp"

namespace matchmarket {

void Scenario::validate() const {
  shape.validate();
  validate_rule(rule, shape);
  if (true_prefs.shape() != shape) throw parameter_error("true preferences sized to a different shape");
  if (!true_prefs.all_finite()) throw parameter_error("true preferences must be finite");
  std::string tied = true_prefs.find_tied_row();
  if (!tied.empty()) throw tie_error("true preferences have tied entries in row of " + tied);
  if (!(alpha > 2.0)) throw parameter_error("alpha must exceed 2");
  if (!(sigma2 >= 0.0)) throw parameter_error("sigma2 must be nonnegative");
  if (warm_start < 1) throw parameter_error("warm_start must be a positive integer");
  if (horizon < 0) throw parameter_error("horizon must be nonnegative");
  if (matcher == MatcherKind::GreedyBalanced && !std::holds_alternative<BalancedRule>(rule))
    throw parameter_error("the greedy matcher is only valid with the balanced rule");
}

namespace {

std::uint64_t fnv1a_tables(const PreferenceTable& t) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  const MarketShape& s = t.shape();
  for (int u = 0; u < s.n_users; ++u)
    for (int p = 0; p < s.n_providers; ++p) mix(t.user_pref(u, p));
  for (int p = 0; p < s.n_providers; ++p)
    for (int u = 0; u < s.n_users; ++u) mix(t.provider_pref(p, u));
  return h;
}

}  // namespace

StepRecord step(const Scenario& scenario, LearnerState& learners, std::mt19937_64& rng,
                long long t) {
  PreferenceTable nu = learners.transient_prefs(t);
  Matching m = scenario.matcher == MatcherKind::GS
                   ? gs_propose(payoff_table(scenario.rule, nu), scenario.proposer_side)
                   : greedy_balanced(nu);
  return settle_step(scenario, std::move(m), nu, learners, rng, t);
}

StepRecord settle_step(const Scenario& scenario, Matching matching, const PreferenceTable& nu,
                       LearnerState& learners, std::mt19937_64& rng, long long t) {
  const MarketShape& shape = scenario.shape;
  StepRecord rec;
  rec.t = t;
  rec.transient_digest = fnv1a_tables(nu);
  PayoffTable v = payoff_table(scenario.rule, nu);
  rec.matching = std::move(matching);

  // Observe: independent draws for the two directions of each matched pair,
  // in provider-index order, user direction first.
  rec.user_rewards.assign(static_cast<size_t>(shape.n_users), 0.0);
  rec.provider_rewards.assign(static_cast<size_t>(shape.n_providers), 0.0);
  RewardSampler sampler(scenario.reward_dist, scenario.sigma2);
  for (int p = 0; p < shape.n_providers; ++p) {
    int u = rec.matching.user_of(p);
    rec.user_rewards[static_cast<size_t>(u)] = sampler.draw(rng, scenario.true_prefs.user_pref(u, p));
    rec.provider_rewards[static_cast<size_t>(p)] =
        sampler.draw(rng, scenario.true_prefs.provider_pref(p, u));
  }

  // (d) Pay and transfer, evaluated at nu_t.
  rec.user_settlements.assign(static_cast<size_t>(shape.n_users), Settlement{});
  rec.provider_settlements.assign(static_cast<size_t>(shape.n_providers), Settlement{});
  rec.user_payoffs.assign(static_cast<size_t>(shape.n_users), 0.0);
  rec.provider_payoffs.assign(static_cast<size_t>(shape.n_providers), 0.0);
  for (int p = 0; p < shape.n_providers; ++p) {
    int u = rec.matching.user_of(p);
    Settlement su{cost(scenario.rule, nu, user(u), provider(p)),
                  transfer(scenario.rule, nu, user(u), provider(p))};
    Settlement sp{cost(scenario.rule, nu, provider(p), user(u)),
                  transfer(scenario.rule, nu, provider(p), user(u))};
    rec.user_settlements[static_cast<size_t>(u)] = su;
    rec.provider_settlements[static_cast<size_t>(p)] = sp;
    rec.user_payoffs[static_cast<size_t>(u)] =
        rec.user_rewards[static_cast<size_t>(u)] - su.cost + su.transfer;
    rec.provider_payoffs[static_cast<size_t>(p)] =
        rec.provider_rewards[static_cast<size_t>(p)] - sp.cost + sp.transfer;
  }

  // Feed the rewards back into the learners; both directions of a matched
  // pair advance together, keeping counts symmetric.
  for (int p = 0; p < shape.n_providers; ++p) {
    int u = rec.matching.user_of(p);
    learners.observe(user(u), provider(p), rec.user_rewards[static_cast<size_t>(u)]);
    learners.observe(provider(p), user(u), rec.provider_rewards[static_cast<size_t>(p)]);
  }

  rec.stable_under_transient = !blocking_pair(rec.matching, v).has_value();

  // Welfare under the transient payoffs; one canonical summation order.
  double welfare = 0.0;
  std::vector<double> pair_welfare(static_cast<size_t>(shape.n_users) * shape.n_providers);
  for (int u = 0; u < shape.n_users; ++u)
    for (int p = 0; p < shape.n_providers; ++p)
      pair_welfare[static_cast<size_t>(u) * shape.n_providers + p] =
          v.user_pref(u, p) + v.provider_pref(p, u);
  for (int p = 0; p < shape.n_providers; ++p) {
    int u = rec.matching.user_of(p);
    welfare += pair_welfare[static_cast<size_t>(u) * shape.n_providers + p];
  }
  rec.welfare = welfare;
  Matching best = max_weight_assignment(shape, pair_welfare);
  double best_welfare = 0.0;
  for (int p = 0; p < shape.n_providers; ++p)
    best_welfare += pair_welfare[static_cast<size_t>(best.user_of(p)) * shape.n_providers + p];
  rec.welfare_max = best_welfare;

  return rec;
}

Trace run(const Scenario& scenario) {
  scenario.validate();
  std::mt19937_64 rng(scenario.seed);
  Trace trace;
  trace.scenario = scenario;
  LearnerState learners = init_warm_start(scenario.shape, scenario.sigma2, scenario.alpha,
                                          scenario.warm_start, scenario.true_prefs,
                                          scenario.reward_dist, rng);
  trace.records.reserve(static_cast<size_t>(scenario.horizon));
  for (long long t = 1; t <= scenario.horizon; ++t)
    trace.records.push_back(step(scenario, learners, rng, t));
  trace.final_learners = std::move(learners);
  return trace;
}

}  // namespace matchmarket
