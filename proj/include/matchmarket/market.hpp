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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "matchmarket/bandit.hpp"
#include "matchmarket/core.hpp"
#include "matchmarket/rules.hpp"

namespace matchmarket {

enum class MatcherKind { GS, GreedyBalanced };

struct Scenario {
  MarketShape shape{1, 1};
  PreferenceTable true_prefs;  // mu, strict
  RuleRegime rule = ZeroRule{};
  double sigma2 = 1.0;
  double alpha = 3.0;
  int warm_start = 1;  // T_0 per pair
  long long horizon = 0;
  Side proposer_side = Side::Provider;
  MatcherKind matcher = MatcherKind::GS;
  RewardDist reward_dist = RewardDist::Gaussian;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Settlement {
  double cost = 0.0;
  double transfer = 0.0;
};

struct StepRecord {
  long long t = 0;
  std::uint64_t transient_digest = 0;  // FNV-1a over the nu_t tables
  Matching matching;
  std::vector<double> user_rewards, provider_rewards;          // X_t; 0 when unmatched
  std::vector<Settlement> user_settlements, provider_settlements;
  std::vector<double> user_payoffs, provider_payoffs;          // U_t; 0 when unmatched
  bool stable_under_transient = false;
  double welfare = 0.0;      // W_t under V(.,.;nu_t)
  double welfare_max = 0.0;  // best feasible matching under the same payoffs
};

struct Trace {
  Scenario scenario;
  std::vector<StepRecord> records;
  LearnerState final_learners;
};

// One pass of the matching process: update, report, match and observe, pay
// and transfer. Mutates the learner state and consumes reward draws from rng
// in a fixed order (matched pairs by provider index, user direction first).
StepRecord step(const Scenario& scenario, LearnerState& learners, std::mt19937_64& rng,
                long long t);

// Completes a step for an externally chosen matching: draws rewards, settles
// costs and transfers at nu_t, feeds observations back, and evaluates
// stability and welfare under V(.,.;nu_t). step() delegates here after
// running the configured matcher.
StepRecord settle_step(const Scenario& scenario, Matching matching, const PreferenceTable& nu,
                       LearnerState& learners, std::mt19937_64& rng, long long t);

// Warm start plus `horizon` steps, all driven by one generator seeded from
// scenario.seed. Bit-reproducible for a fixed seed on one platform.
Trace run(const Scenario& scenario);

}  // namespace matchmarket
