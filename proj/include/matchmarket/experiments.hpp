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

#include <string>
#include <vector>

#include "matchmarket/metrics.hpp"
#include "matchmarket/scenario.hpp"

namespace matchmarket {

// Parallelism cap for batch runs: MATCHMARKET_THREADS when set, otherwise
// the hardware concurrency.
int thread_cap();

// One trace per seed, in seed order; parallel across seeds, each run driven
// by its own generator.
std::vector<Trace> run_batch(const Scenario& base, const std::vector<std::uint64_t>& seeds);

// Regret curves plus growth verdicts for a batch of traces.
struct RegretReport {
  RegretCurves curves;
  std::vector<Growth> optimal_verdict_user, optimal_verdict_provider;
  std::vector<Growth> pessimal_verdict_user, pessimal_verdict_provider;
};

RegretReport build_regret_report(const std::vector<Trace>& traces, const RuleRegime& rule,
                                 const PreferenceTable& mu,
                                 const std::vector<long long>& checkpoints);

// The three closed-form bounds for an instance; a bound that does not apply
// (tied gaps, no unique stable matching) carries a reason instead of values.
struct BoundsReport {
  GapStats gaps;
  double pricing_B = 0.0;  // bound used for the Thm-2 column
  std::vector<double> prop1_pessimal, thm1, thm2;  // empty when unavailable
  std::string thm1_reason, thm2_reason;
};

BoundsReport compute_bounds_report(const ScenarioFile& sf, long long horizon);

// simulate: run the batch, write trace_seed<seed>.csv per seed plus
// summary.json under out_dir. Returns the summary JSON text.
std::string run_simulate(const ScenarioFile& sf, const std::string& out_dir);

// enumerate: the stable set of the instance under its rule, canonical order.
std::string run_enumerate(const ScenarioFile& sf);

// bounds: gap statistics and the three bound columns as text.
std::string format_bounds(const ScenarioFile& sf, const BoundsReport& report, long long horizon);

// Zero-rule Example-1 batch: per-agent optimal regret at the checkpoints,
// growth verdicts, and the step accounting T(M1) + T(M2) vs unstable steps.
struct Example1Report {
  std::vector<long long> checkpoints;
  RegretReport regret;
  long long steps_m1 = 0, steps_m2 = 0, steps_other = 0, steps_unstable = 0, steps_total = 0;
};

Example1Report run_example1_linear(const ScenarioFile& sf);

// Full-cost (gamma = 1) adversarial scheduler: p1 pinned to u1, p2 matched
// uniformly at random among the remaining users, remaining providers filled
// in ascending index order. All matchings are stable at gamma = 1, so the
// schedule is incentive-compatible; payoff-space regret is degenerate there,
// so the report tracks reward-space regret against each agent's best
// feasible partner.
struct Prop3Report {
  std::vector<long long> checkpoints;
  std::vector<std::vector<double>> reward_regret_user, reward_regret_provider;  // seed means
  std::vector<double> step_scale_user, step_scale_provider;
  std::vector<Growth> verdict_user, verdict_provider;
  double max_abs_welfare = 0.0;  // max |W_t| over all steps and seeds
  long long unstable_steps = 0;
};

Prop3Report run_prop3_adversary(const ScenarioFile& sf);

std::string format_example1(const Example1Report& report);
std::string format_prop3(const Prop3Report& report);

}  // namespace matchmarket
