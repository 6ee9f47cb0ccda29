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

#include <optional>
#include <string>
#include <vector>

#include "matchmarket/market.hpp"
#include "matchmarket/rules.hpp"
#include "matchmarket/stable.hpp"

namespace matchmarket {

// Gap quantities of an instance. Minima and maxima range over counterparts
// plus the unmatched option (value 0), following the paper's A+ domains.
struct GapStats {
  double delta_min = 0.0;  // min gap within any mu row, incl. vs 0
  std::vector<double> delta_max_user, delta_max_provider;  // spread of each mu row, incl. 0
  PreferenceTable rho;     // rho(a,b) = (mu(a,b) + mu(b,a)) / 2
  double delta_rho_min = 0.0;
  bool rho_pairwise_unique = false;
  std::optional<Matching> rho_stable;  // the unique stable matching under rho, when unique
  std::vector<double> delta_rho_max_star_user, delta_rho_max_star_provider;
  // Pricing block, filled by augment_pricing_gaps.
  std::optional<double> pricing_bound_B;
  std::optional<Matching> pricing_stable;
  std::vector<double> delta_b_max_star_user, delta_b_max_star_provider;
};

GapStats compute_gap_stats(const PreferenceTable& mu);
void augment_pricing_gaps(GapStats& gaps, const PreferenceTable& mu, const PricingParams& pricing);

// Expected observed payoff of the pair under the rule, with the UCB-bonus
// terms dropped (they cancel for the balanced rule under symmetric counts
// and are absent for the zero and pricing rules). Equals V(a, b; mu).
double expected_true_payoff(const RuleRegime& rule, const PreferenceTable& mu, AgentId a,
                            const OptAgent& b);

// Per-agent optimal and pessimal matchings within the stable set under true
// payoffs. Ties resolved toward the canonically-first matching.
struct ExtremalMatchings {
  StableSet stable;  // S(V(.,.;mu))
  std::vector<Matching> optimal_user, pessimal_user;
  std::vector<Matching> optimal_provider, pessimal_provider;

  const Matching& optimal(AgentId a) const;
  const Matching& pessimal(AgentId a) const;
};

ExtremalMatchings extremal_matchings(const PreferenceTable& mu, const RuleRegime& rule,
                                     long long budget = 10'000'000);

// Cumulative true-mean regret per agent, sampled at checkpoint horizons and
// averaged across traces (seeds).
struct RegretCurves {
  std::vector<long long> checkpoints;
  // [agent][checkpoint]; users first then providers, paper order.
  std::vector<std::vector<double>> optimal_user, pessimal_user;
  std::vector<std::vector<double>> optimal_provider, pessimal_provider;
  // Largest possible single-step optimal-regret increment per agent; the
  // magnitude anchor for growth classification.
  std::vector<double> step_scale_user, step_scale_provider;
};

RegretCurves regret_curves(const std::vector<Trace>& traces, const ExtremalMatchings& extremal,
                           const RuleRegime& rule, const PreferenceTable& mu,
                           const std::vector<long long>& checkpoints);

enum class BoundKind { Prop1Pessimal, Thm1, Thm2 };

// Closed-form regret bounds, one value per agent (users then providers).
// Throws tie_error when the required gap is zero.
std::vector<double> theoretical_bound(BoundKind kind, const GapStats& gaps,
                                      const MarketShape& shape, double sigma2, double alpha,
                                      long long horizon);
// Same formulas with log(T) supplied directly.
std::vector<double> theoretical_bound_logt(BoundKind kind, const GapStats& gaps,
                                           const MarketShape& shape, double sigma2, double alpha,
                                           double log_horizon);

struct WelfareRatios {
  std::vector<double> ratio;  // W_t / W_max per step; 0/0 reported as 1
  int degenerate_steps = 0;   // steps with W_t == 0 (low welfare by definition)
  double min_ratio = 1.0;
};

WelfareRatios welfare_ratio_series(const Trace& trace);

// Finite-horizon growth verdict for a cumulative curve; a desk-scale proxy
// for the O(log T) / omega(log T) fairness split, explicitly heuristic.
//
// Requires >= 4 checkpoints. When `step_scale` (the largest possible
// per-step increment) is known, slopes are judged against it: least-squares
// slope <= 2% of scale reads Logarithmic, >= 5% with persistent late growth
// reads Linear. Without a scale, the log- and linear-fit residuals decide.
enum class Growth { Logarithmic, Linear, Indeterminate };

std::string growth_name(Growth g);

struct CurvePoint {
  double horizon;
  double value;
};

Growth growth_classifier(const std::vector<CurvePoint>& curve,
                         std::optional<double> step_scale = std::nullopt);

// Default checkpoint grid: `points` geometrically spaced horizons ending at T.
std::vector<long long> geometric_checkpoints(long long horizon, int points = 8);

}  // namespace matchmarket
