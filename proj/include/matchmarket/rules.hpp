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

#include <variant>
#include <vector>

#include "matchmarket/core.hpp"

namespace matchmarket {

// The four cost/transfer regimes the platform can put in force.
struct ZeroRule {};

struct ProportionalRule {
  double gamma;  // in [0, 1]
};

struct BalancedRule {};

// Side-constant costs plus a provider-indexed price paid by the user to the
// provider; g is constant across users and information states.
struct PricingRule {
  double c1;              // provider-side cost
  double c2;              // user-side cost
  std::vector<double> g;  // price of provider p_k, indexed by k
};

using RuleRegime = std::variant<ZeroRule, ProportionalRule, BalancedRule, PricingRule>;

void validate_rule(const RuleRegime& rule, const MarketShape& shape);
std::string rule_name(const RuleRegime& rule);

// Cost the agent a incurs when matched to b under preferences psi.
// Zero/Balanced -> 0; Proportional -> gamma * psi(a,b); Pricing -> c1 for
// providers, c2 for users. Always 0 when b is absent.
double cost(const RuleRegime& rule, const PreferenceTable& psi, AgentId a, const OptAgent& b);

// Transfer a receives from b when matched. Antisymmetric across the two
// directions of every pair, exactly, for every rule.
double transfer(const RuleRegime& rule, const PreferenceTable& psi, AgentId a, const OptAgent& b);

// V(a, b; psi) = psi(a,b) - cost + transfer; 0 when b is absent.
// The balanced rule is evaluated in the symmetric form (psi(a,b)+psi(b,a))/2
// with a fixed operand order so that V(a,b) == V(b,a) holds bit-exactly.
double payoff(const RuleRegime& rule, const PreferenceTable& psi, AgentId a, const OptAgent& b);

// V evaluated on every ordered pair.
PayoffTable payoff_table(const RuleRegime& rule, const PreferenceTable& psi);

// Explicit uniqueness-forcing pricing construction: c1 = 0, c2 = 2B(1-L),
// g(p_k) = 2B(L-k) with k the 1-based position of p in `ordering`. Under any
// true preferences bounded by B the induced user payoffs share one ordinal
// ranking of providers, which forces a unique stable matching.
struct PricingParams {
  double B;
  double c1;
  double c2;
  std::vector<double> g;
};

PricingParams pricing_defaults(double B, int n_providers, const std::vector<int>& ordering);
PricingParams pricing_defaults(double B, int n_providers);  // natural index order

}  // namespace matchmarket
