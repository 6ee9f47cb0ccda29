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

#include "matchmarket/rules.hpp"

#include <algorithm>

namespace matchmarket {

void validate_rule(const RuleRegime& rule, const MarketShape& shape) {
  if (const auto* prop = std::get_if<ProportionalRule>(&rule)) {
    if (!(prop->gamma >= 0.0 && prop->gamma <= 1.0))
      throw parameter_error("proportional rule requires gamma in [0, 1]");
  } else if (const auto* pricing = std::get_if<PricingRule>(&rule)) {
    if (static_cast<int>(pricing->g.size()) != shape.n_providers)
      throw parameter_error("pricing rule needs one price per provider");
  }
}

std::string rule_name(const RuleRegime& rule) {
  switch (rule.index()) {
    case 0: return "zero";
    case 1: return "proportional";
    case 2: return "balanced";
    default: return "pricing";
  }
}

namespace {
void require_pair(AgentId a, const OptAgent& b) {
  if (b && a.side == b->side) throw invalid_pair_error("cost/transfer queried for a same-side pair");
}
}  // namespace

double cost(const RuleRegime& rule, const PreferenceTable& psi, AgentId a, const OptAgent& b) {
  require_pair(a, b);
  if (!b) return 0.0;
  if (const auto* prop = std::get_if<ProportionalRule>(&rule)) return prop->gamma * psi.at(a, *b);
  if (const auto* pricing = std::get_if<PricingRule>(&rule))
    return a.side == Side::Provider ? pricing->c1 : pricing->c2;
  return 0.0;
}

double transfer(const RuleRegime& rule, const PreferenceTable& psi, AgentId a, const OptAgent& b) {
  require_pair(a, b);
  if (!b) return 0.0;
  if (std::holds_alternative<BalancedRule>(rule)) return 0.5 * (psi.at(*b, a) - psi.at(a, *b));
  if (const auto* pricing = std::get_if<PricingRule>(&rule)) {
    int p = a.side == Side::Provider ? a.index : b->index;
    double price = pricing->g[static_cast<size_t>(p)];
    return a.side == Side::Provider ? price : -price;
  }
  return 0.0;
}

double payoff(const RuleRegime& rule, const PreferenceTable& psi, AgentId a, const OptAgent& b) {
  require_pair(a, b);
  if (!b) return 0.0;
  if (std::holds_alternative<BalancedRule>(rule)) {
    // Fixed user-direction-first operand order so both directions of a pair
    // evaluate to the same double.
    AgentId u = a.side == Side::User ? a : *b;
    AgentId p = a.side == Side::User ? *b : a;
    return 0.5 * (psi.user_pref(u.index, p.index) + psi.provider_pref(p.index, u.index));
  }
  return psi.at(a, *b) - cost(rule, psi, a, b) + transfer(rule, psi, a, b);
}

PayoffTable payoff_table(const RuleRegime& rule, const PreferenceTable& psi) {
  const MarketShape& shape = psi.shape();
  PayoffTable v(shape);
  for (int u = 0; u < shape.n_users; ++u)
    for (int p = 0; p < shape.n_providers; ++p) {
      v.set_user_pref(u, p, payoff(rule, psi, user(u), provider(p)));
      v.set_provider_pref(p, u, payoff(rule, psi, provider(p), user(u)));
    }
  return v;
}

PricingParams pricing_defaults(double B, int n_providers, const std::vector<int>& ordering) {
  if (!(B > 0.0)) throw parameter_error("pricing_defaults requires B > 0");
  if (static_cast<int>(ordering.size()) != n_providers)
    throw parameter_error("pricing ordering must be a permutation of all providers");
  std::vector<bool> seen(static_cast<size_t>(n_providers), false);
  for (int p : ordering) {
    if (p < 0 || p >= n_providers || seen[static_cast<size_t>(p)])
      throw parameter_error("pricing ordering must be a permutation of all providers");
    seen[static_cast<size_t>(p)] = true;
  }
  PricingParams params;
  params.B = B;
  params.c1 = 0.0;
  params.c2 = 2.0 * B * (1.0 - n_providers);
  params.g.assign(static_cast<size_t>(n_providers), 0.0);
  for (int k = 1; k <= n_providers; ++k)
    params.g[static_cast<size_t>(ordering[static_cast<size_t>(k - 1)])] = 2.0 * B * (n_providers - k);
  return params;
}

PricingParams pricing_defaults(double B, int n_providers) {
  std::vector<int> natural(static_cast<size_t>(n_providers));
  for (int p = 0; p < n_providers; ++p) natural[static_cast<size_t>(p)] = p;
  return pricing_defaults(B, n_providers, natural);
}

}  // namespace matchmarket
