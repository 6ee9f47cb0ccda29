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

#include "matchmarket/core.hpp"

#include <cmath>

namespace matchmarket {

double PreferenceTable::at(AgentId a, AgentId b) const {
  if (a.side == b.side) throw invalid_pair_error("preference queried for a same-side pair");
  return a.side == Side::User ? user_pref(a.index, b.index) : provider_pref(a.index, b.index);
}

std::span<const double> PreferenceTable::row(AgentId a) const {
  if (a.side == Side::User)
    return {user_rows_.data() + idx_u(a.index, 0), static_cast<size_t>(shape_.n_providers)};
  return {provider_rows_.data() + idx_p(a.index, 0), static_cast<size_t>(shape_.n_users)};
}

bool PreferenceTable::all_finite() const {
  for (double v : user_rows_)
    if (!std::isfinite(v)) return false;
  for (double v : provider_rows_)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {
bool row_strict(std::span<const double> r) {
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = i + 1; j < r.size(); ++j)
      if (r[i] == r[j]) return false;
  return true;
}
}  // namespace

bool PreferenceTable::rows_strict() const { return find_tied_row().empty(); }

std::string PreferenceTable::find_tied_row() const {
  for (int u = 0; u < shape_.n_users; ++u)
    if (!row_strict(row(user(u)))) return "user u" + std::to_string(u + 1);
  for (int p = 0; p < shape_.n_providers; ++p)
    if (!row_strict(row(provider(p)))) return "provider p" + std::to_string(p + 1);
  return {};
}

Matching::Matching(std::vector<int> provider_to_user, int n_users)
    : provider_to_user_(std::move(provider_to_user)), n_users_(n_users) {
  user_to_provider_.assign(static_cast<size_t>(n_users_), kUnmatched);
  feasible_ = true;
  for (int p = 0; p < n_providers(); ++p) {
    int u = provider_to_user_[static_cast<size_t>(p)];
    if (u < 0 || u >= n_users_ || user_to_provider_[static_cast<size_t>(u)] != kUnmatched) {
      feasible_ = false;
      break;
    }
    user_to_provider_[static_cast<size_t>(u)] = p;
  }
  if (!feasible_) user_to_provider_.clear();
}

int Matching::provider_of(int u) const {
  if (!feasible_) throw precondition_error("provider_of on an infeasible matching");
  return user_to_provider_[static_cast<size_t>(u)];
}

OptAgent Matching::partner(AgentId a) const {
  if (a.side == Side::Provider) return user(user_of(a.index));
  int p = provider_of(a.index);
  if (p == kUnmatched) return std::nullopt;
  return provider(p);
}

std::string Matching::to_string() const {
  std::string s;
  for (int p = 0; p < n_providers(); ++p) {
    if (p > 0) s += '-';
    s += std::to_string(user_of(p) + 1);
  }
  return s;
}

std::vector<std::string> feasibility_check(const Matching& m, const MarketShape& shape) {
  std::vector<std::string> violations;
  if (m.n_providers() != shape.n_providers) {
    violations.push_back("provider_to_user has length " + std::to_string(m.n_providers()) +
                         ", expected " + std::to_string(shape.n_providers));
    return violations;
  }
  std::vector<int> seen_by(static_cast<size_t>(shape.n_users), -1);
  for (int p = 0; p < shape.n_providers; ++p) {
    int u = m.user_of(p);
    if (u < 0 || u >= shape.n_users) {
      violations.push_back("provider p" + std::to_string(p + 1) + " assigned out-of-range user index " +
                           std::to_string(u));
      continue;
    }
    if (seen_by[static_cast<size_t>(u)] >= 0) {
      violations.push_back("user u" + std::to_string(u + 1) + " matched twice (p" +
                           std::to_string(seen_by[static_cast<size_t>(u)] + 1) + " and p" +
                           std::to_string(p + 1) + ")");
    } else {
      seen_by[static_cast<size_t>(u)] = p;
    }
  }
  return violations;
}

std::optional<std::pair<int, int>> blocking_pair(const Matching& m, const PayoffTable& payoffs) {
  const MarketShape& shape = payoffs.shape();
  if (!m.feasible() || !feasibility_check(m, shape).empty())
    throw precondition_error("blocking_pair requires a feasible matching");
  for (int u = 0; u < shape.n_users; ++u) {
    int pu = m.provider_of(u);
    double v_current = pu == Matching::kUnmatched ? 0.0 : payoffs.user_pref(u, pu);
    for (int p = 0; p < shape.n_providers; ++p) {
      if (p == pu) continue;
      if (payoffs.user_pref(u, p) > v_current &&
          payoffs.provider_pref(p, u) > payoffs.provider_pref(p, m.user_of(p)))
        return std::make_pair(u, p);
    }
  }
  return std::nullopt;
}

int rank(const PreferenceTable& prefs, AgentId a, AgentId b) {
  if (a.side == b.side) throw invalid_pair_error("rank queried for a same-side pair");
  auto r = prefs.row(a);
  if (!row_strict(r)) throw tie_error("rank is ambiguous: tied entries in the agent's row");
  double vb = r[static_cast<size_t>(b.index)];
  int above = 0;
  for (double v : r)
    if (v > vb) ++above;
  return 1 + above;
}

}  // namespace matchmarket
