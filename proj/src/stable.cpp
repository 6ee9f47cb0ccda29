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

#include "matchmarket/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace matchmarket {

bool StableSet::contains(const Matching& m) const {
  return std::binary_search(matchings.begin(), matchings.end(), m);
}

namespace {

void require_strict(const PayoffTable& payoffs) {
  std::string tied = payoffs.find_tied_row();
  if (!tied.empty()) throw tie_error("ambiguous preferences: tied payoffs in row of " + tied);
}

// Counterpart indices of `a`, most preferred first.
std::vector<int> descending_prefs(const PayoffTable& payoffs, AgentId a) {
  auto r = payoffs.row(a);
  std::vector<int> order(r.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return r[static_cast<size_t>(i)] > r[static_cast<size_t>(j)]; });
  return order;
}

}  // namespace

Matching gs_propose(const PayoffTable& payoffs, Side proposer_side) {
  const MarketShape& shape = payoffs.shape();
  shape.validate();
  require_strict(payoffs);

  const int n_prop = shape.count(proposer_side);
  const int n_accept = shape.count(opposite(proposer_side));

  std::vector<std::vector<int>> queue(static_cast<size_t>(n_prop));
  for (int i = 0; i < n_prop; ++i)
    queue[static_cast<size_t>(i)] = descending_prefs(payoffs, {proposer_side, i});
  std::vector<size_t> next(static_cast<size_t>(n_prop), 0);

  std::vector<int> match_of_prop(static_cast<size_t>(n_prop), Matching::kUnmatched);
  std::vector<int> match_of_accept(static_cast<size_t>(n_accept), Matching::kUnmatched);

  auto accept_payoff = [&](int acceptor, int proposer) {
    return payoffs.at({opposite(proposer_side), acceptor}, AgentId{proposer_side, proposer});
  };

  while (true) {
    int proposer = -1;
    for (int i = 0; i < n_prop; ++i) {
      if (match_of_prop[static_cast<size_t>(i)] == Matching::kUnmatched &&
          next[static_cast<size_t>(i)] < queue[static_cast<size_t>(i)].size()) {
        proposer = i;
        break;
      }
    }
    if (proposer == -1) break;

    int acceptor = queue[static_cast<size_t>(proposer)][next[static_cast<size_t>(proposer)]++];
    int incumbent = match_of_accept[static_cast<size_t>(acceptor)];
    if (incumbent == Matching::kUnmatched) {
      match_of_accept[static_cast<size_t>(acceptor)] = proposer;
      match_of_prop[static_cast<size_t>(proposer)] = acceptor;
    } else if (accept_payoff(acceptor, proposer) > accept_payoff(acceptor, incumbent)) {
      match_of_prop[static_cast<size_t>(incumbent)] = Matching::kUnmatched;
      match_of_accept[static_cast<size_t>(acceptor)] = proposer;
      match_of_prop[static_cast<size_t>(proposer)] = acceptor;
    }
  }

  std::vector<int> provider_to_user(static_cast<size_t>(shape.n_providers));
  if (proposer_side == Side::Provider) {
    provider_to_user = match_of_prop;
  } else {
    for (int p = 0; p < shape.n_providers; ++p)
      provider_to_user[static_cast<size_t>(p)] = match_of_accept[static_cast<size_t>(p)];
  }
  return Matching(std::move(provider_to_user), shape.n_users);
}

Matching greedy_balanced(const PreferenceTable& psi) {
  const MarketShape& shape = psi.shape();
  shape.validate();

  struct Edge {
    double w;
    int u, p;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(shape.n_users) * shape.n_providers);
  for (int u = 0; u < shape.n_users; ++u)
    for (int p = 0; p < shape.n_providers; ++p)
      edges.push_back({psi.user_pref(u, p) + psi.provider_pref(p, u), u, p});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.w > b.w; });
  for (size_t i = 1; i < edges.size(); ++i)
    if (edges[i].w == edges[i - 1].w)
      throw tie_error("greedy_balanced requires pairwise-unique edge weights");

  std::vector<int> provider_to_user(static_cast<size_t>(shape.n_providers), Matching::kUnmatched);
  std::vector<bool> user_taken(static_cast<size_t>(shape.n_users), false);
  int matched = 0;
  for (const Edge& e : edges) {
    if (matched == shape.n_providers) break;
    if (provider_to_user[static_cast<size_t>(e.p)] != Matching::kUnmatched || user_taken[static_cast<size_t>(e.u)])
      continue;
    provider_to_user[static_cast<size_t>(e.p)] = e.u;
    user_taken[static_cast<size_t>(e.u)] = true;
    ++matched;
  }
  return Matching(std::move(provider_to_user), shape.n_users);
}

StableSet enumerate_stable(const PayoffTable& payoffs, long long budget) {
  const MarketShape& shape = payoffs.shape();
  shape.validate();

  double candidates = 1.0;
  for (int k = 0; k < shape.n_providers; ++k) candidates *= shape.n_users - k;
  if (candidates > static_cast<double>(budget))
    throw budget_error("instance too large to enumerate: " + std::to_string(candidates) +
                       " candidates exceed budget " + std::to_string(budget));

  StableSet out;
  std::vector<int> assignment(static_cast<size_t>(shape.n_providers), Matching::kUnmatched);
  std::vector<bool> used(static_cast<size_t>(shape.n_users), false);

  // Depth-first in ascending user index per provider yields lexicographic
  // order of provider_to_user directly.
  auto recurse = [&](auto&& self, int p) -> void {
    if (p == shape.n_providers) {
      Matching m(assignment, shape.n_users);
      if (!blocking_pair(m, payoffs)) out.matchings.push_back(std::move(m));
      return;
    }
    for (int u = 0; u < shape.n_users; ++u) {
      if (used[static_cast<size_t>(u)]) continue;
      used[static_cast<size_t>(u)] = true;
      assignment[static_cast<size_t>(p)] = u;
      self(self, p + 1);
      used[static_cast<size_t>(u)] = false;
    }
  };
  recurse(recurse, 0);
  return out;
}

std::optional<Matching> unique_stable(const PayoffTable& payoffs) {
  Matching by_providers = gs_propose(payoffs, Side::Provider);
  Matching by_users = gs_propose(payoffs, Side::User);
  if (by_providers == by_users) return by_providers;
  return std::nullopt;
}

namespace {

// Shortest-augmenting-path assignment with potentials (the compact Hungarian
// formulation): assigns every provider to a distinct user, minimizing total
// cost. Providers are rows i = 1..L, users are columns j = 1..N, column 0 is
// the virtual root of each augmentation.
std::vector<int> solve_assignment_min(const MarketShape& shape,
                                      const std::vector<double>& cost_by_user_row) {
  const int n = shape.n_users;
  const int l = shape.n_providers;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  auto cost_at = [&](int i, int j) {  // 1-based provider i, user j
    return cost_by_user_row[static_cast<size_t>(j - 1) * l + (i - 1)];
  };

  std::vector<double> pot_row(static_cast<size_t>(l) + 1, 0.0);
  std::vector<double> pot_col(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> row_of_col(static_cast<size_t>(n) + 1, 0);  // provider assigned to user j
  std::vector<int> way(static_cast<size_t>(n) + 1, 0);

  for (int i = 1; i <= l; ++i) {
    row_of_col[0] = i;
    int j0 = 0;
    std::vector<double> min_reduced(static_cast<size_t>(n) + 1, kInf);
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      int i0 = row_of_col[static_cast<size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        double cur = cost_at(i0, j) - pot_row[static_cast<size_t>(i0)] - pot_col[static_cast<size_t>(j)];
        if (cur < min_reduced[static_cast<size_t>(j)]) {
          min_reduced[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (min_reduced[static_cast<size_t>(j)] < delta) {
          delta = min_reduced[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          pot_row[static_cast<size_t>(row_of_col[static_cast<size_t>(j)])] += delta;
          pot_col[static_cast<size_t>(j)] -= delta;
        } else {
          min_reduced[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[static_cast<size_t>(j0)] != 0);
    do {
      int j1 = way[static_cast<size_t>(j0)];
      row_of_col[static_cast<size_t>(j0)] = row_of_col[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> user_of_provider(static_cast<size_t>(l), -1);
  for (int j = 1; j <= n; ++j)
    if (row_of_col[static_cast<size_t>(j)] != 0)
      user_of_provider[static_cast<size_t>(row_of_col[static_cast<size_t>(j)] - 1)] = j - 1;
  return user_of_provider;
}

}  // namespace

Matching max_weight_assignment(const MarketShape& shape,
                               const std::vector<double>& weights_by_user_row) {
  shape.validate();
  std::vector<double> cost(weights_by_user_row.size());
  for (size_t i = 0; i < cost.size(); ++i) {
    if (!std::isfinite(weights_by_user_row[i]))
      throw parameter_error("max_weight_matching requires finite weights");
    cost[i] = -weights_by_user_row[i];
  }
  return Matching(solve_assignment_min(shape, cost), shape.n_users);
}

std::pair<Matching, double> max_weight_matching(const std::vector<std::vector<double>>& weights) {
  if (weights.empty() || weights.front().empty())
    throw parameter_error("max_weight_matching requires a nonempty weight table");
  MarketShape shape{static_cast<int>(weights.size()), static_cast<int>(weights.front().size())};
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(shape.n_users) * shape.n_providers);
  for (const auto& row : weights) {
    if (static_cast<int>(row.size()) != shape.n_providers)
      throw parameter_error("max_weight_matching requires a rectangular weight table");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  Matching m = max_weight_assignment(shape, flat);
  double total = 0.0;
  for (int p = 0; p < shape.n_providers; ++p)
    total += weights[static_cast<size_t>(m.user_of(p))][static_cast<size_t>(p)];
  return {std::move(m), total};
}

}  // namespace matchmarket
