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
#include <utility>
#include <vector>

#include "matchmarket/core.hpp"

namespace matchmarket {

// All stable matchings of an instance, deduplicated, in lexicographic order
// of provider_to_user.
struct StableSet {
  std::vector<Matching> matchings;

  bool contains(const Matching& m) const;
};

// Deferred acceptance over evaluated payoffs, from either side. Unmatched
// proposers are selected in ascending index order. The returned matching is
// stable under `payoffs`, proposer-side-optimal and other-side-pessimal.
// Throws tie_error when any row of `payoffs` has tied entries.
Matching gs_propose(const PayoffTable& payoffs, Side proposer_side);

// Greedy stable matcher for the balanced transfer rule: sorts the N*L edges
// by descending weight w(u,p) = psi(u,p) + psi(p,u) and adds every edge that
// conflicts with no earlier one, until all providers are matched. Requires
// pairwise-unique weights (throws tie_error otherwise).
Matching greedy_balanced(const PreferenceTable& psi);

// Brute-force oracle for the stable set: every injective provider->user
// assignment, filtered by blocking_pair. Throws budget_error when the
// candidate count N!/(N-L)! exceeds `budget`.
StableSet enumerate_stable(const PayoffTable& payoffs, long long budget = 10'000'000);

// The unique stable matching when one exists: runs deferred acceptance from
// both sides and returns the matching iff they agree.
std::optional<Matching> unique_stable(const PayoffTable& payoffs);

// Exact maximum-weight assignment of all providers to distinct users,
// weights indexed [u][p]. Augmenting-path (Hungarian) method; no
// approximation.
std::pair<Matching, double> max_weight_matching(const std::vector<std::vector<double>>& weights);

// Same solver on a flat table; weight of pair (u, p) = weight_of(u, p).
Matching max_weight_assignment(const MarketShape& shape,
                               const std::vector<double>& weights_by_user_row);

}  // namespace matchmarket
