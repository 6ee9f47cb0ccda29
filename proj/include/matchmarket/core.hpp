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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace matchmarket {

// Errors thrown on contract violations. Violation *reports* (e.g. the result
// of feasibility_check) are data, not exceptions.
struct invalid_pair_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct tie_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct precondition_error : std::logic_error {
  using std::logic_error::logic_error;
};
struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Side { User, Provider };

inline Side opposite(Side s) { return s == Side::User ? Side::Provider : Side::User; }

// One agent: a user u_0..u_{N-1} or a provider p_0..p_{L-1}.
struct AgentId {
  Side side;
  int index;

  friend bool operator==(const AgentId&, const AgentId&) = default;
};

inline AgentId user(int i) { return {Side::User, i}; }
inline AgentId provider(int i) { return {Side::Provider, i}; }

// "No agent": the unmatched partner. Conventions elsewhere give it
// preference, cost, transfer and payoff 0.
using OptAgent = std::optional<AgentId>;

struct MarketShape {
  int n_users;      // N
  int n_providers;  // L

  void validate() const {
    if (n_providers < 1 || n_users < n_providers)
      throw parameter_error("market shape requires N >= L >= 1, got N=" +
                            std::to_string(n_users) + " L=" + std::to_string(n_providers));
  }
  int count(Side s) const { return s == Side::User ? n_users : n_providers; }
  friend bool operator==(const MarketShape&, const MarketShape&) = default;
};

// A real-valued function on ordered opposite-side pairs, with the implicit
// convention table(a, nothing) = 0. Holds true preferences, transient
// UCB preferences, empirical means, and evaluated payoffs alike.
class PreferenceTable {
 public:
  PreferenceTable() : shape_{0, 0} {}
  explicit PreferenceTable(MarketShape shape)
      : shape_(shape),
        user_rows_(static_cast<size_t>(shape.n_users) * shape.n_providers, 0.0),
        provider_rows_(static_cast<size_t>(shape.n_providers) * shape.n_users, 0.0) {}

  const MarketShape& shape() const { return shape_; }

  double user_pref(int u, int p) const { return user_rows_[idx_u(u, p)]; }
  double provider_pref(int p, int u) const { return provider_rows_[idx_p(p, u)]; }
  void set_user_pref(int u, int p, double v) { user_rows_[idx_u(u, p)] = v; }
  void set_provider_pref(int p, int u, double v) { provider_rows_[idx_p(p, u)] = v; }

  // psi(a, b); throws invalid_pair_error on a same-side pair.
  double at(AgentId a, AgentId b) const;
  double at(AgentId a, const OptAgent& b) const { return b ? at(a, *b) : 0.0; }

  // All entries of a's row, indexed by counterpart index.
  std::span<const double> row(AgentId a) const;

  bool all_finite() const;
  // No two entries of any row equal (the paper's no-ties assumption).
  bool rows_strict() const;
  // Offending row description for error messages, or empty if strict.
  std::string find_tied_row() const;

  friend bool operator==(const PreferenceTable&, const PreferenceTable&) = default;

 private:
  size_t idx_u(int u, int p) const { return static_cast<size_t>(u) * shape_.n_providers + p; }
  size_t idx_p(int p, int u) const { return static_cast<size_t>(p) * shape_.n_users + u; }

  MarketShape shape_;
  std::vector<double> user_rows_;      // row u: psi(u, p_0..p_{L-1})
  std::vector<double> provider_rows_;  // row p: psi(p, u_0..u_{N-1})
};

// Evaluated payoffs V share the pair-table representation.
using PayoffTable = PreferenceTable;

// Assignment of every provider to a distinct user; users may be unmatched.
class Matching {
 public:
  static constexpr int kUnmatched = -1;

  Matching() = default;
  // Accepts possibly-infeasible data; the inverse map is only built when the
  // assignment is feasible. Use feasibility_check for diagnostics.
  Matching(std::vector<int> provider_to_user, int n_users);

  int n_providers() const { return static_cast<int>(provider_to_user_.size()); }
  int n_users() const { return n_users_; }
  bool feasible() const { return feasible_; }

  // User matched to provider p.
  int user_of(int p) const { return provider_to_user_[static_cast<size_t>(p)]; }
  // Provider matched to user u, or kUnmatched.
  int provider_of(int u) const;

  // Partner of an agent, or nullopt when unmatched.
  OptAgent partner(AgentId a) const;

  const std::vector<int>& provider_to_user() const { return provider_to_user_; }

  friend bool operator==(const Matching& a, const Matching& b) {
    return a.provider_to_user_ == b.provider_to_user_;
  }
  // Lexicographic on provider_to_user; the canonical order for stable sets.
  friend bool operator<(const Matching& a, const Matching& b) {
    return a.provider_to_user_ < b.provider_to_user_;
  }

  std::string to_string() const;  // e.g. "2-1-3" (1-based user per provider)

 private:
  std::vector<int> provider_to_user_;
  std::vector<int> user_to_provider_;
  int n_users_ = 0;
  bool feasible_ = false;
};

// Empty result means m is a member of the feasible set W; otherwise each
// violation names the duplicated user or out-of-range index.
std::vector<std::string> feasibility_check(const Matching& m, const MarketShape& shape);

// First blocking pair (u, p) in ascending-user-then-provider scan order, with
// V(u,p) > V(u, m(u)) and V(p,u) > V(p, m(p)); nullopt iff m is stable
// under the given payoffs. Unmatched agents have payoff 0.
std::optional<std::pair<int, int>> blocking_pair(const Matching& m, const PayoffTable& payoffs);

// Ordinal rank of b under psi(a, .): 1 + number of counterparts strictly
// preferred to b. Requires a strict row.
int rank(const PreferenceTable& prefs, AgentId a, AgentId b);

}  // namespace matchmarket
