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

#include "matchmarket/core.hpp"

namespace matchmarket {

// Reward distributions D(a, a') centered at the true preference. All three
// are parameterized so that sigma^2 is an honest sub-Gaussian parameter:
//   gaussian:          mean + Normal(0, sigma^2)          (exactly sigma^2)
//   bernoulli_shifted: mean +/- sigma, equiprobable       (Hoeffding: sigma^2)
//   uniform_bounded:   mean + Uniform[-sigma, +sigma]     (Hoeffding: sigma^2)
enum class RewardDist { Gaussian, BernoulliShifted, UniformBounded };

class RewardSampler {
 public:
  RewardSampler(RewardDist dist, double sigma2);
  double draw(std::mt19937_64& rng, double mean);

 private:
  RewardDist dist_;
  double sigma_;
};

// Per-agent learning state: sample counts T(a, a'), running reward sums, and
// the Eq.-1 index parameters. Counts stay symmetric across the two
// directions of a pair whenever updates come from matches.
class LearnerState {
 public:
  LearnerState() = default;
  LearnerState(MarketShape shape, double sigma2, double alpha, int warm_start);

  const MarketShape& shape() const { return shape_; }
  double sigma2() const { return sigma2_; }
  double alpha() const { return alpha_; }
  int warm_start() const { return warm_start_; }

  long long count(AgentId a, AgentId b) const;
  double sum(AgentId a, AgentId b) const;
  double mean(AgentId a, AgentId b) const;

  // Records one observed reward x for the directed pair (a, b).
  void observe(AgentId a, AgentId b, double x);

  // nu_t(a, b) = mean + sqrt(2 sigma^2 alpha ln(t) / count). Natural log.
  double ucb_index(AgentId a, AgentId b, long long t) const;

  // nu_t on every ordered pair.
  PreferenceTable transient_prefs(long long t) const;

  long long total_count() const;

  friend bool operator==(const LearnerState&, const LearnerState&) = default;

 private:
  size_t dir_index(AgentId a, AgentId b) const;

  MarketShape shape_{0, 0};
  double sigma2_ = 0.0;
  double alpha_ = 0.0;
  int warm_start_ = 0;
  // Directed pairs: user->provider block first (u major), then
  // provider->user block (p major).
  std::vector<long long> counts_;
  std::vector<double> sums_;
};

// Draws warm_start samples from D per directed pair, provider-major,
// user-direction first. Deterministic given the engine state.
LearnerState init_warm_start(const MarketShape& shape, double sigma2, double alpha, int warm_start,
                             const PreferenceTable& true_means, RewardDist dist,
                             std::mt19937_64& rng);

}  // namespace matchmarket
