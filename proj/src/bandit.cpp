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

#include "matchmarket/bandit.hpp"

#include <cmath>

namespace matchmarket {

RewardSampler::RewardSampler(RewardDist dist, double sigma2) : dist_(dist) {
  if (!(sigma2 >= 0.0)) throw parameter_error("reward noise requires sigma2 >= 0");
  sigma_ = std::sqrt(sigma2);
}

double RewardSampler::draw(std::mt19937_64& rng, double mean) {
  if (sigma_ == 0.0) return mean;
  switch (dist_) {
    case RewardDist::Gaussian: {
      std::normal_distribution<double> z(0.0, 1.0);
      return mean + sigma_ * z(rng);
    }
    case RewardDist::BernoulliShifted: {
      std::bernoulli_distribution flip(0.5);
      return flip(rng) ? mean + sigma_ : mean - sigma_;
    }
    case RewardDist::UniformBounded: {
      std::uniform_real_distribution<double> u(-sigma_, sigma_);
      return mean + u(rng);
    }
  }
  return mean;
}

LearnerState::LearnerState(MarketShape shape, double sigma2, double alpha, int warm_start)
    : shape_(shape), sigma2_(sigma2), alpha_(alpha), warm_start_(warm_start) {
  shape.validate();
  if (!(alpha > 2.0)) throw parameter_error("Eq.-1 index requires alpha > 2");
  if (!(sigma2 >= 0.0)) throw parameter_error("sigma2 must be nonnegative");
  if (warm_start < 1) throw parameter_error("warm start requires at least one sample per pair");
  size_t pairs = static_cast<size_t>(shape.n_users) * shape.n_providers;
  counts_.assign(2 * pairs, 0);
  sums_.assign(2 * pairs, 0.0);
}

size_t LearnerState::dir_index(AgentId a, AgentId b) const {
  if (a.side == b.side) throw invalid_pair_error("learner state queried for a same-side pair");
  size_t pairs = static_cast<size_t>(shape_.n_users) * shape_.n_providers;
  if (a.side == Side::User)
    return static_cast<size_t>(a.index) * shape_.n_providers + b.index;
  return pairs + static_cast<size_t>(a.index) * shape_.n_users + b.index;
}

long long LearnerState::count(AgentId a, AgentId b) const { return counts_[dir_index(a, b)]; }
double LearnerState::sum(AgentId a, AgentId b) const { return sums_[dir_index(a, b)]; }

double LearnerState::mean(AgentId a, AgentId b) const {
  size_t i = dir_index(a, b);
  if (counts_[i] == 0) throw precondition_error("empirical mean queried before any sample");
  return sums_[i] / static_cast<double>(counts_[i]);
}

void LearnerState::observe(AgentId a, AgentId b, double x) {
  size_t i = dir_index(a, b);
  counts_[i] += 1;
  sums_[i] += x;
}

double LearnerState::ucb_index(AgentId a, AgentId b, long long t) const {
  size_t i = dir_index(a, b);
  if (t < 1) throw parameter_error("ucb_index requires t >= 1");
  if (counts_[i] < 1) throw precondition_error("ucb_index requires warm-start samples for the pair");
  double mean_ab = sums_[i] / static_cast<double>(counts_[i]);
  double bonus = std::sqrt(2.0 * sigma2_ * alpha_ * std::log(static_cast<double>(t)) /
                           static_cast<double>(counts_[i]));
  return mean_ab + bonus;
}

PreferenceTable LearnerState::transient_prefs(long long t) const {
  PreferenceTable nu(shape_);
  for (int u = 0; u < shape_.n_users; ++u)
    for (int p = 0; p < shape_.n_providers; ++p) {
      nu.set_user_pref(u, p, ucb_index(user(u), provider(p), t));
      nu.set_provider_pref(p, u, ucb_index(provider(p), user(u), t));
    }
  return nu;
}

long long LearnerState::total_count() const {
  long long total = 0;
  for (long long c : counts_) total += c;
  return total;
}

LearnerState init_warm_start(const MarketShape& shape, double sigma2, double alpha, int warm_start,
                             const PreferenceTable& true_means, RewardDist dist,
                             std::mt19937_64& rng) {
  LearnerState state(shape, sigma2, alpha, warm_start);
  RewardSampler sampler(dist, sigma2);
  for (int p = 0; p < shape.n_providers; ++p)
    for (int u = 0; u < shape.n_users; ++u)
      for (int k = 0; k < warm_start; ++k) {
        state.observe(user(u), provider(p), sampler.draw(rng, true_means.user_pref(u, p)));
        state.observe(provider(p), user(u), sampler.draw(rng, true_means.provider_pref(p, u)));
      }
  return state;
}

}  // namespace matchmarket
