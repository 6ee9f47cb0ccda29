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

#include <random>
#include <string>
#include <vector>

#include "matchmarket/market.hpp"
#include "matchmarket/rules.hpp"

namespace matchmarket {

struct scenario_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scenario file: one market instance plus batch settings.
struct ScenarioFile {
  std::string name;  // preset name or file path
  Scenario scenario;
  std::vector<std::uint64_t> seeds;      // batch seeds; defaults to {scenario.seed}
  std::vector<long long> checkpoints;    // defaults to 8 geometric points ending at T
  std::optional<PricingParams> pricing;  // resolved parameters when rule = pricing
};

// Random strict preference tables.
//
// Every row (both sides) drawn uniformly on [low, high] until its pairwise
// gaps are all >= margin. Rejection-sampled per row.
PreferenceTable random_prefs_rows(const MarketShape& shape, double margin, double low, double high,
                                  std::mt19937_64& rng);

// All 2NL entries placed on a shuffled jittered grid: every two table values
// differ by >= margin and every value is >= margin, so the instance's
// delta_min is >= margin by construction.
PreferenceTable random_prefs_table_grid(const MarketShape& shape, double margin,
                                        std::mt19937_64& rng);

// Symmetrized values rho(u,p) placed on such a grid and split into the two
// directions with a small antisymmetric perturbation: delta_rho_min >= margin
// and rho pairwise-unique by construction.
PreferenceTable random_prefs_rho_grid(const MarketShape& shape, double margin,
                                      std::mt19937_64& rng);

// The 3x3 instance whose zero-rule stable set has exactly two members, with
// cardinal values {3,2,1}/10 placed per the ordinal table.
ScenarioFile example1_preset();
// The same instance under full proportional costs (gamma = 1), used by the
// adversarial-scheduler experiment.
ScenarioFile prop3_preset();

// Loads a scenario from a JSON file, or expands a named preset
// ("example1", "prop3"). Validation failures name the offending field.
ScenarioFile load_scenario(const std::string& path_or_preset);

// Canonical JSON echo of a loaded scenario (stable key order via nlohmann's
// sorted objects).
std::string scenario_to_json(const ScenarioFile& sf);

}  // namespace matchmarket
