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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "matchmarket/experiments.hpp"
#include "matchmarket/metrics.hpp"
#include "matchmarket/scenario.hpp"
#include "matchmarket/stable.hpp"
#include "matchmarket/trace_io.hpp"

using namespace matchmarket;

namespace {

std::filesystem::path write_temp(const std::string& text) {
  static int counter = 0;
  auto path = std::filesystem::temp_directory_path() /
              ("matchmarket_scenario_" + std::to_string(counter++) + ".json");
  std::ofstream out(path);
  out << text;
  return path;
}

constexpr const char* kValidScenario = R"({
  "shape": {"n_users": 3, "n_providers": 2},
  "preferences": {
    "source": "explicit",
    "user_prefs": [[0.1, 0.2], [0.4, 0.3], [0.6, 0.5]],
    "provider_prefs": [[0.3, 0.2, 0.1], [0.4, 0.5, 0.6]]
  },
  "rule": {"variant": "proportional", "gamma": 0.25},
  "sigma2": 0.25,
  "alpha": 3.0,
  "horizon": 100,
  "seed": 7,
  "seeds": [7, 8],
  "checkpoints": [25, 50, 75, 100]
})";

}  // namespace

TEST_CASE("example1 preset: the zero-rule stable set is the paper's pair") {
  ScenarioFile sf = load_scenario("example1");
  StableSet stable = enumerate_stable(payoff_table(sf.scenario.rule, sf.scenario.true_prefs));
  REQUIRE(stable.matchings.size() == 2);
  CHECK(stable.matchings[0] == Matching({1, 0, 2}, 3));
  CHECK(stable.matchings[1] == Matching({2, 0, 1}, 3));
  CHECK(sf.scenario.true_prefs.rows_strict());
  CHECK(sf.seeds.size() == 20);
}

TEST_CASE("random rows: strict with the requested row margin") {
  std::mt19937_64 rng(7);
  PreferenceTable t = random_prefs_rows({4, 3}, 0.05, 0.0, 1.0, rng);
  CHECK(t.rows_strict());
  auto check_row = [&](std::span<const double> row) {
    for (size_t i = 0; i < row.size(); ++i)
      for (size_t j = i + 1; j < row.size(); ++j)
        CHECK(std::abs(row[i] - row[j]) >= 0.05);
  };
  for (int u = 0; u < 4; ++u) check_row(t.row(user(u)));
  for (int p = 0; p < 3; ++p) check_row(t.row(provider(p)));
}

TEST_CASE("table grid: instance-wide delta_min at least the margin") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    PreferenceTable t = random_prefs_table_grid({4, 3}, 0.1, rng);
    GapStats gaps = compute_gap_stats(t);
    CHECK(gaps.delta_min >= 0.1);
  }
}

TEST_CASE("rho grid: delta_rho_min at least the margin and pairwise-unique") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    PreferenceTable t = random_prefs_rho_grid({3, 3}, 0.1, rng);
    GapStats gaps = compute_gap_stats(t);
    CHECK(gaps.delta_rho_min >= 0.1);
    CHECK(gaps.rho_pairwise_unique);
    CHECK(t.rows_strict());
  }
}

TEST_CASE("scenario file: valid JSON loads with batch settings") {
  auto path = write_temp(kValidScenario);
  ScenarioFile sf = load_scenario(path.string());
  CHECK(sf.scenario.shape.n_users == 3);
  CHECK(std::get<ProportionalRule>(sf.scenario.rule).gamma == 0.25);
  CHECK(sf.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(sf.checkpoints.size() == 4);
  std::filesystem::remove(path);
}

TEST_CASE("scenario file: schema violations name the field") {
  auto check_error = [&](const std::string& text, const std::string& needle) {
    auto path = write_temp(text);
    try {
      load_scenario(path.string());
      FAIL_CHECK("expected a scenario error for " << needle);
    } catch (const scenario_error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
    std::filesystem::remove(path);
  };
  check_error(R"({"horizon": 5})", "shape");
  check_error(R"({"shape": {"n_users": 2, "n_providers": 3},
                  "preferences": {"source": "random", "seed": 1},
                  "rule": {"variant": "zero"}, "horizon": 5})",
              "shape");
  check_error(R"({"shape": {"n_users": 2, "n_providers": 2},
                  "preferences": {"source": "random", "seed": 1},
                  "rule": {"variant": "proportional", "gamma": 2.0}, "horizon": 5})",
              "gamma");
  check_error(R"({"shape": {"n_users": 2, "n_providers": 2},
                  "preferences": {"source": "explicit",
                                  "user_prefs": [[0.5, 0.5], [0.1, 0.2]],
                                  "provider_prefs": [[0.1, 0.2], [0.3, 0.4]]},
                  "rule": {"variant": "zero"}, "horizon": 5})",
              "tied");
  check_error(R"({"shape": {"n_users": 2, "n_providers": 2},
                  "preferences": {"source": "explicit",
                                  "user_prefs": [[0.5, 5.0], [0.1, 0.2]],
                                  "provider_prefs": [[0.1, 0.2], [0.3, 0.4]]},
                  "rule": {"variant": "pricing", "B": 1.0}, "horizon": 5})",
              "rule.B");
  check_error(R"({"shape": {"n_users": 2, "n_providers": 2},
                  "preferences": {"source": "random", "seed": 1},
                  "rule": {"variant": "zero"}, "horizon": 5,
                  "checkpoints": [9]})",
              "checkpoints");
}

TEST_CASE("reward distribution parsing") {
  auto path = write_temp(R"({
    "shape": {"n_users": 2, "n_providers": 2},
    "preferences": {"source": "random", "seed": 3, "margin": 0.05},
    "rule": {"variant": "zero"},
    "horizon": 10,
    "reward_dist": "bernoulli-shifted"
  })");
  ScenarioFile sf = load_scenario(path.string());
  CHECK(sf.scenario.reward_dist == RewardDist::BernoulliShifted);
  std::filesystem::remove(path);

  auto bad = write_temp(R"({
    "shape": {"n_users": 2, "n_providers": 2},
    "preferences": {"source": "random", "seed": 3},
    "rule": {"variant": "zero"},
    "horizon": 10,
    "reward_dist": "cauchy"
  })");
  CHECK_THROWS_AS(load_scenario(bad.string()), scenario_error);
  std::filesystem::remove(bad);
}

TEST_CASE("pricing scenario: Lemma-F.1 defaults are resolved") {
  auto path = write_temp(R"({
    "shape": {"n_users": 2, "n_providers": 2},
    "preferences": {"source": "random", "seed": 3, "margin": 0.05, "low": 0.0, "high": 1.0},
    "rule": {"variant": "pricing", "B": 1.0},
    "horizon": 10
  })");
  ScenarioFile sf = load_scenario(path.string());
  REQUIRE(sf.pricing.has_value());
  CHECK(sf.pricing->c1 == 0.0);
  CHECK(sf.pricing->c2 == -2.0);
  CHECK(sf.pricing->g == std::vector<double>{2.0, 0.0});
  std::filesystem::remove(path);
}

TEST_CASE("scenario echo is valid JSON with the resolved rule") {
  ScenarioFile sf = load_scenario("prop3");
  std::string echo = scenario_to_json(sf);
  CHECK(echo.find("\"proportional\"") != std::string::npos);
  CHECK(echo.find("\"gamma\": 1.0") != std::string::npos);
}

TEST_CASE("trace CSV: header shape, row count, zero-horizon file") {
  ScenarioFile sf = load_scenario("example1");
  Scenario sc = sf.scenario;
  sc.horizon = 0;
  std::ostringstream empty_out;
  write_trace_csv(run(sc), empty_out);
  CHECK(empty_out.str() == "t,matching,U_u1,U_u2,U_u3,U_p1,U_p2,U_p3,W_t,W_max,stable\n");

  sc.horizon = 12;
  std::ostringstream out;
  write_trace_csv(run(sc), out);
  std::string text = out.str();
  size_t rows = static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
  CHECK(rows == 13);  // header + T
}

TEST_CASE("trace CSV: reruns are byte-identical") {
  ScenarioFile sf = load_scenario("example1");
  Scenario sc = sf.scenario;
  sc.horizon = 40;
  std::ostringstream a, b;
  write_trace_csv(run(sc), a);
  write_trace_csv(run(sc), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("nan") == std::string::npos);
}

TEST_CASE("simulate writes one CSV per seed plus a summary") {
  ScenarioFile sf = load_scenario("example1");
  sf.scenario.horizon = 32;
  sf.seeds = {5, 6};
  sf.checkpoints = {4, 8, 16, 32};
  auto dir = std::filesystem::temp_directory_path() / "matchmarket_simulate_test";
  std::filesystem::remove_all(dir);
  std::string summary = run_simulate(sf, dir.string());
  CHECK(std::filesystem::exists(dir / "trace_seed5.csv"));
  CHECK(std::filesystem::exists(dir / "trace_seed6.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(summary.find("\"welfare_min_ratio\"") != std::string::npos);
  CHECK(summary.find("\"regret\"") != std::string::npos);
  CHECK(summary.find("\"classifier\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown preset or missing file") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), scenario_error);
}
