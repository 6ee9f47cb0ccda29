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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "matchmarket/experiments.hpp"

namespace {

using namespace matchmarket;

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw scenario_error("--seeds must list at least one seed");
  return seeds;
}

ScenarioFile load(const std::string& scenario_arg, const std::string& seeds_arg) {
  ScenarioFile sf = load_scenario(scenario_arg);
  if (!seeds_arg.empty()) sf.seeds = parse_seeds(seeds_arg);
  return sf;
}

void maybe_write(const std::string& out_dir, const std::string& filename, const std::string& text) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / filename, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + filename + " under " + out_dir);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-sided matching market with bandit learners under costs and transfers"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_dir;
  std::string seeds_arg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_arg,
                    "scenario JSON file, or a preset name (example1, prop3)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seeds", seeds_arg, "comma-separated seed list overriding the scenario");
    return cmd;
  };

  add_common(app.add_subcommand("simulate", "run the market and emit trace CSV + summary JSON"));
  add_common(app.add_subcommand("enumerate", "brute-force stable set of the scenario instance"));
  add_common(app.add_subcommand("bounds", "gap statistics and the closed-form regret bounds"));
  add_common(app.add_subcommand("example1-linear",
                                "zero-rule batch exhibiting the linear optimal-regret split"));
  add_common(app.add_subcommand("prop3-adversary",
                                "gamma=1 adversarial scheduler: pinned p1 vs uniformly matched p2"));

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("simulate")) {
      ScenarioFile sf = load(scenario_arg.empty() ? "example1" : scenario_arg, seeds_arg);
      std::string summary = run_simulate(sf, out_dir.empty() ? "out" : out_dir);
      std::cout << summary << "\n";
    } else if (app.got_subcommand("enumerate")) {
      ScenarioFile sf = load(scenario_arg.empty() ? "example1" : scenario_arg, "");
      std::string text = run_enumerate(sf);
      std::cout << text;
      maybe_write(out_dir, "stable_set.txt", text);
    } else if (app.got_subcommand("bounds")) {
      ScenarioFile sf = load(scenario_arg.empty() ? "example1" : scenario_arg, "");
      BoundsReport report = compute_bounds_report(sf, std::max<long long>(sf.scenario.horizon, 2));
      std::string text = format_bounds(sf, report, std::max<long long>(sf.scenario.horizon, 2));
      std::cout << text;
      maybe_write(out_dir, "bounds.txt", text);
    } else if (app.got_subcommand("example1-linear")) {
      ScenarioFile sf = load(scenario_arg.empty() ? "example1" : scenario_arg, seeds_arg);
      Example1Report report = run_example1_linear(sf);
      std::string text = format_example1(report);
      std::cout << text;
      maybe_write(out_dir, "example1_linear.txt", text);
    } else if (app.got_subcommand("prop3-adversary")) {
      ScenarioFile sf = load(scenario_arg.empty() ? "prop3" : scenario_arg, seeds_arg);
      Prop3Report report = run_prop3_adversary(sf);
      std::string text = format_prop3(report);
      std::cout << text;
      maybe_write(out_dir, "prop3_adversary.txt", text);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
