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

#include "matchmarket/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "matchmarket/metrics.hpp"

namespace matchmarket {

using nlohmann::json;

PreferenceTable random_prefs_rows(const MarketShape& shape, double margin, double low, double high,
                                  std::mt19937_64& rng) {
  shape.validate();
  if (!(margin >= 0.0) || !(high > low)) throw parameter_error("bad random-preference parameters");
  std::uniform_real_distribution<double> u(low, high);
  auto draw_row = [&](int len) {
    std::vector<double> row(static_cast<size_t>(len));
    for (int attempt = 0; attempt < 100000; ++attempt) {
      for (double& v : row) v = u(rng);
      std::vector<double> sorted = row;
      std::sort(sorted.begin(), sorted.end());
      bool ok = true;
      for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] - sorted[i - 1] < margin) ok = false;
      if (ok) return row;
    }
    throw parameter_error("margin too large for the requested range");
  };
  PreferenceTable t(shape);
  for (int uu = 0; uu < shape.n_users; ++uu) {
    auto row = draw_row(shape.n_providers);
    for (int p = 0; p < shape.n_providers; ++p) t.set_user_pref(uu, p, row[static_cast<size_t>(p)]);
  }
  for (int p = 0; p < shape.n_providers; ++p) {
    auto row = draw_row(shape.n_users);
    for (int uu = 0; uu < shape.n_users; ++uu) t.set_provider_pref(p, uu, row[static_cast<size_t>(uu)]);
  }
  return t;
}

namespace {

std::vector<double> jittered_grid(int count, double margin, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(0.0, 0.05 * margin);
  std::vector<double> vals(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) vals[static_cast<size_t>(k)] = margin * (1.5 + 1.1 * k) + jitter(rng);
  std::shuffle(vals.begin(), vals.end(), rng);
  return vals;
}

}  // namespace

PreferenceTable random_prefs_table_grid(const MarketShape& shape, double margin,
                                        std::mt19937_64& rng) {
  shape.validate();
  if (!(margin > 0.0)) throw parameter_error("grid generation requires margin > 0");
  auto vals = jittered_grid(2 * shape.n_users * shape.n_providers, margin, rng);
  PreferenceTable t(shape);
  size_t k = 0;
  for (int u = 0; u < shape.n_users; ++u)
    for (int p = 0; p < shape.n_providers; ++p) t.set_user_pref(u, p, vals[k++]);
  for (int p = 0; p < shape.n_providers; ++p)
    for (int u = 0; u < shape.n_users; ++u) t.set_provider_pref(p, u, vals[k++]);
  return t;
}

PreferenceTable random_prefs_rho_grid(const MarketShape& shape, double margin,
                                      std::mt19937_64& rng) {
  shape.validate();
  if (!(margin > 0.0)) throw parameter_error("grid generation requires margin > 0");
  auto rho = jittered_grid(shape.n_users * shape.n_providers, margin, rng);
  std::uniform_real_distribution<double> split(-0.25 * margin, 0.25 * margin);
  PreferenceTable t(shape);
  size_t k = 0;
  for (int u = 0; u < shape.n_users; ++u)
    for (int p = 0; p < shape.n_providers; ++p) {
      double d = split(rng);
      t.set_user_pref(u, p, rho[k] + d);
      t.set_provider_pref(p, u, rho[k] - d);
      ++k;
    }
  return t;
}

namespace {

PreferenceTable example1_table() {
  MarketShape shape{3, 3};
  PreferenceTable mu(shape);
  // Users' rows over (p1, p2, p3); providers' rows over (u1, u2, u3).
  const double u_rows[3][3] = {{0.1, 0.2, 0.3}, {0.2, 0.1, 0.3}, {0.3, 0.2, 0.1}};
  const double p_rows[3][3] = {{0.3, 0.2, 0.1}, {0.3, 0.2, 0.1}, {0.1, 0.2, 0.3}};
  for (int u = 0; u < 3; ++u)
    for (int p = 0; p < 3; ++p) mu.set_user_pref(u, p, u_rows[u][p]);
  for (int p = 0; p < 3; ++p)
    for (int u = 0; u < 3; ++u) mu.set_provider_pref(p, u, p_rows[p][u]);
  return mu;
}

ScenarioFile finish(ScenarioFile sf) {
  if (sf.seeds.empty()) sf.seeds = {sf.scenario.seed};
  if (sf.checkpoints.empty() && sf.scenario.horizon > 0)
    sf.checkpoints = geometric_checkpoints(sf.scenario.horizon);
  sf.scenario.validate();
  return sf;
}

}  // namespace

ScenarioFile example1_preset() {
  ScenarioFile sf;
  sf.name = "example1";
  sf.scenario.shape = {3, 3};
  sf.scenario.true_prefs = example1_table();
  sf.scenario.rule = ZeroRule{};
  sf.scenario.sigma2 = 0.25;
  sf.scenario.alpha = 3.0;
  sf.scenario.warm_start = 1;
  sf.scenario.horizon = 16000;
  sf.scenario.proposer_side = Side::Provider;
  sf.scenario.matcher = MatcherKind::GS;
  sf.scenario.reward_dist = RewardDist::Gaussian;
  sf.scenario.seed = 1;
  sf.seeds.resize(20);
  std::iota(sf.seeds.begin(), sf.seeds.end(), 1);
  sf.checkpoints = {2000, 4000, 8000, 16000};
  return finish(std::move(sf));
}

ScenarioFile prop3_preset() {
  ScenarioFile sf = example1_preset();
  sf.name = "prop3";
  sf.scenario.rule = ProportionalRule{1.0};
  return finish(std::move(sf));
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw scenario_error("scenario field '" + field + "': " + what);
}

double get_number(const json& j, const std::string& field, double fallback,
                  bool required = false) {
  if (!j.contains(field)) {
    if (required) fail(field, "missing");
    return fallback;
  }
  if (!j.at(field).is_number()) fail(field, "must be a number");
  return j.at(field).get<double>();
}

PreferenceTable parse_matrix_prefs(const json& jp, const MarketShape& shape) {
  PreferenceTable t(shape);
  auto read = [&](const char* field, int rows, int cols, auto setter) {
    if (!jp.contains(field)) fail(std::string("preferences.") + field, "missing");
    const json& m = jp.at(field);
    if (!m.is_array() || static_cast<int>(m.size()) != rows)
      fail(std::string("preferences.") + field, "must be an array of " + std::to_string(rows) + " rows");
    for (int r = 0; r < rows; ++r) {
      const json& row = m.at(static_cast<size_t>(r));
      if (!row.is_array() || static_cast<int>(row.size()) != cols)
        fail(std::string("preferences.") + field + "[" + std::to_string(r) + "]",
             "must have " + std::to_string(cols) + " entries");
      for (int c = 0; c < cols; ++c) {
        const json& v = row.at(static_cast<size_t>(c));
        if (!v.is_number()) fail(std::string("preferences.") + field, "entries must be numbers");
        setter(r, c, v.get<double>());
      }
    }
  };
  read("user_prefs", shape.n_users, shape.n_providers,
       [&](int r, int c, double v) { t.set_user_pref(r, c, v); });
  read("provider_prefs", shape.n_providers, shape.n_users,
       [&](int r, int c, double v) { t.set_provider_pref(r, c, v); });
  return t;
}

ScenarioFile parse_scenario_json(const json& j, const std::string& name) {
  ScenarioFile sf;
  sf.name = name;
  Scenario& sc = sf.scenario;

  if (!j.contains("shape")) fail("shape", "missing");
  sc.shape.n_users = static_cast<int>(get_number(j.at("shape"), "n_users", 0, true));
  sc.shape.n_providers = static_cast<int>(get_number(j.at("shape"), "n_providers", 0, true));
  try {
    sc.shape.validate();
  } catch (const std::exception& e) {
    fail("shape", e.what());
  }

  if (!j.contains("preferences")) fail("preferences", "missing");
  const json& jp = j.at("preferences");
  std::string source = jp.value("source", "explicit");
  if (source == "explicit") {
    sc.true_prefs = parse_matrix_prefs(jp, sc.shape);
  } else if (source == "random") {
    std::mt19937_64 gen_rng(static_cast<std::uint64_t>(get_number(jp, "seed", 0, true)));
    double margin = get_number(jp, "margin", 0.0);
    std::string target = jp.value("target", "rows");
    if (target == "rows")
      sc.true_prefs = random_prefs_rows(sc.shape, margin, get_number(jp, "low", 0.0),
                                        get_number(jp, "high", 1.0), gen_rng);
    else if (target == "table")
      sc.true_prefs = random_prefs_table_grid(sc.shape, margin, gen_rng);
    else if (target == "rho")
      sc.true_prefs = random_prefs_rho_grid(sc.shape, margin, gen_rng);
    else
      fail("preferences.target", "must be one of rows|table|rho");
  } else {
    fail("preferences.source", "must be explicit or random");
  }
  std::string tied = sc.true_prefs.find_tied_row();
  if (!tied.empty()) fail("preferences", "tied entries in row of " + tied);

  if (!j.contains("rule")) fail("rule", "missing");
  const json& jr = j.at("rule");
  std::string variant = jr.value("variant", "");
  if (variant == "zero") {
    sc.rule = ZeroRule{};
  } else if (variant == "proportional") {
    double gamma = get_number(jr, "gamma", 0.0, true);
    if (gamma < 0.0 || gamma > 1.0) fail("rule.gamma", "must lie in [0, 1]");
    sc.rule = ProportionalRule{gamma};
  } else if (variant == "balanced") {
    sc.rule = BalancedRule{};
  } else if (variant == "pricing") {
    double bound = get_number(jr, "B", 0.0, true);
    if (!(bound > 0.0)) fail("rule.B", "must be positive");
    std::vector<int> ordering(static_cast<size_t>(sc.shape.n_providers));
    std::iota(ordering.begin(), ordering.end(), 0);
    if (jr.contains("ordering")) {
      const json& jo = jr.at("ordering");
      if (!jo.is_array() || static_cast<int>(jo.size()) != sc.shape.n_providers)
        fail("rule.ordering", "must list every provider once (1-based)");
      for (int k = 0; k < sc.shape.n_providers; ++k)
        ordering[static_cast<size_t>(k)] = jo.at(static_cast<size_t>(k)).get<int>() - 1;
    }
    PricingParams params;
    try {
      params = pricing_defaults(bound, sc.shape.n_providers, ordering);
    } catch (const std::exception& e) {
      fail("rule.ordering", e.what());
    }
    if (jr.contains("c1")) params.c1 = get_number(jr, "c1", params.c1);
    if (jr.contains("c2")) params.c2 = get_number(jr, "c2", params.c2);
    if (jr.contains("g")) {
      const json& jg = jr.at("g");
      if (!jg.is_array() || static_cast<int>(jg.size()) != sc.shape.n_providers)
        fail("rule.g", "must list one price per provider");
      for (int p = 0; p < sc.shape.n_providers; ++p)
        params.g[static_cast<size_t>(p)] = jg.at(static_cast<size_t>(p)).get<double>();
    }
    for (int u = 0; u < sc.shape.n_users; ++u)
      for (int p = 0; p < sc.shape.n_providers; ++p)
        if (std::abs(sc.true_prefs.user_pref(u, p)) > bound)
          fail("rule.B", "violated: |mu(u" + std::to_string(u + 1) + ", p" + std::to_string(p + 1) +
                             ")| exceeds B");
    sf.pricing = params;
    sc.rule = PricingRule{params.c1, params.c2, params.g};
  } else {
    fail("rule.variant", "must be one of zero|proportional|balanced|pricing");
  }

  sc.sigma2 = get_number(j, "sigma2", 1.0);
  if (!(sc.sigma2 >= 0.0)) fail("sigma2", "must be nonnegative");
  sc.alpha = get_number(j, "alpha", 3.0);
  if (!(sc.alpha > 2.0)) fail("alpha", "must exceed 2");
  sc.warm_start = static_cast<int>(get_number(j, "warm_start", 1));
  if (sc.warm_start < 1) fail("warm_start", "must be a positive integer");
  sc.horizon = static_cast<long long>(get_number(j, "horizon", 0, true));
  if (sc.horizon < 0) fail("horizon", "must be nonnegative");

  std::string side = j.value("proposer_side", "provider");
  if (side == "provider")
    sc.proposer_side = Side::Provider;
  else if (side == "user")
    sc.proposer_side = Side::User;
  else
    fail("proposer_side", "must be provider or user");

  std::string matcher = j.value("matcher", "gs");
  if (matcher == "gs")
    sc.matcher = MatcherKind::GS;
  else if (matcher == "greedy-balanced")
    sc.matcher = MatcherKind::GreedyBalanced;
  else
    fail("matcher", "must be gs or greedy-balanced");
  if (sc.matcher == MatcherKind::GreedyBalanced && !std::holds_alternative<BalancedRule>(sc.rule))
    fail("matcher", "greedy-balanced requires rule.variant = balanced");

  std::string dist = j.value("reward_dist", "gaussian");
  if (dist == "gaussian")
    sc.reward_dist = RewardDist::Gaussian;
  else if (dist == "bernoulli-shifted")
    sc.reward_dist = RewardDist::BernoulliShifted;
  else if (dist == "uniform-bounded")
    sc.reward_dist = RewardDist::UniformBounded;
  else
    fail("reward_dist", "must be gaussian, bernoulli-shifted or uniform-bounded");

  sc.seed = static_cast<std::uint64_t>(get_number(j, "seed", 1));
  if (j.contains("seeds")) {
    const json& js = j.at("seeds");
    if (!js.is_array() || js.empty()) fail("seeds", "must be a nonempty array");
    for (const json& s : js) sf.seeds.push_back(s.get<std::uint64_t>());
  }
  if (j.contains("checkpoints")) {
    const json& jc = j.at("checkpoints");
    if (!jc.is_array()) fail("checkpoints", "must be an array of horizons");
    for (const json& c : jc) sf.checkpoints.push_back(c.get<long long>());
    for (long long c : sf.checkpoints)
      if (c < 1 || c > sc.horizon) fail("checkpoints", "must lie in [1, horizon]");
    if (!std::is_sorted(sf.checkpoints.begin(), sf.checkpoints.end()))
      fail("checkpoints", "must be increasing");
  }
  return sf;
}

}  // namespace

ScenarioFile load_scenario(const std::string& path_or_preset) {
  if (path_or_preset == "example1") return example1_preset();
  if (path_or_preset == "prop3") return prop3_preset();
  std::ifstream in(path_or_preset);
  if (!in) throw scenario_error("cannot open scenario file: " + path_or_preset);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw scenario_error("scenario file is not valid JSON: " + std::string(e.what()));
  }
  try {
    return finish(parse_scenario_json(j, path_or_preset));
  } catch (const scenario_error&) {
    throw;
  } catch (const std::exception& e) {
    throw scenario_error(std::string("invalid scenario: ") + e.what());
  }
}

std::string scenario_to_json(const ScenarioFile& sf) {
  const Scenario& sc = sf.scenario;
  json j;
  j["name"] = sf.name;
  j["shape"] = {{"n_users", sc.shape.n_users}, {"n_providers", sc.shape.n_providers}};
  json up = json::array(), pp = json::array();
  for (int u = 0; u < sc.shape.n_users; ++u) {
    json row = json::array();
    for (int p = 0; p < sc.shape.n_providers; ++p) row.push_back(sc.true_prefs.user_pref(u, p));
    up.push_back(row);
  }
  for (int p = 0; p < sc.shape.n_providers; ++p) {
    json row = json::array();
    for (int u = 0; u < sc.shape.n_users; ++u) row.push_back(sc.true_prefs.provider_pref(p, u));
    pp.push_back(row);
  }
  j["preferences"] = {{"user_prefs", up}, {"provider_prefs", pp}};
  json jr;
  jr["variant"] = rule_name(sc.rule);
  if (const auto* prop = std::get_if<ProportionalRule>(&sc.rule)) jr["gamma"] = prop->gamma;
  if (const auto* pricing = std::get_if<PricingRule>(&sc.rule)) {
    jr["c1"] = pricing->c1;
    jr["c2"] = pricing->c2;
    jr["g"] = pricing->g;
    if (sf.pricing) jr["B"] = sf.pricing->B;
  }
  j["rule"] = jr;
  j["sigma2"] = sc.sigma2;
  j["alpha"] = sc.alpha;
  j["warm_start"] = sc.warm_start;
  j["horizon"] = sc.horizon;
  j["proposer_side"] = sc.proposer_side == Side::Provider ? "provider" : "user";
  j["matcher"] = sc.matcher == MatcherKind::GS ? "gs" : "greedy-balanced";
  j["reward_dist"] = sc.reward_dist == RewardDist::Gaussian ? "gaussian"
                     : sc.reward_dist == RewardDist::BernoulliShifted ? "bernoulli-shifted"
                                                                      : "uniform-bounded";
  j["seed"] = sc.seed;
  j["seeds"] = sf.seeds;
  j["checkpoints"] = sf.checkpoints;
  return j.dump(2);
}

}  // namespace matchmarket
