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

#include "matchmarket/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "matchmarket/trace_io.hpp"

namespace matchmarket {

using nlohmann::json;

int thread_cap() {
  if (const char* env = std::getenv("MATCHMARKET_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<Trace> run_batch(const Scenario& base, const std::vector<std::uint64_t>& seeds) {
  std::vector<Trace> traces(seeds.size());
  int workers = std::min<int>(thread_cap(), static_cast<int>(seeds.size()));
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        Scenario sc = base;
        sc.seed = seeds[i];
        traces[i] = run(sc);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return traces;
}

RegretReport build_regret_report(const std::vector<Trace>& traces, const RuleRegime& rule,
                                 const PreferenceTable& mu,
                                 const std::vector<long long>& checkpoints) {
  RegretReport report;
  ExtremalMatchings extremal = extremal_matchings(mu, rule);
  report.curves = regret_curves(traces, extremal, rule, mu, checkpoints);
  const MarketShape& shape = mu.shape();
  auto classify = [&](const std::vector<double>& curve, double scale) {
    std::vector<CurvePoint> pts;
    for (size_t k = 0; k < checkpoints.size(); ++k)
      pts.push_back({static_cast<double>(checkpoints[k]), curve[k]});
    return growth_classifier(pts, scale > 0.0 ? std::optional<double>(scale) : std::nullopt);
  };
  for (int u = 0; u < shape.n_users; ++u) {
    double s = report.curves.step_scale_user[static_cast<size_t>(u)];
    report.optimal_verdict_user.push_back(classify(report.curves.optimal_user[static_cast<size_t>(u)], s));
    report.pessimal_verdict_user.push_back(classify(report.curves.pessimal_user[static_cast<size_t>(u)], s));
  }
  for (int p = 0; p < shape.n_providers; ++p) {
    double s = report.curves.step_scale_provider[static_cast<size_t>(p)];
    report.optimal_verdict_provider.push_back(
        classify(report.curves.optimal_provider[static_cast<size_t>(p)], s));
    report.pessimal_verdict_provider.push_back(
        classify(report.curves.pessimal_provider[static_cast<size_t>(p)], s));
  }
  return report;
}

BoundsReport compute_bounds_report(const ScenarioFile& sf, long long horizon) {
  const Scenario& sc = sf.scenario;
  BoundsReport report;
  report.gaps = compute_gap_stats(sc.true_prefs);

  // Thm-2 column: the scenario's pricing construction when present, else the
  // Lemma-F.1 defaults at the tightest bound covering the user rows.
  double bound_b = 0.0;
  if (sf.pricing) {
    bound_b = sf.pricing->B;
    augment_pricing_gaps(report.gaps, sc.true_prefs, *sf.pricing);
  } else {
    for (int u = 0; u < sc.shape.n_users; ++u)
      for (int p = 0; p < sc.shape.n_providers; ++p)
        bound_b = std::max(bound_b, std::abs(sc.true_prefs.user_pref(u, p)));
    if (bound_b > 0.0)
      augment_pricing_gaps(report.gaps, sc.true_prefs,
                           pricing_defaults(bound_b, sc.shape.n_providers));
  }
  report.pricing_B = bound_b;

  try {
    report.prop1_pessimal =
        theoretical_bound(BoundKind::Prop1Pessimal, report.gaps, sc.shape, sc.sigma2, sc.alpha, horizon);
  } catch (const std::exception&) {
    report.prop1_pessimal.clear();
  }
  try {
    report.thm1 = theoretical_bound(BoundKind::Thm1, report.gaps, sc.shape, sc.sigma2, sc.alpha, horizon);
  } catch (const std::exception& e) {
    report.thm1_reason = e.what();
  }
  try {
    report.thm2 = theoretical_bound(BoundKind::Thm2, report.gaps, sc.shape, sc.sigma2, sc.alpha, horizon);
  } catch (const std::exception& e) {
    report.thm2_reason = e.what();
  }
  return report;
}

namespace {

json curves_to_json(const MarketShape& shape, const std::vector<std::vector<double>>& user_curves,
                    const std::vector<std::vector<double>>& provider_curves) {
  json j;
  for (int u = 0; u < shape.n_users; ++u) j[agent_name(user(u))] = user_curves[static_cast<size_t>(u)];
  for (int p = 0; p < shape.n_providers; ++p)
    j[agent_name(provider(p))] = provider_curves[static_cast<size_t>(p)];
  return j;
}

json verdicts_to_json(const MarketShape& shape, const std::vector<Growth>& user_verdicts,
                      const std::vector<Growth>& provider_verdicts) {
  json j;
  for (int u = 0; u < shape.n_users; ++u)
    j[agent_name(user(u))] = growth_name(user_verdicts[static_cast<size_t>(u)]);
  for (int p = 0; p < shape.n_providers; ++p)
    j[agent_name(provider(p))] = growth_name(provider_verdicts[static_cast<size_t>(p)]);
  return j;
}

json per_agent_json(const MarketShape& shape, const std::vector<double>& values) {
  json j;
  for (int u = 0; u < shape.n_users; ++u) j[agent_name(user(u))] = values[static_cast<size_t>(u)];
  for (int p = 0; p < shape.n_providers; ++p)
    j[agent_name(provider(p))] = values[static_cast<size_t>(shape.n_users + p)];
  return j;
}

json gaps_to_json(const MarketShape& shape, const GapStats& gaps) {
  json j;
  j["delta_min"] = gaps.delta_min;
  json dmax;
  for (int u = 0; u < shape.n_users; ++u)
    dmax[agent_name(user(u))] = gaps.delta_max_user[static_cast<size_t>(u)];
  for (int p = 0; p < shape.n_providers; ++p)
    dmax[agent_name(provider(p))] = gaps.delta_max_provider[static_cast<size_t>(p)];
  j["delta_max"] = dmax;
  j["delta_rho_min"] = gaps.delta_rho_min;
  j["rho_pairwise_unique"] = gaps.rho_pairwise_unique;
  if (gaps.rho_stable) j["rho_stable_matching"] = gaps.rho_stable->to_string();
  if (gaps.pricing_stable) j["pricing_stable_matching"] = gaps.pricing_stable->to_string();
  return j;
}

json bounds_to_json(const MarketShape& shape, const BoundsReport& report) {
  json j;
  j["prop1_pessimal"] =
      report.prop1_pessimal.empty() ? json(nullptr) : per_agent_json(shape, report.prop1_pessimal);
  j["thm1"] = report.thm1.empty() ? json(nullptr) : per_agent_json(shape, report.thm1);
  j["thm2"] = report.thm2.empty() ? json(nullptr) : per_agent_json(shape, report.thm2);
  if (!report.thm1_reason.empty()) j["thm1_unavailable"] = report.thm1_reason;
  if (!report.thm2_reason.empty()) j["thm2_unavailable"] = report.thm2_reason;
  j["thm2_B"] = report.pricing_B;
  return j;
}

}  // namespace

std::string run_simulate(const ScenarioFile& sf, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<Trace> traces = run_batch(sf.scenario, sf.seeds);
  for (size_t i = 0; i < traces.size(); ++i) {
    fs::path csv_path = fs::path(out_dir) / ("trace_seed" + std::to_string(sf.seeds[i]) + ".csv");
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
    write_trace_csv(traces[i], out);
  }

  json summary;
  summary["scenario"] = json::parse(scenario_to_json(sf));
  BoundsReport bounds = compute_bounds_report(sf, std::max<long long>(sf.scenario.horizon, 2));
  summary["gaps"] = gaps_to_json(sf.scenario.shape, bounds.gaps);
  summary["bounds"] = bounds_to_json(sf.scenario.shape, bounds);

  double min_ratio = 1.0;
  long long degenerate = 0;
  for (const Trace& tr : traces) {
    WelfareRatios wr = welfare_ratio_series(tr);
    min_ratio = std::min(min_ratio, wr.min_ratio);
    degenerate += wr.degenerate_steps;
  }
  summary["welfare_min_ratio"] = min_ratio;
  summary["welfare_degenerate_steps"] = degenerate;

  if (!sf.checkpoints.empty() && sf.scenario.horizon > 0) {
    try {
      RegretReport regret = build_regret_report(traces, sf.scenario.rule, sf.scenario.true_prefs,
                                                sf.checkpoints);
      json jr;
      jr["checkpoints"] = sf.checkpoints;
      jr["optimal"] = curves_to_json(sf.scenario.shape, regret.curves.optimal_user,
                                     regret.curves.optimal_provider);
      jr["pessimal"] = curves_to_json(sf.scenario.shape, regret.curves.pessimal_user,
                                      regret.curves.pessimal_provider);
      summary["regret"] = jr;
      json jc;
      jc["optimal"] = verdicts_to_json(sf.scenario.shape, regret.optimal_verdict_user,
                                       regret.optimal_verdict_provider);
      jc["pessimal"] = verdicts_to_json(sf.scenario.shape, regret.pessimal_verdict_user,
                                        regret.pessimal_verdict_provider);
      summary["classifier"] = jc;
    } catch (const std::exception& e) {
      summary["regret"] = nullptr;
      summary["classifier"] = nullptr;
      summary["regret_unavailable"] = e.what();
    }
  } else {
    summary["regret"] = nullptr;
    summary["classifier"] = nullptr;
  }

  std::string text = summary.dump(2);
  std::ofstream out(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary.json");
  out << text << '\n';
  return text;
}

std::string run_enumerate(const ScenarioFile& sf) {
  PayoffTable v = payoff_table(sf.scenario.rule, sf.scenario.true_prefs);
  StableSet stable = enumerate_stable(v);
  std::ostringstream out;
  out << "stable set under rule '" << rule_name(sf.scenario.rule) << "' (" << stable.matchings.size()
      << " matchings; provider order p1..pL, entries are 1-based user indices)\n";
  for (const Matching& m : stable.matchings) out << m.to_string() << '\n';
  return out.str();
}

std::string format_bounds(const ScenarioFile& sf, const BoundsReport& report, long long horizon) {
  const MarketShape& shape = sf.scenario.shape;
  std::ostringstream out;
  out << "gaps: delta_min=" << format_double(report.gaps.delta_min)
      << " delta_rho_min=" << format_double(report.gaps.delta_rho_min)
      << " rho_pairwise_unique=" << (report.gaps.rho_pairwise_unique ? "yes" : "no")
      << " thm2_B=" << format_double(report.pricing_B) << " horizon=" << horizon << "\n";
  out << "agent  delta_max  prop1_pessimal  thm1  thm2\n";
  auto row = [&](AgentId a, int flat) {
    out << agent_name(a) << "  ";
    double dmax = a.side == Side::User ? report.gaps.delta_max_user[static_cast<size_t>(a.index)]
                                       : report.gaps.delta_max_provider[static_cast<size_t>(a.index)];
    out << format_double(dmax) << "  ";
    out << (report.prop1_pessimal.empty() ? "n/a"
                                          : format_double(report.prop1_pessimal[static_cast<size_t>(flat)]))
        << "  ";
    out << (report.thm1.empty() ? "n/a" : format_double(report.thm1[static_cast<size_t>(flat)])) << "  ";
    out << (report.thm2.empty() ? "n/a" : format_double(report.thm2[static_cast<size_t>(flat)])) << "\n";
  };
  for (int u = 0; u < shape.n_users; ++u) row(user(u), u);
  for (int p = 0; p < shape.n_providers; ++p) row(provider(p), shape.n_users + p);
  if (!report.thm1_reason.empty()) out << "thm1 unavailable: " << report.thm1_reason << "\n";
  if (!report.thm2_reason.empty()) out << "thm2 unavailable: " << report.thm2_reason << "\n";
  return out.str();
}

Example1Report run_example1_linear(const ScenarioFile& sf) {
  if (!std::holds_alternative<ZeroRule>(sf.scenario.rule))
    throw scenario_error("example1-linear requires the zero rule");
  Example1Report report;
  report.checkpoints = sf.checkpoints;
  std::vector<Trace> traces = run_batch(sf.scenario, sf.seeds);
  report.regret = build_regret_report(traces, sf.scenario.rule, sf.scenario.true_prefs, sf.checkpoints);

  StableSet stable = enumerate_stable(payoff_table(sf.scenario.rule, sf.scenario.true_prefs));
  if (stable.matchings.size() != 2)
    throw scenario_error("example1-linear expects an instance with exactly two stable matchings");
  PayoffTable true_v = payoff_table(sf.scenario.rule, sf.scenario.true_prefs);
  for (const Trace& tr : traces) {
    for (const StepRecord& rec : tr.records) {
      ++report.steps_total;
      if (rec.matching == stable.matchings[0])
        ++report.steps_m1;
      else if (rec.matching == stable.matchings[1])
        ++report.steps_m2;
      else
        ++report.steps_other;
      if (blocking_pair(rec.matching, true_v)) ++report.steps_unstable;
    }
  }
  return report;
}

Prop3Report run_prop3_adversary(const ScenarioFile& sf) {
  const Scenario& sc = sf.scenario;
  const auto* prop = std::get_if<ProportionalRule>(&sc.rule);
  if (!prop || prop->gamma != 1.0)
    throw scenario_error("prop3-adversary requires the proportional rule with gamma = 1");
  if (sc.shape.n_providers <= 2 || sc.shape.n_users < sc.shape.n_providers)
    throw scenario_error("prop3-adversary requires N >= L > 2");

  const MarketShape& shape = sc.shape;
  const PreferenceTable& mu = sc.true_prefs;
  Prop3Report report;
  report.checkpoints = sf.checkpoints;

  // Reward-space extremal partner: the agent's best counterpart over all
  // feasible matchings, every one of which is stable at gamma = 1.
  auto best_pref = [&](AgentId a) {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : mu.row(a)) best = std::max(best, v);
    return best;
  };
  report.step_scale_user.resize(static_cast<size_t>(shape.n_users));
  report.step_scale_provider.resize(static_cast<size_t>(shape.n_providers));
  for (int u = 0; u < shape.n_users; ++u) {
    double lo = 0.0;
    for (double v : mu.row(user(u))) lo = std::min(lo, v);
    report.step_scale_user[static_cast<size_t>(u)] = best_pref(user(u)) - lo;
  }
  for (int p = 0; p < shape.n_providers; ++p) {
    double lo = std::numeric_limits<double>::infinity();
    for (double v : mu.row(provider(p))) lo = std::min(lo, v);
    report.step_scale_provider[static_cast<size_t>(p)] = best_pref(provider(p)) - lo;
  }

  size_t n_cp = sf.checkpoints.size();
  report.reward_regret_user.assign(static_cast<size_t>(shape.n_users),
                                   std::vector<double>(n_cp, 0.0));
  report.reward_regret_provider.assign(static_cast<size_t>(shape.n_providers),
                                       std::vector<double>(n_cp, 0.0));

  for (std::uint64_t seed : sf.seeds) {
    std::mt19937_64 rng(seed);
    LearnerState learners =
        init_warm_start(shape, sc.sigma2, sc.alpha, sc.warm_start, mu, sc.reward_dist, rng);
    std::vector<double> cum_user(static_cast<size_t>(shape.n_users), 0.0);
    std::vector<double> cum_provider(static_cast<size_t>(shape.n_providers), 0.0);
    std::uniform_int_distribution<int> pick_user(1, shape.n_users - 1);
    size_t next_cp = 0;
    for (long long t = 1; t <= sc.horizon; ++t) {
      // The scheduler's draw precedes the reward draws each step.
      int u_for_p2 = pick_user(rng);
      std::vector<int> provider_to_user(static_cast<size_t>(shape.n_providers), -1);
      provider_to_user[0] = 0;
      provider_to_user[1] = u_for_p2;
      int fill = 1;
      for (int p = 2; p < shape.n_providers; ++p) {
        while (fill == u_for_p2 || fill == 0) ++fill;
        provider_to_user[static_cast<size_t>(p)] = fill++;
      }
      PreferenceTable nu = learners.transient_prefs(t);
      StepRecord rec = settle_step(sc, Matching(std::move(provider_to_user), shape.n_users), nu,
                                   learners, rng, t);
      report.max_abs_welfare = std::max(report.max_abs_welfare, std::abs(rec.welfare));
      if (!rec.stable_under_transient) ++report.unstable_steps;
      for (int u = 0; u < shape.n_users; ++u) {
        int p = rec.matching.provider_of(u);
        double got = p == Matching::kUnmatched ? 0.0 : mu.user_pref(u, p);
        cum_user[static_cast<size_t>(u)] += best_pref(user(u)) - got;
      }
      for (int p = 0; p < shape.n_providers; ++p)
        cum_provider[static_cast<size_t>(p)] +=
            best_pref(provider(p)) - mu.provider_pref(p, rec.matching.user_of(p));
      while (next_cp < n_cp && t == sf.checkpoints[next_cp]) {
        for (int u = 0; u < shape.n_users; ++u)
          report.reward_regret_user[static_cast<size_t>(u)][next_cp] += cum_user[static_cast<size_t>(u)];
        for (int p = 0; p < shape.n_providers; ++p)
          report.reward_regret_provider[static_cast<size_t>(p)][next_cp] +=
              cum_provider[static_cast<size_t>(p)];
        ++next_cp;
      }
    }
  }
  double inv = 1.0 / static_cast<double>(sf.seeds.size());
  for (auto* curves : {&report.reward_regret_user, &report.reward_regret_provider})
    for (auto& c : *curves)
      for (double& v : c) v *= inv;

  auto classify = [&](const std::vector<double>& curve, double scale) {
    std::vector<CurvePoint> pts;
    for (size_t k = 0; k < n_cp; ++k)
      pts.push_back({static_cast<double>(sf.checkpoints[k]), curve[k]});
    return growth_classifier(pts, scale > 0.0 ? std::optional<double>(scale) : std::nullopt);
  };
  for (int u = 0; u < shape.n_users; ++u)
    report.verdict_user.push_back(classify(report.reward_regret_user[static_cast<size_t>(u)],
                                           report.step_scale_user[static_cast<size_t>(u)]));
  for (int p = 0; p < shape.n_providers; ++p)
    report.verdict_provider.push_back(classify(report.reward_regret_provider[static_cast<size_t>(p)],
                                               report.step_scale_provider[static_cast<size_t>(p)]));
  return report;
}

std::string format_example1(const Example1Report& report) {
  std::ostringstream out;
  out << "checkpoints:";
  for (long long c : report.checkpoints) out << ' ' << c;
  out << "\nmean optimal regret per agent:\n";
  const RegretCurves& curves = report.regret.curves;
  for (size_t u = 0; u < curves.optimal_user.size(); ++u) {
    out << "  u" << (u + 1) << ":";
    for (double v : curves.optimal_user[u]) out << ' ' << format_double(v);
    out << "  [" << growth_name(report.regret.optimal_verdict_user[u]) << "]\n";
  }
  for (size_t p = 0; p < curves.optimal_provider.size(); ++p) {
    out << "  p" << (p + 1) << ":";
    for (double v : curves.optimal_provider[p]) out << ' ' << format_double(v);
    out << "  [" << growth_name(report.regret.optimal_verdict_provider[p]) << "]\n";
  }
  out << "steps: total=" << report.steps_total << " M1=" << report.steps_m1
      << " M2=" << report.steps_m2 << " other=" << report.steps_other
      << " unstable_under_mu=" << report.steps_unstable << "\n";
  out << "identity T(M1)+T(M2) >= T - unstable: " << (report.steps_m1 + report.steps_m2) << " >= "
      << (report.steps_total - report.steps_unstable) << "\n";
  return out.str();
}

std::string format_prop3(const Prop3Report& report) {
  std::ostringstream out;
  out << "checkpoints:";
  for (long long c : report.checkpoints) out << ' ' << c;
  out << "\nmean reward-space optimal regret per agent:\n";
  for (size_t u = 0; u < report.reward_regret_user.size(); ++u) {
    out << "  u" << (u + 1) << ":";
    for (double v : report.reward_regret_user[u]) out << ' ' << format_double(v);
    out << "  [" << growth_name(report.verdict_user[u]) << "]\n";
  }
  for (size_t p = 0; p < report.reward_regret_provider.size(); ++p) {
    out << "  p" << (p + 1) << ":";
    for (double v : report.reward_regret_provider[p]) out << ' ' << format_double(v);
    out << "  [" << growth_name(report.verdict_provider[p]) << "]\n";
  }
  out << "max |W_t| over all steps: " << format_double(report.max_abs_welfare) << "\n";
  out << "steps unstable under transient payoffs: " << report.unstable_steps << "\n";
  return out.str();
}

}  // namespace matchmarket
