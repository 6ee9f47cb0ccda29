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

#include "matchmarket/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matchmarket {

namespace {

// Gap statistics over one row, with the unmatched option (0) appended.
struct RowGaps {
  double min_gap;
  double spread;
};

RowGaps row_gaps(std::span<const double> row) {
  std::vector<double> vals(row.begin(), row.end());
  vals.push_back(0.0);
  std::sort(vals.begin(), vals.end());
  double min_gap = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < vals.size(); ++i) min_gap = std::min(min_gap, vals[i] - vals[i - 1]);
  return {min_gap, vals.back() - vals.front()};
}

bool pairwise_unique(const PreferenceTable& t) {
  const MarketShape& s = t.shape();
  std::vector<double> vals;
  vals.reserve(static_cast<size_t>(s.n_users) * s.n_providers);
  for (int u = 0; u < s.n_users; ++u)
    for (int p = 0; p < s.n_providers; ++p) vals.push_back(t.user_pref(u, p));
  std::sort(vals.begin(), vals.end());
  return std::adjacent_find(vals.begin(), vals.end()) == vals.end();
}

}  // namespace

GapStats compute_gap_stats(const PreferenceTable& mu) {
  const MarketShape& shape = mu.shape();
  GapStats gaps;
  gaps.delta_min = std::numeric_limits<double>::infinity();
  gaps.delta_max_user.resize(static_cast<size_t>(shape.n_users));
  gaps.delta_max_provider.resize(static_cast<size_t>(shape.n_providers));
  for (int u = 0; u < shape.n_users; ++u) {
    RowGaps g = row_gaps(mu.row(user(u)));
    gaps.delta_min = std::min(gaps.delta_min, g.min_gap);
    gaps.delta_max_user[static_cast<size_t>(u)] = g.spread;
  }
  for (int p = 0; p < shape.n_providers; ++p) {
    RowGaps g = row_gaps(mu.row(provider(p)));
    gaps.delta_min = std::min(gaps.delta_min, g.min_gap);
    gaps.delta_max_provider[static_cast<size_t>(p)] = g.spread;
  }

  gaps.rho = PreferenceTable(shape);
  for (int u = 0; u < shape.n_users; ++u)
    for (int p = 0; p < shape.n_providers; ++p) {
      double r = 0.5 * (mu.user_pref(u, p) + mu.provider_pref(p, u));
      gaps.rho.set_user_pref(u, p, r);
      gaps.rho.set_provider_pref(p, u, r);
    }
  gaps.delta_rho_min = std::numeric_limits<double>::infinity();
  for (int u = 0; u < shape.n_users; ++u)
    gaps.delta_rho_min = std::min(gaps.delta_rho_min, row_gaps(gaps.rho.row(user(u))).min_gap);
  for (int p = 0; p < shape.n_providers; ++p)
    gaps.delta_rho_min = std::min(gaps.delta_rho_min, row_gaps(gaps.rho.row(provider(p))).min_gap);
  gaps.rho_pairwise_unique = pairwise_unique(gaps.rho);

  if (gaps.rho_pairwise_unique) {
    gaps.rho_stable = unique_stable(gaps.rho);
    if (gaps.rho_stable) {
      const Matching& m = *gaps.rho_stable;
      gaps.delta_rho_max_star_user.resize(static_cast<size_t>(shape.n_users));
      gaps.delta_rho_max_star_provider.resize(static_cast<size_t>(shape.n_providers));
      auto star_gap = [&](AgentId a, const OptAgent& partner) {
        double at_star = gaps.rho.at(a, partner);
        auto row = gaps.rho.row(a);
        double lo = 0.0;  // the unmatched option
        for (double v : row) lo = std::min(lo, v);
        return at_star - lo;
      };
      for (int u = 0; u < shape.n_users; ++u)
        gaps.delta_rho_max_star_user[static_cast<size_t>(u)] = star_gap(user(u), m.partner(user(u)));
      for (int p = 0; p < shape.n_providers; ++p)
        gaps.delta_rho_max_star_provider[static_cast<size_t>(p)] =
            star_gap(provider(p), m.partner(provider(p)));
    }
  }
  return gaps;
}

void augment_pricing_gaps(GapStats& gaps, const PreferenceTable& mu, const PricingParams& pricing) {
  const MarketShape& shape = mu.shape();
  RuleRegime rule = PricingRule{pricing.c1, pricing.c2, pricing.g};
  gaps.pricing_bound_B = pricing.B;
  gaps.pricing_stable = unique_stable(payoff_table(rule, mu));
  if (!gaps.pricing_stable) return;
  const Matching& m = *gaps.pricing_stable;
  gaps.delta_b_max_star_user.resize(static_cast<size_t>(shape.n_users));
  gaps.delta_b_max_star_provider.resize(static_cast<size_t>(shape.n_providers));
  auto star_gap = [&](AgentId a, const OptAgent& partner) {
    double at_star = mu.at(a, partner);
    double lo = 0.0;
    for (double v : mu.row(a)) lo = std::min(lo, v);
    return at_star - lo;
  };
  double user_offset = 2.0 * pricing.B * (shape.n_providers - 1);
  for (int u = 0; u < shape.n_users; ++u)
    gaps.delta_b_max_star_user[static_cast<size_t>(u)] =
        user_offset + star_gap(user(u), m.partner(user(u)));
  for (int p = 0; p < shape.n_providers; ++p)
    gaps.delta_b_max_star_provider[static_cast<size_t>(p)] =
        star_gap(provider(p), m.partner(provider(p)));
}

double expected_true_payoff(const RuleRegime& rule, const PreferenceTable& mu, AgentId a,
                            const OptAgent& b) {
  return payoff(rule, mu, a, b);
}

const Matching& ExtremalMatchings::optimal(AgentId a) const {
  return a.side == Side::User ? optimal_user[static_cast<size_t>(a.index)]
                              : optimal_provider[static_cast<size_t>(a.index)];
}

const Matching& ExtremalMatchings::pessimal(AgentId a) const {
  return a.side == Side::User ? pessimal_user[static_cast<size_t>(a.index)]
                              : pessimal_provider[static_cast<size_t>(a.index)];
}

ExtremalMatchings extremal_matchings(const PreferenceTable& mu, const RuleRegime& rule,
                                     long long budget) {
  const MarketShape& shape = mu.shape();
  ExtremalMatchings out;
  out.stable = enumerate_stable(payoff_table(rule, mu), budget);

  auto pick = [&](AgentId a, bool want_max) -> const Matching& {
    const Matching* best = &out.stable.matchings.front();
    double best_v = expected_true_payoff(rule, mu, a, best->partner(a));
    for (const Matching& m : out.stable.matchings) {
      double v = expected_true_payoff(rule, mu, a, m.partner(a));
      if (want_max ? v > best_v : v < best_v) {
        best = &m;
        best_v = v;
      }
    }
    return *best;
  };

  for (int u = 0; u < shape.n_users; ++u) {
    out.optimal_user.push_back(pick(user(u), true));
    out.pessimal_user.push_back(pick(user(u), false));
  }
  for (int p = 0; p < shape.n_providers; ++p) {
    out.optimal_provider.push_back(pick(provider(p), true));
    out.pessimal_provider.push_back(pick(provider(p), false));
  }
  return out;
}

RegretCurves regret_curves(const std::vector<Trace>& traces, const ExtremalMatchings& extremal,
                           const RuleRegime& rule, const PreferenceTable& mu,
                           const std::vector<long long>& checkpoints) {
  const MarketShape& shape = mu.shape();
  if (traces.empty()) throw parameter_error("regret_curves needs at least one trace");
  for (const Trace& tr : traces) {
    if (tr.scenario.shape != shape)
      throw parameter_error("trace shape does not match the requested report");
    if (rule_name(tr.scenario.rule) != rule_name(rule))
      throw parameter_error("trace rule does not match the requested report");
    for (long long c : checkpoints)
      if (c < 1 || c > static_cast<long long>(tr.records.size()))
        throw parameter_error("checkpoint outside the trace horizon");
  }

  const int n_agents = shape.n_users + shape.n_providers;
  auto agent_at = [&](int i) {
    return i < shape.n_users ? user(i) : provider(i - shape.n_users);
  };

  std::vector<double> opt_value(static_cast<size_t>(n_agents)), pes_value(static_cast<size_t>(n_agents));
  RegretCurves out;
  out.checkpoints = checkpoints;
  out.step_scale_user.resize(static_cast<size_t>(shape.n_users));
  out.step_scale_provider.resize(static_cast<size_t>(shape.n_providers));
  for (int i = 0; i < n_agents; ++i) {
    AgentId a = agent_at(i);
    opt_value[static_cast<size_t>(i)] = expected_true_payoff(rule, mu, a, extremal.optimal(a).partner(a));
    pes_value[static_cast<size_t>(i)] = expected_true_payoff(rule, mu, a, extremal.pessimal(a).partner(a));
    // Worst single-step payoff the agent can be assigned: any counterpart or
    // unmatched (users only; providers are always matched).
    double lo = a.side == Side::User ? 0.0 : std::numeric_limits<double>::infinity();
    for (int j = 0; j < shape.count(opposite(a.side)); ++j)
      lo = std::min(lo, expected_true_payoff(rule, mu, a, AgentId{opposite(a.side), j}));
    double scale = opt_value[static_cast<size_t>(i)] - lo;
    if (a.side == Side::User)
      out.step_scale_user[static_cast<size_t>(a.index)] = scale;
    else
      out.step_scale_provider[static_cast<size_t>(a.index)] = scale;
  }

  auto zero_curves = [&](int count) {
    return std::vector<std::vector<double>>(static_cast<size_t>(count),
                                            std::vector<double>(checkpoints.size(), 0.0));
  };
  out.optimal_user = zero_curves(shape.n_users);
  out.pessimal_user = zero_curves(shape.n_users);
  out.optimal_provider = zero_curves(shape.n_providers);
  out.pessimal_provider = zero_curves(shape.n_providers);

  for (const Trace& tr : traces) {
    std::vector<double> cum_opt(static_cast<size_t>(n_agents), 0.0);
    std::vector<double> cum_pes(static_cast<size_t>(n_agents), 0.0);
    size_t next_cp = 0;
    for (size_t s = 0; s < tr.records.size() && next_cp < checkpoints.size(); ++s) {
      const Matching& m = tr.records[s].matching;
      for (int i = 0; i < n_agents; ++i) {
        AgentId a = agent_at(i);
        double assigned = expected_true_payoff(rule, mu, a, m.partner(a));
        cum_opt[static_cast<size_t>(i)] += opt_value[static_cast<size_t>(i)] - assigned;
        cum_pes[static_cast<size_t>(i)] += pes_value[static_cast<size_t>(i)] - assigned;
      }
      while (next_cp < checkpoints.size() &&
             static_cast<long long>(s + 1) == checkpoints[next_cp]) {
        for (int u = 0; u < shape.n_users; ++u) {
          out.optimal_user[static_cast<size_t>(u)][next_cp] += cum_opt[static_cast<size_t>(u)];
          out.pessimal_user[static_cast<size_t>(u)][next_cp] += cum_pes[static_cast<size_t>(u)];
        }
        for (int p = 0; p < shape.n_providers; ++p) {
          out.optimal_provider[static_cast<size_t>(p)][next_cp] +=
              cum_opt[static_cast<size_t>(shape.n_users + p)];
          out.pessimal_provider[static_cast<size_t>(p)][next_cp] +=
              cum_pes[static_cast<size_t>(shape.n_users + p)];
        }
        ++next_cp;
      }
    }
  }
  double inv = 1.0 / static_cast<double>(traces.size());
  for (auto* curves : {&out.optimal_user, &out.pessimal_user, &out.optimal_provider, &out.pessimal_provider})
    for (auto& c : *curves)
      for (double& v : c) v *= inv;
  return out;
}

std::vector<double> theoretical_bound(BoundKind kind, const GapStats& gaps,
                                      const MarketShape& shape, double sigma2, double alpha,
                                      long long horizon) {
  return theoretical_bound_logt(kind, gaps, shape, sigma2, alpha,
                                std::log(static_cast<double>(horizon)));
}

std::vector<double> theoretical_bound_logt(BoundKind kind, const GapStats& gaps,
                                           const MarketShape& shape, double sigma2, double alpha,
                                           double log_t) {
  if (!(alpha > 2.0)) throw parameter_error("bounds require alpha > 2");
  double n2l = static_cast<double>(shape.n_users) * shape.n_users * shape.n_providers;
  auto core = [&](double gap) {
    if (gap <= 0.0) throw tie_error("bound undefined: the minimum preference gap is zero");
    return 8.0 * sigma2 * alpha * log_t / (gap * gap) + alpha / (alpha - 2.0);
  };

  std::vector<double> out;
  out.reserve(static_cast<size_t>(shape.n_users + shape.n_providers));
  switch (kind) {
    case BoundKind::Prop1Pessimal: {
      double c = core(gaps.delta_min);
      for (double d : gaps.delta_max_user) out.push_back(2.0 * n2l * d * c);
      for (double d : gaps.delta_max_provider) out.push_back(2.0 * n2l * d * c);
      break;
    }
    case BoundKind::Thm1: {
      if (!gaps.rho_stable)
        throw tie_error("Thm-1 bound needs a pairwise-unique rho with its unique stable matching");
      double c = core(gaps.delta_rho_min);
      for (double d : gaps.delta_rho_max_star_user) out.push_back(d * n2l * c);
      for (double d : gaps.delta_rho_max_star_provider) out.push_back(d * n2l * c);
      break;
    }
    case BoundKind::Thm2: {
      if (!gaps.pricing_stable)
        throw tie_error("Thm-2 bound needs the pricing construction's unique stable matching");
      double c = core(gaps.delta_min);
      for (double d : gaps.delta_b_max_star_user) out.push_back(2.0 * d * n2l * c);
      for (double d : gaps.delta_b_max_star_provider) out.push_back(2.0 * d * n2l * c);
      break;
    }
  }
  return out;
}

WelfareRatios welfare_ratio_series(const Trace& trace) {
  WelfareRatios out;
  out.ratio.reserve(trace.records.size());
  constexpr double kZero = 1e-12;
  for (const StepRecord& rec : trace.records) {
    double r;
    if (std::abs(rec.welfare_max) <= kZero)
      r = std::abs(rec.welfare) <= kZero ? 1.0 : 0.0;
    else
      r = rec.welfare / rec.welfare_max;
    if (std::abs(rec.welfare) <= kZero) ++out.degenerate_steps;
    out.ratio.push_back(r);
    out.min_ratio = std::min(out.min_ratio, r);
  }
  return out;
}

std::string growth_name(Growth g) {
  switch (g) {
    case Growth::Logarithmic: return "Logarithmic";
    case Growth::Linear: return "Linear";
    default: return "Indeterminate";
  }
}

namespace {

struct Fit {
  double slope;
  double ssr;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double intercept = my - slope * mx;
  double ssr = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (intercept + slope * x[i]);
    ssr += e * e;
  }
  return {slope, ssr};
}

}  // namespace

Growth growth_classifier(const std::vector<CurvePoint>& curve, std::optional<double> step_scale) {
  if (curve.size() < 4)
    throw parameter_error("growth classification needs at least 4 checkpoints");
  for (size_t i = 1; i < curve.size(); ++i)
    if (!(curve[i].horizon > curve[i - 1].horizon))
      throw parameter_error("checkpoints must be strictly increasing");

  double magnitude = 0.0;
  for (const CurvePoint& p : curve) magnitude = std::max(magnitude, std::abs(p.value));
  if (magnitude < 1e-12) return Growth::Logarithmic;  // identically flat at zero

  std::vector<double> h, lh, v;
  for (const CurvePoint& p : curve) {
    h.push_back(p.horizon);
    lh.push_back(std::log(p.horizon));
    v.push_back(p.value);
  }
  double range = *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
  if (range <= 1e-9 * std::max(1.0, magnitude)) return Growth::Logarithmic;  // constant

  Fit lin = least_squares(h, v);
  Fit logfit = least_squares(lh, v);

  constexpr double kLogSlope = 0.02;  // fraction of the per-step scale
  constexpr double kLinSlope = 0.05;
  if (step_scale && *step_scale > 0.0 && lin.slope <= kLogSlope * *step_scale)
    return Growth::Logarithmic;
  if (logfit.ssr <= lin.ssr) return Growth::Logarithmic;

  if (lin.slope > 0.0) {
    // Persistent late growth: every gap in the last half keeps at least half
    // the fitted slope.
    bool persistent = true;
    size_t gaps = curve.size() - 1;
    for (size_t j = gaps - (gaps + 1) / 2; j < gaps; ++j) {
      double g = (v[j + 1] - v[j]) / (h[j + 1] - h[j]);
      if (g < 0.5 * lin.slope) persistent = false;
    }
    bool big_enough = !step_scale || lin.slope >= kLinSlope * *step_scale;
    if (persistent && big_enough) return Growth::Linear;
  }
  return Growth::Indeterminate;
}

std::vector<long long> geometric_checkpoints(long long horizon, int points) {
  std::vector<long long> out;
  if (horizon < 1 || points < 1) return out;
  for (int k = points - 1; k >= 0; --k) {
    long long c = horizon >> k;
    if (c >= 1 && (out.empty() || c > out.back())) out.push_back(c);
  }
  return out;
}

}  // namespace matchmarket
