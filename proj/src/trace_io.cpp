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

#include "matchmarket/trace_io.hpp"

#include <charconv>

namespace matchmarket {

std::string agent_name(AgentId a) {
  return (a.side == Side::User ? "u" : "p") + std::to_string(a.index + 1);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  const MarketShape& shape = trace.scenario.shape;
  out << "t,matching";
  for (int u = 0; u < shape.n_users; ++u) out << ",U_u" << (u + 1);
  for (int p = 0; p < shape.n_providers; ++p) out << ",U_p" << (p + 1);
  out << ",W_t,W_max,stable\n";
  for (const StepRecord& rec : trace.records) {
    out << rec.t << ',' << rec.matching.to_string();
    for (double v : rec.user_payoffs) out << ',' << format_double(v);
    for (double v : rec.provider_payoffs) out << ',' << format_double(v);
    out << ',' << format_double(rec.welfare) << ',' << format_double(rec.welfare_max) << ','
        << (rec.stable_under_transient ? '1' : '0') << '\n';
  }
}

}  // namespace matchmarket
