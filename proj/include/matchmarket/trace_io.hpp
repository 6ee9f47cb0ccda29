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

#include <ostream>
#include <string>

#include "matchmarket/market.hpp"

namespace matchmarket {

// Agent naming used in every external artifact: u1..uN then p1..pL.
std::string agent_name(AgentId a);

// Locale-independent shortest round-trip formatting.
std::string format_double(double v);

// One row per step:
//   t,matching,U_u1..U_uN,U_p1..U_pL,W_t,W_max,stable
// `matching` is the provider_to_user array as dash-joined 1-based user
// indices in provider order; `stable` is 1/0.
void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace matchmarket
