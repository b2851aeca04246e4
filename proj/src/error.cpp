// Copyright 2026 The critsim Authors
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

#include "critsim/error.hpp"

namespace critsim
{

std::string_view to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Reference: return "reference";
    case ErrorKind::Range: return "range";
    case ErrorKind::NoMatch: return "no-match";
    case ErrorKind::Unsatisfiable: return "unsatisfiable-relation";
    case ErrorKind::NotSignalized: return "not-signalized";
    case ErrorKind::SpawnInfeasible: return "spawn-infeasible";
    case ErrorKind::Binding: return "binding";
    case ErrorKind::UnknownKind: return "unknown-kind";
    case ErrorKind::DuplicateKind: return "duplicate-kind";
    case ErrorKind::OwnershipConflict: return "ownership-conflict";
    case ErrorKind::UnknownPair: return "unknown-pair";
    case ErrorKind::KnobExhausted: return "knob-exhausted";
    case ErrorKind::MalformedTrace: return "malformed-trace";
    case ErrorKind::Backend: return "backend";
    case ErrorKind::SchemaViolation: return "schema-violation";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

void throw_first(const std::vector<Violation> & violations, const std::string & context)
{
  if (violations.empty()) {
    return;
  }
  const auto & v = violations.front();
  std::string msg = context + ": " + v.describe();
  if (violations.size() > 1) {
    msg += " (and " + std::to_string(violations.size() - 1) + " more)";
  }
  throw Error(v.kind, msg);
}

}  // namespace critsim
