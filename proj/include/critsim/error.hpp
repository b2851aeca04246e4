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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace critsim
{

enum class ErrorKind
{
  Syntax,
  Reference,
  Range,
  NoMatch,
  Unsatisfiable,
  NotSignalized,
  SpawnInfeasible,
  Binding,
  UnknownKind,
  DuplicateKind,
  OwnershipConflict,
  UnknownPair,
  KnobExhausted,
  MalformedTrace,
  Backend,
  SchemaViolation,
  Usage,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the library reports carries a kind so callers (and the CLI
/// exit-code mapping) can branch on it without parsing messages.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & message)
  : std::runtime_error(message), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// One invariant violation found by a validator; `path` locates the field.
struct Violation
{
  ErrorKind kind{ErrorKind::Range};
  std::string path;
  std::string message;

  std::string describe() const { return path + ": " + message; }
};

/// Throws an Error built from the first violation, if any.
void throw_first(const std::vector<Violation> & violations, const std::string & context);

}  // namespace critsim
