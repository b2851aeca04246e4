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

// JSON encoding of the scenario model, shared by the scenario document,
// the trace header and the remote generation backend.

#include "critsim/scenario.hpp"

#include <json.hpp>

namespace critsim
{

nlohmann::json condition_to_json(const Condition & c);
nlohmann::json node_to_json(const BehaviorNode & node);
nlohmann::json scenario_to_json(const ScenarioSpec & spec);

/// Decoders throw Error(Syntax) naming the JSON path of the bad field.
Condition condition_from_json(const nlohmann::json & j, const std::string & path);
BehaviorNode node_from_json(const nlohmann::json & j, const std::string & path);
WeatherConfig weather_from_json(const nlohmann::json & j, const std::string & path);
ScenarioSpec scenario_from_json(const nlohmann::json & j);

}  // namespace critsim
