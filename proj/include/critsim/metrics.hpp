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

#include "critsim/sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace critsim
{

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct FramePairState
{
  double t{0.0};
  double delta{0.0};
  double closing_rate{0.0};  // rate of decrease of delta, m/s
  double act{kInf};
};

/// Per-frame ACT for one vehicle pair. The first frame, and any frame whose
/// predecessor lacks the pair, has no closing rate and ACT = +inf.
/// Throws Error(UnknownPair) when the pair is recorded in fewer than 2 frames.
std::vector<FramePairState> act_series(const SimTrace & trace, const std::string & a, const std::string & b);

/// ACT from raw distances sampled every dt; the same rule as act_series.
std::vector<FramePairState> act_from_distances(const std::vector<double> & delta, double dt);

double min_act(const std::vector<FramePairState> & series);

struct ComfortConfig
{
  int window{5};
  double epsilon{1e-3};
};

/// Centred moving average of |a| over `window` frames, truncated at the ends.
std::vector<double> denoise(const std::vector<double> & magnitudes, int window);

/// Mean of 1 / (|a~| + 1) over frames with |a~| > epsilon; 1.0 when none.
double comfortability_from_accel(const std::vector<double> & accel, const ComfortConfig & config = {});
double comfortability(const SimTrace & trace, const std::string & vehicle = "ego", const ComfortConfig & config = {});

struct CollisionRecord
{
  bool collided{false};
  std::int64_t first_tick{-1};
  std::vector<std::string> parties;  // vehicles that hit the ego, in order

  friend bool operator==(const CollisionRecord &, const CollisionRecord &) = default;
};

struct MetricsSummary
{
  double min_act{kInf};
  std::string min_act_pair;  // adversary id of the most critical pair
  double comfortability{1.0};
  CollisionRecord collision;
  double min_delta{kInf};

  friend bool operator==(const MetricsSummary &, const MetricsSummary &) = default;
};

/// Ego-centred summary: ACT over every ego x adversary pair, ego comfort and
/// ego collisions.
MetricsSummary evaluate(const SimTrace & trace, const ComfortConfig & config = {});

struct BatchSummary
{
  std::size_t n{0};
  double mean_min_act{kInf};  // over finite per-run minima
  std::size_t finite_act{0};
  std::size_t infinite_act{0};
  double global_min_act{kInf};
  double mean_comfortability{1.0};
  std::size_t crashes{0};
  double crash_rate{0.0};
  std::map<std::string, std::size_t> parties;  // collision partner histogram
};

BatchSummary summarize_batch(const std::vector<MetricsSummary> & runs);

/// Fraction of runs with an ego collision.
double crash_rate(const std::vector<MetricsSummary> & runs);

/// Percentage with one decimal, halves rounded up: 15 of 32 -> "46.9%".
std::string render_percent(std::size_t count, std::size_t n);
std::string render_percent(double fraction);

/// "1.234" for finite values, "inf" otherwise; used by reports.
std::string render_seconds(double value);

nlohmann::json metrics_to_json(const MetricsSummary & m);
MetricsSummary metrics_from_json(const nlohmann::json & j);
nlohmann::json batch_to_json(const BatchSummary & b);

}  // namespace critsim
