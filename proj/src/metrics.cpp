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


#include "critsim/metrics.hpp"

#include "critsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace critsim
{

using nlohmann::json;

std::vector<FramePairState> act_from_distances(const std::vector<double> & delta, double dt)
{
  std::vector<FramePairState> out;
  out.reserve(delta.size());
  for (std::size_t k = 0; k < delta.size(); ++k) {
    FramePairState f;
    f.t = static_cast<double>(k) * dt;
    f.delta = delta[k];
    if (k > 0) {
      f.closing_rate = (delta[k - 1] - delta[k]) / dt;
      if (f.closing_rate > 0.0) f.act = f.delta / f.closing_rate;
    }
    out.push_back(f);
  }
  return out;
}

std::vector<FramePairState> act_series(const SimTrace & trace, const std::string & a, const std::string & b)
{
  std::vector<FramePairState> out;
  const PairRecord * prev = nullptr;
  std::size_t seen = 0;
  for (const auto & tick : trace.ticks) {
    const PairRecord * p = tick.pair(a, b);
    if (p == nullptr) {
      prev = nullptr;
      continue;
    }
    ++seen;
    FramePairState f;
    f.t = tick.t;
    f.delta = p->delta;
    if (prev != nullptr) {
      f.closing_rate = (prev->delta - p->delta) / trace.dt;
      if (f.closing_rate > 0.0) f.act = f.delta / f.closing_rate;
    }
    out.push_back(f);
    prev = p;
  }
  if (seen < 2) {
    throw Error(ErrorKind::UnknownPair, "pair (" + a + ", " + b + ") is recorded in fewer than 2 frames");
  }
  return out;
}

double min_act(const std::vector<FramePairState> & series)
{
  double m = kInf;
  for (const auto & f : series) m = std::min(m, f.act);
  return m;
}

std::vector<double> denoise(const std::vector<double> & magnitudes, int window)
{
  const auto n = static_cast<std::ptrdiff_t>(magnitudes.size());
  const std::ptrdiff_t half = std::max(window, 1) / 2;
  std::vector<double> out(magnitudes.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += std::abs(magnitudes[j]);
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

double comfortability_from_accel(const std::vector<double> & accel, const ComfortConfig & config)
{
  const auto smooth = denoise(accel, config.window);
  double sum = 0.0;
  std::size_t count = 0;
  for (double a : smooth) {
    if (a > config.epsilon) {
      sum += 1.0 / (a + 1.0);
      ++count;
    }
  }
  return count == 0 ? 1.0 : sum / static_cast<double>(count);
}

double comfortability(const SimTrace & trace, const std::string & vehicle, const ComfortConfig & config)
{
  std::vector<double> accel;
  accel.reserve(trace.ticks.size());
  for (const auto & tick : trace.ticks) {
    if (const auto * v = tick.vehicle(vehicle)) accel.push_back(v->accel);
  }
  return comfortability_from_accel(accel, config);
}

MetricsSummary evaluate(const SimTrace & trace, const ComfortConfig & config)
{
  MetricsSummary m;
  for (const auto & adv : trace.adversaries) {
    bool present = false;
    for (const auto & tick : trace.ticks) {
      if (const auto * p = tick.pair(kEgoId, adv)) {
        present = true;
        m.min_delta = std::min(m.min_delta, p->delta);
      }
    }
    if (!present) continue;
    std::vector<FramePairState> series;
    try {
      series = act_series(trace, kEgoId, adv);
    } catch (const Error &) {
      continue;
    }
    const double v = min_act(series);
    if (m.min_act_pair.empty() || v < m.min_act) {
      m.min_act = v;
      m.min_act_pair = adv;
    }
  }
  m.comfortability = comfortability(trace, kEgoId, config);
  for (const auto & c : trace.collisions) {
    if (!c.involves(kEgoId)) continue;
    if (!m.collision.collided) m.collision.first_tick = c.k;
    m.collision.collided = true;
    m.collision.parties.push_back(c.a == kEgoId ? c.b : c.a);
  }
  return m;
}

double crash_rate(const std::vector<MetricsSummary> & runs)
{
  if (runs.empty()) return 0.0;
  const auto crashes = std::count_if(runs.begin(), runs.end(), [](const MetricsSummary & m) { return m.collision.collided; });
  return static_cast<double>(crashes) / static_cast<double>(runs.size());
}

BatchSummary summarize_batch(const std::vector<MetricsSummary> & runs)
{
  BatchSummary b;
  b.n = runs.size();
  double act_sum = 0.0;
  double comfort_sum = 0.0;
  for (const auto & r : runs) {
    if (std::isfinite(r.min_act)) {
      act_sum += r.min_act;
      ++b.finite_act;
    } else {
      ++b.infinite_act;
    }
    b.global_min_act = std::min(b.global_min_act, r.min_act);
    comfort_sum += r.comfortability;
    if (r.collision.collided) {
      ++b.crashes;
      for (const auto & p : r.collision.parties) ++b.parties[p];
    }
  }
  if (b.finite_act > 0) b.mean_min_act = act_sum / static_cast<double>(b.finite_act);
  if (b.n > 0) {
    b.mean_comfortability = comfort_sum / static_cast<double>(b.n);
    b.crash_rate = static_cast<double>(b.crashes) / static_cast<double>(b.n);
  }
  return b;
}

std::string render_percent(std::size_t count, std::size_t n)
{
  if (n == 0) throw Error(ErrorKind::Range, "percentage of an empty batch");
  // tenths of a percent, rounded half up in integer arithmetic
  const std::uint64_t tenths = (2000ULL * count + n) / (2ULL * n);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

std::string render_percent(double fraction)
{
  const auto tenths = static_cast<std::uint64_t>(std::floor(fraction * 1000.0 + 0.5 + 1e-9));
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

std::string render_seconds(double value)
{
  if (!std::isfinite(value)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

namespace
{

json number_or_inf(double v)
{
  if (std::isfinite(v)) return v;
  return "inf";
}

double number_from(const json & j)
{
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw Error(ErrorKind::Syntax, "expected a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

json metrics_to_json(const MetricsSummary & m)
{
  return {
    {"min_act", number_or_inf(m.min_act)},
    {"min_act_pair", m.min_act_pair},
    {"comfortability", m.comfortability},
    {"collision", {{"collided", m.collision.collided}, {"first_tick", m.collision.first_tick}, {"parties", m.collision.parties}}},
    {"min_delta", number_or_inf(m.min_delta)}};
}

MetricsSummary metrics_from_json(const json & j)
{
  try {
    MetricsSummary m;
    m.min_act = number_from(j.at("min_act"));
    m.min_act_pair = j.at("min_act_pair").get<std::string>();
    m.comfortability = j.at("comfortability").get<double>();
    const auto & c = j.at("collision");
    m.collision.collided = c.at("collided").get<bool>();
    m.collision.first_tick = c.at("first_tick").get<std::int64_t>();
    m.collision.parties = c.at("parties").get<std::vector<std::string>>();
    m.min_delta = number_from(j.at("min_delta"));
    return m;
  } catch (const json::exception & e) {
    throw Error(ErrorKind::Syntax, std::string("metrics: ") + e.what());
  }
}

json batch_to_json(const BatchSummary & b)
{
  return {
    {"n", b.n},
    {"mean_min_act", number_or_inf(b.mean_min_act)},
    {"finite_act", b.finite_act},
    {"infinite_act", b.infinite_act},
    {"global_min_act", number_or_inf(b.global_min_act)},
    {"mean_comfortability", b.mean_comfortability},
    {"crashes", b.crashes},
    {"crash_rate", b.crash_rate},
    {"crash_rate_percent", render_percent(b.crashes, std::max<std::size_t>(b.n, 1))},
    {"parties", b.parties}};
}

}  // namespace critsim
