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

#include "critsim/metrics.hpp"
#include "critsim/pipeline.hpp"
#include "critsim/refine.hpp"
#include "critsim/scenario.hpp"
#include "critsim/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace critsim
{

struct BatchConfig
{
  std::string label{"batch"};
  /// Text every run is generated from; run i uses seed seed_base + i.
  std::string description;
  /// Fixed scenario document used instead of a description; run i
  /// simulates it with its seed replaced by seed_base + i.
  std::optional<ScenarioSpec> scenario;
  std::size_t n{32};
  std::uint64_t seed_base{1000};
  double duration{30.0};
  bool refine{false};
  int budget{5};
  /// 0 picks the number of hardware threads.
  unsigned workers{0};
  /// Run directory; nothing is written when empty.
  std::filesystem::path output_dir;
  SimConfig sim{};
  /// One backend per worker; null means the template engine.
  std::function<std::unique_ptr<GenerationBackend>()> backend_factory;
  /// One refiner per worker; null means the rule-based refiner.
  std::function<std::unique_ptr<Refiner>()> refiner_factory;
};

struct RunResult
{
  std::size_t index{0};
  std::uint64_t seed{0};
  bool ok{false};
  ErrorKind error_kind{ErrorKind::Range};
  std::string error;
  ScenarioSpec spec;
  std::vector<std::string> notes;
  SimTrace trace;
  MetricsSummary metrics;
  std::optional<RefineOutcome> refinement;
};

struct BatchResult
{
  std::string label;
  std::vector<RunResult> runs;  // in run-index order
  BatchSummary original;
  std::optional<BatchSummary> refined;
  std::size_t failures{0};
};

/// Generates (or loads), simulates, optionally refines and evaluates
/// config.n runs. A failing run is recorded and skipped; the batch throws
/// when more than half of the runs fail.
BatchResult run_batch(const BatchConfig & config, const MapLibrary & maps);

/// One labelled row of a report table.
struct ReportRow
{
  std::string label;
  BatchSummary summary;
};

struct Report
{
  std::string csv;
  std::string markdown;
};

/// Table with the columns Scenario, ACT, Comfortability, CR.
Report emit_report(const std::vector<ReportRow> & rows);

/// "0.137", "0.137 (inf 2/32)" style cell; "∞ (n/n)" when no run is finite.
std::string render_act_cell(const BatchSummary & summary);

std::vector<ReportRow> report_rows(const BatchResult & result);

/// Writes run_XXX/ folders, batch.csv, runs.csv, report.md and summary.json.
void write_run_directory(const BatchResult & result, const BatchConfig & config, const std::filesystem::path & dir);

/// Per-run table; refinement columns appear only when the batch refined.
std::string runs_csv(const BatchResult & result);

struct ReplayResult
{
  MetricsSummary metrics;
  std::optional<MetricsSummary> stored;
  /// Set when stored metrics were given: true iff both serialize identically.
  std::optional<bool> matches;
};

/// Recomputes metrics from a trace file. Throws Error(MalformedTrace) naming
/// the first bad line.
ReplayResult replay(const std::filesystem::path & trace_file, const std::optional<std::filesystem::path> & metrics_file = {});

/// Top-down SVG of one recorded tick.
std::string render_svg(const TickRecord & tick, const LaneGraph & map);

/// Writes one snapshot every `every` seconds (t = 0, every, 2 every, ...)
/// and returns the file paths.
std::vector<std::filesystem::path> write_snapshots(
  const SimTrace & trace, const LaneGraph & map, double every, const std::filesystem::path & dir);

std::string read_text_file(const std::filesystem::path & path);
void write_text_file(const std::filesystem::path & path, const std::string & text);

}  // namespace critsim
