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


#include "critsim/batch.hpp"

#include "critsim/codec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace critsim
{

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Reference, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path & path, const std::string & text)
{
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Reference, "cannot write " + path.string());
  out << text;
}

namespace
{

RunResult run_one(
  const BatchConfig & config, const MapLibrary & maps, GenerationBackend & backend, Refiner * refiner, std::size_t i)
{
  RunResult r;
  r.index = i;
  r.seed = config.seed_base + i;
  try {
    if (config.scenario) {
      r.spec = *config.scenario;
      r.spec.seed = r.seed;
      throw_first(validate_cross_references(r.spec, &maps), "scenario");
    } else {
      GenerationResult g = generate_scenario(config.description, backend, PipelineContext{maps, r.seed});
      r.spec = std::move(g.spec);
      r.notes = std::move(g.notes);
    }
    SimConfig sim = config.sim;
    sim.duration = config.duration;
    if (config.refine) {
      RefineConfig rc;
      rc.budget = config.budget;
      rc.sim = sim;
      RefineOutcome o = refine_until_aligned(r.spec, maps, rc, refiner);
      r.trace = o.initial_trace;
      r.metrics = o.initial;
      r.refinement = std::move(o);
    } else {
      r.trace = run_scenario(r.spec, maps, sim);
      r.metrics = evaluate(r.trace);
    }
    r.ok = true;
  } catch (const Error & e) {
    r.error_kind = e.kind();
    r.error = e.what();
  }
  return r;
}

std::string run_dir_name(std::size_t i)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03zu", i);
  return buf;
}

std::string fixed(double v, int digits)
{
  if (!std::isfinite(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(const std::string & s)
{
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string> & parts, const std::string & sep)
{
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

BatchResult run_batch(const BatchConfig & config, const MapLibrary & maps)
{
  if (config.n < 1) throw Error(ErrorKind::Usage, "a batch needs at least one run");
  if (!config.scenario && config.description.empty()) {
    throw Error(ErrorKind::Usage, "a batch needs a description or a scenario document");
  }
  if (!(config.duration > 0.0)) throw Error(ErrorKind::Usage, "duration must be positive");

  BatchResult result;
  result.label = config.label;
  result.runs.resize(config.n);
  unsigned workers = config.workers != 0 ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.n));

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    std::unique_ptr<GenerationBackend> backend =
      config.backend_factory ? config.backend_factory() : std::make_unique<TemplateBackend>();
    std::unique_ptr<Refiner> refiner = config.refiner_factory ? config.refiner_factory() : nullptr;
    for (std::size_t i = next++; i < config.n; i = next++) {
      result.runs[i] = run_one(config, maps, *backend, refiner.get(), i);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto & t : pool) t.join();
  }

  std::vector<MetricsSummary> original;
  std::vector<MetricsSummary> refined;
  const RunResult * first_failure = nullptr;
  for (const auto & r : result.runs) {
    if (!r.ok) {
      ++result.failures;
      if (first_failure == nullptr) first_failure = &r;
      continue;
    }
    original.push_back(r.metrics);
    if (r.refinement) refined.push_back(r.refinement->final);
  }
  if (2 * result.failures > config.n) {
    throw Error(
      first_failure->error_kind, std::to_string(result.failures) + " of " + std::to_string(config.n) +
                                   " runs failed; run " + std::to_string(first_failure->index) + ": " +
                                   first_failure->error);
  }
  result.original = summarize_batch(original);
  if (config.refine) result.refined = summarize_batch(refined);
  if (!config.output_dir.empty()) write_run_directory(result, config, config.output_dir);
  return result;
}

std::string render_act_cell(const BatchSummary & s)
{
  if (s.finite_act == 0) return "∞ (" + std::to_string(s.infinite_act) + "/" + std::to_string(s.n) + ")";
  std::string cell = fixed(s.mean_min_act, 3);
  if (s.infinite_act > 0) {
    cell += " (∞ " + std::to_string(s.infinite_act) + "/" + std::to_string(s.n) + ")";
  }
  return cell;
}

Report emit_report(const std::vector<ReportRow> & rows)
{
  if (rows.empty()) throw Error(ErrorKind::Usage, "a report needs at least one row");
  Report r;
  r.csv = "scenario,act,comfortability,cr\n";
  r.markdown = "| Scenario | ACT (s) | Comfortability | CR |\n|---|---|---|---|\n";
  for (const auto & row : rows) {
    const std::string act = render_act_cell(row.summary);
    const std::string comfort = fixed(row.summary.mean_comfortability, 3);
    const std::string cr = render_percent(row.summary.crashes, std::max<std::size_t>(row.summary.n, 1));
    r.csv += csv_field(row.label) + "," + csv_field(act) + "," + comfort + "," + cr + "\n";
    r.markdown += "| " + row.label + " | " + act + " | " + comfort + " | " + cr + " |\n";
  }
  return r;
}

std::vector<ReportRow> report_rows(const BatchResult & result)
{
  if (!result.refined) return {{result.label, result.original}};
  return {{result.label + " (original)", result.original}, {result.label + " (refined)", *result.refined}};
}

std::string runs_csv(const BatchResult & result)
{
  const bool refined = result.refined.has_value();
  std::vector<std::string> head = {"run", "seed", "status", "min_act", "min_act_pair", "comfortability", "collided", "parties"};
  if (refined) {
    for (const char * h : {"episodes", "aligned", "refined_min_act", "refined_comfortability", "refined_collided"}) {
      head.emplace_back(h);
    }
  }
  std::string out = join(head, ",") + "\n";
  for (const auto & r : result.runs) {
    std::vector<std::string> cells = {std::to_string(r.index), std::to_string(r.seed)};
    if (!r.ok) {
      cells.push_back(csv_field(std::string(to_string(r.error_kind)) + ": " + r.error));
      cells.resize(head.size(), "n/a");
      out += join(cells, ",") + "\n";
      continue;
    }
    cells.push_back("ok");
    cells.push_back(render_seconds(r.metrics.min_act));
    cells.push_back(r.metrics.min_act_pair.empty() ? "none" : r.metrics.min_act_pair);
    cells.push_back(fixed(r.metrics.comfortability, 6));
    cells.push_back(r.metrics.collision.collided ? "yes" : "no");
    cells.push_back(r.metrics.collision.parties.empty() ? "none" : join(r.metrics.collision.parties, ";"));
    if (refined && r.refinement) {
      const auto & o = *r.refinement;
      cells.push_back(std::to_string(o.episodes.size()));
      cells.push_back(o.aligned ? "yes" : "no");
      cells.push_back(render_seconds(o.final.min_act));
      cells.push_back(fixed(o.final.comfortability, 6));
      cells.push_back(o.final.collision.collided ? "yes" : "no");
    }
    out += join(cells, ",") + "\n";
  }
  return out;
}

void write_run_directory(const BatchResult & result, const BatchConfig & config, const fs::path & dir)
{
  fs::create_directories(dir);
  for (const auto & r : result.runs) {
    const fs::path run = dir / run_dir_name(r.index);
    fs::create_directories(run);
    if (!r.ok) {
      write_text_file(run / "error.txt", std::string(to_string(r.error_kind)) + ": " + r.error + "\n");
      continue;
    }
    write_text_file(run / "scenario.json", serialize_scenario(r.spec));
    write_text_file(run / "trace.jsonl", write_trace(r.trace));
    write_text_file(run / "metrics.json", metrics_to_json(r.metrics).dump(2) + "\n");
    if (r.refinement) {
      const auto & o = *r.refinement;
      std::string episodes;
      for (const auto & e : o.episodes) episodes += episode_to_json(e).dump() + "\n";
      write_text_file(run / "episodes.jsonl", episodes);
      write_text_file(run / "refined_scenario.json", serialize_scenario(o.final_spec));
      write_text_file(run / "refined_trace.jsonl", write_trace(o.final_trace));
      write_text_file(run / "refined_metrics.json", metrics_to_json(o.final).dump(2) + "\n");
    }
  }
  const Report report = emit_report(report_rows(result));
  write_text_file(dir / "batch.csv", report.csv);
  write_text_file(dir / "runs.csv", runs_csv(result));

  std::string md = "# " + result.label + "\n\n" + report.markdown;
  md += "\n" + std::to_string(config.n) + " runs, seeds " + std::to_string(config.seed_base) + " to " +
        std::to_string(config.seed_base + config.n - 1) + ", " + fixed(config.duration, 1) + " s each.\n";
  if (result.failures > 0) {
    md += "\n## Failed runs\n\n";
    for (const auto & r : result.runs) {
      if (!r.ok) md += "- run " + std::to_string(r.index) + " (seed " + std::to_string(r.seed) + "): " + r.error + "\n";
    }
  }
  write_text_file(dir / "report.md", md);

  json summary = {
    {"label", result.label},
    {"n", config.n},
    {"seed_base", config.seed_base},
    {"duration", config.duration},
    {"refine", config.refine},
    {"failures", result.failures},
    {"original", batch_to_json(result.original)}};
  if (config.refine) summary["budget"] = config.budget;
  if (result.refined) summary["refined"] = batch_to_json(*result.refined);
  if (config.scenario) {
    summary["source"] = "scenario";
  } else {
    summary["source"] = "description";
    summary["description"] = config.description;
  }
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

ReplayResult replay(const fs::path & trace_file, const std::optional<fs::path> & metrics_file)
{
  ReplayResult out;
  const SimTrace trace = read_trace(read_text_file(trace_file));
  out.metrics = evaluate(trace);
  if (metrics_file) {
    json stored;
    try {
      stored = json::parse(read_text_file(*metrics_file));
    } catch (const json::parse_error & e) {
      throw Error(ErrorKind::Syntax, metrics_file->string() + ": " + e.what());
    }
    out.stored = metrics_from_json(stored);
    out.matches = metrics_to_json(out.metrics).dump() == metrics_to_json(*out.stored).dump();
  }
  return out;
}

std::string render_svg(const TickRecord & tick, const LaneGraph & map)
{
  constexpr double kHalfView = 80.0;
  Vec2 centre{0.0, 0.0};
  if (const auto * ego = tick.vehicle(kEgoId)) centre = {ego->x, ego->y};
  std::string out;
  char buf[512];
  std::snprintf(
    buf, sizeof buf,
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"%.2f %.2f %.2f %.2f\">\n",
    centre.x - kHalfView, -centre.y - kHalfView, 2 * kHalfView, 2 * kHalfView);
  out += buf;
  std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#f4f4f4\"/>\n",
                centre.x - kHalfView, -centre.y - kHalfView, 2 * kHalfView, 2 * kHalfView);
  out += buf;
  out += "<g transform=\"scale(1,-1)\">\n";
  std::map<std::string, SignalColor> signals;
  for (const auto & s : tick.signals) signals[s.lane] = s.color;
  for (const auto & lane : map.lanes()) {
    std::string points;
    for (const auto & p : lane.centerline.points()) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", p.x, p.y);
      points += buf;
    }
    std::snprintf(buf, sizeof buf, "<polyline points=\"%s\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"%.2f\"/>\n",
                  points.c_str(), lane.width);
    out += buf;
    const auto it = signals.find(lane.id);
    if (it != signals.end()) {
      const Pose end = lane.centerline.pose_at(lane.length());
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.2\" fill=\"%s\"/>\n", end.x, end.y,
                    it->second == SignalColor::Green ? "#2a9d3a" : "#d62828");
      out += buf;
    }
  }
  for (const auto & v : tick.vehicles) {
    const char * fill = v.role == Role::Ego ? "#1d4ed8" : v.role == Role::Adversary ? "#dc2626" : "#6b7280";
    std::snprintf(
      buf, sizeof buf,
      "<rect id=\"%s\" x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" stroke=\"%s\" stroke-width=\"0.3\" "
      "transform=\"rotate(%.2f %.2f %.2f)\"/>\n",
      v.id.c_str(), v.x - v.length / 2, v.y - v.width / 2, v.length, v.width, fill, v.crashed ? "#000000" : "none",
      v.heading * 180.0 / M_PI, v.x, v.y);
    out += buf;
  }
  out += "</g>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"4\">t = %.2f s</text>\n",
                centre.x - kHalfView + 2, -centre.y - kHalfView + 6, tick.t);
  out += buf;
  out += "</svg>\n";
  return out;
}

std::vector<fs::path> write_snapshots(const SimTrace & trace, const LaneGraph & map, double every, const fs::path & dir)
{
  if (!(every > 0.0)) throw Error(ErrorKind::Usage, "snapshot interval must be positive");
  const auto stride = static_cast<std::int64_t>(std::llround(every / trace.dt));
  if (stride < 1) throw Error(ErrorKind::Usage, "snapshot interval is shorter than one tick");
  std::vector<fs::path> files;
  fs::create_directories(dir);
  for (const auto & tick : trace.ticks) {
    if (tick.k % stride != 0) continue;
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%06.2f.svg", tick.t);
    files.push_back(dir / name);
    write_text_file(files.back(), render_svg(tick, map));
  }
  return files;
}

}  // namespace critsim
