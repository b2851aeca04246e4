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


// Command-line front end: generate, simulate, evaluate, refine, batch,
// replay and map validate.

#include "critsim/batch.hpp"
#include "critsim/codec.hpp"
#include "critsim/metrics.hpp"
#include "critsim/pipeline.hpp"
#include "critsim/refine.hpp"
#include "critsim/scenario.hpp"
#include "critsim/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace critsim;

namespace
{

enum Exit
{
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kBackend = 3,
};

struct Common
{
  std::string data_dir{CRITSIM_DATA_DIR};
  std::string backend{"template"};
  std::string remote_config;
};

struct SourceOptions
{
  std::string description;
  std::string description_file;
  std::string preset;
};

MapLibrary load_maps(const Common & c) { return MapLibrary::load_directory(fs::path(c.data_dir) / "maps"); }

std::string resolve_description(const Common & c, const SourceOptions & s)
{
  const int given = !s.description.empty() + !s.description_file.empty() + !s.preset.empty();
  if (given != 1) throw Error(ErrorKind::Usage, "give exactly one of --description, --description-file, --preset");
  if (!s.description.empty()) return s.description;
  if (!s.description_file.empty()) return read_text_file(s.description_file);
  const fs::path path = fs::path(c.data_dir) / "descriptions" / (s.preset + ".txt");
  if (!fs::exists(path)) throw Error(ErrorKind::Usage, "unknown preset '" + s.preset + "'");
  return read_text_file(path);
}

RemoteConfig remote_config(const Common & c)
{
  if (c.remote_config.empty()) throw Error(ErrorKind::Usage, "the remote backend needs --remote-config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(c.remote_config));
  } catch (const nlohmann::json::parse_error & e) {
    throw Error(ErrorKind::Syntax, c.remote_config + ": " + e.what());
  }
  return RemoteConfig::from_json(j);
}

std::function<std::unique_ptr<GenerationBackend>()> backend_factory(const Common & c)
{
  if (c.backend == "template") return [] { return std::make_unique<TemplateBackend>(); };
  if (c.backend == "remote") {
    const RemoteConfig config = remote_config(c);
    return [config] { return std::make_unique<RemoteBackend>(config); };
  }
  throw Error(ErrorKind::Usage, "unknown backend '" + c.backend + "'");
}

class OwningRemoteRefiner : public Refiner
{
public:
  OwningRemoteRefiner(const RemoteConfig & config, const MapLibrary & maps)
  : backend_(std::make_unique<RemoteBackend>(config)), inner_(*backend_, maps)
  {
  }

  ScenarioSpec refine(
    const ScenarioSpec & spec, const RefinementGoal & goal, const MetricsSummary & summary, int episode,
    std::vector<Mutation> & log) override
  {
    return inner_.refine(spec, goal, summary, episode, log);
  }

private:
  std::unique_ptr<RemoteBackend> backend_;
  RemoteRefiner inner_;
};

std::function<std::unique_ptr<Refiner>()> refiner_factory(const Common & c, const MapLibrary & maps)
{
  if (c.backend != "remote") return {};
  const RemoteConfig config = remote_config(c);
  return [config, &maps] { return std::make_unique<OwningRemoteRefiner>(config, maps); };
}

void emit(const std::string & out, const std::string & text)
{
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

int exit_code(ErrorKind kind)
{
  if (kind == ErrorKind::Usage) return kUsage;
  if (kind == ErrorKind::Backend) return kBackend;
  return kData;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"critsim: generate, simulate and score critical driving scenarios"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults");
  Common common;
  app.add_option("--data", common.data_dir, "Data directory holding maps/ and descriptions/");
  app.add_option("--backend", common.backend, "Generation backend")->check(CLI::IsMember({"template", "remote"}));
  app.add_option("--remote-config", common.remote_config, "JSON endpoint config for the remote backend");

  // generate
  auto * gen = app.add_subcommand("generate", "Turn a description into scenario documents");
  SourceOptions gen_src;
  std::size_t gen_n = 1;
  std::uint64_t gen_seed = 1000;
  std::string gen_out;
  gen->add_option("--description", gen_src.description, "Description text");
  gen->add_option("--description-file", gen_src.description_file, "File with the description")->check(CLI::ExistingFile);
  gen->add_option("--preset", gen_src.preset, "Shipped description id");
  gen->add_option("-n", gen_n, "Number of scenarios")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Seed of the first scenario");
  gen->add_option("-o,--out", gen_out, "Output directory (stdout when omitted and n = 1)");

  // simulate
  auto * sim = app.add_subcommand("simulate", "Run a scenario document and write the trace");
  std::string sim_in;
  std::optional<std::uint64_t> sim_seed;
  double sim_duration = 30.0;
  std::string sim_out;
  bool sim_all_pairs = false;
  double sim_svg_every = 0.0;
  std::string sim_svg_dir = "snapshots";
  sim->add_option("scenario", sim_in, "Scenario document")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", sim_seed, "Override the document seed");
  sim->add_option("--duration", sim_duration, "Seconds to simulate")->check(CLI::PositiveNumber);
  sim->add_option("-o,--out", sim_out, "Trace file (stdout when omitted)");
  sim->add_flag("--all-pairs", sim_all_pairs, "Record distances for every vehicle pair");
  sim->add_option("--svg-every", sim_svg_every, "Write an SVG snapshot every this many seconds");
  sim->add_option("--svg-dir", sim_svg_dir, "Snapshot directory");

  // evaluate
  auto * ev = app.add_subcommand("evaluate", "Score traces");
  std::vector<std::string> ev_in;
  std::string ev_out;
  std::string ev_label = "batch";
  std::string ev_csv;
  std::string ev_md;
  ev->add_option("traces", ev_in, "Trace files")->required()->check(CLI::ExistingFile);
  ev->add_option("-o,--out", ev_out, "Metrics JSON (stdout when omitted)");
  ev->add_option("--label", ev_label, "Row label of the aggregate report");
  ev->add_option("--csv", ev_csv, "Write the aggregate CSV here");
  ev->add_option("--markdown", ev_md, "Write the aggregate Markdown table here");

  // refine
  auto * ref = app.add_subcommand("refine", "Refine a scenario toward its criticality band");
  std::string ref_in;
  int ref_budget = 5;
  double ref_duration = 30.0;
  std::string ref_out;
  ref->add_option("scenario", ref_in, "Scenario document")->required()->check(CLI::ExistingFile);
  ref->add_option("--budget", ref_budget, "Maximum refinement episodes")->check(CLI::NonNegativeNumber);
  ref->add_option("--duration", ref_duration, "Seconds per simulation")->check(CLI::PositiveNumber);
  ref->add_option("-o,--out", ref_out, "Run directory")->required();

  // batch
  auto * bat = app.add_subcommand("batch", "Generate, simulate and score a batch of scenarios");
  SourceOptions bat_src;
  std::string bat_scenario;
  BatchConfig bat_cfg;
  std::string bat_out;
  bat->add_option("--description", bat_src.description, "Description text");
  bat->add_option("--description-file", bat_src.description_file, "File with the description")->check(CLI::ExistingFile);
  bat->add_option("--preset", bat_src.preset, "Shipped description id");
  bat->add_option("--scenario", bat_scenario, "Fixed scenario document; seeds still vary")->check(CLI::ExistingFile);
  bat->add_option("--label", bat_cfg.label, "Row label (defaults to the preset id)");
  bat->add_option("-n", bat_cfg.n, "Number of runs")->check(CLI::PositiveNumber);
  bat->add_option("--seed-base", bat_cfg.seed_base, "Seed of run 0; run i uses base + i");
  bat->add_option("--duration", bat_cfg.duration, "Seconds per run")->check(CLI::PositiveNumber);
  bat->add_flag("--refine", bat_cfg.refine, "Refine every run");
  bat->add_option("--budget", bat_cfg.budget, "Refinement episodes per run")->check(CLI::NonNegativeNumber);
  bat->add_option("-j,--workers", bat_cfg.workers, "Worker threads (0 = logical cores)");
  bat->add_option("-o,--out", bat_out, "Run directory");

  // replay
  auto * rep = app.add_subcommand("replay", "Recompute metrics from a trace");
  std::string rep_in;
  std::string rep_metrics;
  double rep_svg_every = 0.0;
  std::string rep_svg_dir = "snapshots";
  rep->add_option("trace", rep_in, "Trace file")->required()->check(CLI::ExistingFile);
  rep->add_option("--metrics", rep_metrics, "Stored metrics to compare against")->check(CLI::ExistingFile);
  rep->add_option("--svg-every", rep_svg_every, "Write an SVG snapshot every this many seconds");
  rep->add_option("--svg-dir", rep_svg_dir, "Snapshot directory");

  // map validate
  auto * map = app.add_subcommand("map", "Map utilities");
  map->require_subcommand(1);
  auto * map_validate = map->add_subcommand("validate", "Load and check a map file");
  std::string map_in;
  map_validate->add_option("file", map_in, "Map JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      const MapLibrary maps = load_maps(common);
      const std::string text = resolve_description(common, gen_src);
      const auto backend = backend_factory(common)();
      if (gen_out.empty() && gen_n != 1) throw Error(ErrorKind::Usage, "-n > 1 needs --out");
      for (std::size_t i = 0; i < gen_n; ++i) {
        const std::uint64_t seed = gen_seed + i;
        const GenerationResult g = generate_scenario(text, *backend, PipelineContext{maps, seed});
        for (const auto & note : g.notes) std::cerr << "note: " << note << "\n";
        if (gen_out.empty()) {
          std::cout << serialize_scenario(g.spec);
        } else {
          char name[64];
          std::snprintf(name, sizeof name, "scenario_%03zu.json", i);
          write_text_file(fs::path(gen_out) / name, serialize_scenario(g.spec));
        }
      }
    } else if (sim->parsed()) {
      const MapLibrary maps = load_maps(common);
      ScenarioSpec spec = load_scenario_file(sim_in, &maps);
      if (sim_seed) spec.seed = *sim_seed;
      SimConfig config;
      config.duration = sim_duration;
      config.all_pairs = sim_all_pairs;
      const SimTrace trace = run_scenario(spec, maps, config);
      emit(sim_out, write_trace(trace));
      if (sim_svg_every > 0.0) write_snapshots(trace, *maps.get(trace.map_id), sim_svg_every, sim_svg_dir);
    } else if (ev->parsed()) {
      std::vector<MetricsSummary> all;
      nlohmann::json out = nlohmann::json::array();
      for (const auto & path : ev_in) {
        all.push_back(evaluate(read_trace(read_text_file(path))));
        out.push_back(metrics_to_json(all.back()));
      }
      emit(ev_out, (ev_in.size() == 1 ? out[0] : out).dump(2) + "\n");
      if (!ev_csv.empty() || !ev_md.empty()) {
        const Report report = emit_report({{ev_label, summarize_batch(all)}});
        if (!ev_csv.empty()) write_text_file(ev_csv, report.csv);
        if (!ev_md.empty()) write_text_file(ev_md, report.markdown);
      }
    } else if (ref->parsed()) {
      const MapLibrary maps = load_maps(common);
      const ScenarioSpec spec = load_scenario_file(ref_in, &maps);
      RefineConfig config;
      config.budget = ref_budget;
      config.sim.duration = ref_duration;
      const auto make_refiner = refiner_factory(common, maps);
      std::unique_ptr<Refiner> refiner = make_refiner ? make_refiner() : nullptr;
      const RefineOutcome o = refine_until_aligned(spec, maps, config, refiner.get());
      const fs::path dir = ref_out;
      write_text_file(dir / "scenario.json", serialize_scenario(o.initial_spec));
      write_text_file(dir / "trace.jsonl", write_trace(o.initial_trace));
      write_text_file(dir / "metrics.json", metrics_to_json(o.initial).dump(2) + "\n");
      std::string episodes;
      for (const auto & e : o.episodes) episodes += episode_to_json(e).dump() + "\n";
      write_text_file(dir / "episodes.jsonl", episodes);
      write_text_file(dir / "refined_scenario.json", serialize_scenario(o.final_spec));
      write_text_file(dir / "refined_trace.jsonl", write_trace(o.final_trace));
      write_text_file(dir / "refined_metrics.json", metrics_to_json(o.final).dump(2) + "\n");
      std::cout << "episodes: " << o.episodes.size() << "\naligned: " << (o.aligned ? "yes" : "no")
                << "\nmin_act: " << render_seconds(o.initial.min_act) << " -> " << render_seconds(o.final.min_act)
                << "\ncollided: " << (o.initial.collision.collided ? "yes" : "no") << " -> "
                << (o.final.collision.collided ? "yes" : "no") << "\n";
    } else if (bat->parsed()) {
      const MapLibrary maps = load_maps(common);
      if (!bat_scenario.empty()) {
        if (!bat_src.description.empty() || !bat_src.description_file.empty() || !bat_src.preset.empty()) {
          throw Error(ErrorKind::Usage, "--scenario excludes the description options");
        }
        bat_cfg.scenario = load_scenario_file(bat_scenario, &maps);
      } else {
        bat_cfg.description = resolve_description(common, bat_src);
      }
      if (bat->count("--label") == 0) {
        if (!bat_src.preset.empty()) {
          bat_cfg.label = bat_src.preset;
        } else if (!bat_scenario.empty()) {
          bat_cfg.label = fs::path(bat_scenario).stem().string();
        }
      }
      bat_cfg.output_dir = bat_out;
      bat_cfg.backend_factory = backend_factory(common);
      bat_cfg.refiner_factory = refiner_factory(common, maps);
      const BatchResult result = run_batch(bat_cfg, maps);
      std::cout << emit_report(report_rows(result)).markdown;
      if (result.failures > 0) std::cerr << result.failures << " run(s) failed\n";
    } else if (rep->parsed()) {
      std::optional<fs::path> stored;
      if (!rep_metrics.empty()) stored = rep_metrics;
      const ReplayResult r = replay(rep_in, stored);
      std::cout << metrics_to_json(r.metrics).dump(2) << "\n";
      if (rep_svg_every > 0.0) {
        const MapLibrary maps = load_maps(common);
        const SimTrace trace = read_trace(read_text_file(rep_in));
        write_snapshots(trace, *maps.get(trace.map_id), rep_svg_every, rep_svg_dir);
      }
      if (r.matches) {
        std::cerr << (*r.matches ? "stored metrics match\n" : "stored metrics differ\n");
        if (!*r.matches) return kData;
      }
    } else if (map_validate->parsed()) {
      const LaneGraph g = LaneGraph::from_file(map_in);
      std::cout << g.id() << ": ok, " << g.lanes().size() << " lanes\n";
    }
  } catch (const Error & e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
