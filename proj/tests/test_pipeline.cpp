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


#include "critsim/codec.hpp"
#include "critsim/metrics.hpp"
#include "critsim/pipeline.hpp"
#include "critsim/refine.hpp"
#include "critsim/sim.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace critsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

const MapLibrary & maps()
{
  static const MapLibrary lib = MapLibrary::load_directory(fs::path(CRITSIM_DATA_DIR) / "maps");
  return lib;
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string description(const std::string & name)
{
  return slurp(fs::path(CRITSIM_DATA_DIR) / "descriptions" / (name + ".txt"));
}

GenerationResult generate(const std::string & name, std::uint64_t seed = 1000)
{
  TemplateBackend backend;
  return generate_scenario(description(name), backend, PipelineContext{maps(), seed});
}

const std::vector<std::string> kPresets = {"dangerous", "moderate", "safe", "sudden_stop", "force_right_turn", "running_red_light"};

// --- scripted completion endpoint --------------------------------------------

// Serves chat completions; the agent is recognised from the system prompt,
// which the test prompt directory sets to the agent name.
class FakeEndpoint
{
public:
  FakeEndpoint()
  {
    server_.Post("/v1/chat/completions", [this](const httplib::Request & req, httplib::Response & res) {
      const json body = json::parse(req.body);
      const std::string agent = body["messages"][0]["content"].get<std::string>();
      std::lock_guard<std::mutex> lock(mutex_);
      ++calls_[agent];
      last_user_[agent] = body["messages"][1]["content"].get<std::string>();
      if (status_ != 200) {
        res.status = status_;
        return;
      }
      std::string content;
      auto & queue = replies_[agent];
      if (!queue.empty()) {
        content = queue.front();
        if (queue.size() > 1) queue.pop_front();
      }
      res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeEndpoint()
  {
    server_.stop();
    thread_.join();
  }

  void reply(const std::string & agent, std::deque<std::string> contents) { replies_[agent] = std::move(contents); }
  void fail_with(int status) { status_ = status; }
  int calls(const std::string & agent) { return calls_[agent]; }
  std::string last_user(const std::string & agent) { return last_user_[agent]; }

  RemoteConfig config(const fs::path & prompts) const
  {
    RemoteConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_);
    c.model = "test";
    c.max_retries = 2;
    c.timeout_seconds = 5;
    c.prompt_dir = prompts.string();
    return c;
  }

private:
  httplib::Server server_;
  std::thread thread_;
  int port_{0};
  std::mutex mutex_;
  std::map<std::string, std::deque<std::string>> replies_;
  std::map<std::string, int> calls_;
  std::map<std::string, std::string> last_user_;
  std::atomic<int> status_{200};
};

fs::path prompt_dir()
{
  const fs::path dir = fs::temp_directory_path() / "critsim_test_prompts";
  fs::create_directories(dir);
  for (const char * agent :
       {"interpreter", "weather_report", "ego_locator", "adv_locator", "action_generator", "chaos_maker", "refiner"}) {
    std::ofstream(dir / (std::string(agent) + ".txt")) << agent;
  }
  return dir;
}

void script_valid_generation(FakeEndpoint & ep)
{
  ep.reply("interpreter", {json{
    {"general_environment", "dry and sunny"},
    {"ego_context", "straight highway at 20 m/s"},
    {"adversarial_plan", "van_1 ahead of the ego brakes hard"},
    {"background_plan", "none"},
    {"band", "moderate"},
    {"hints", {{"require_left_neighbor", false}, {"require_right_neighbor", false}, {"green_on_arrival", false}}}}.dump()});
  ep.reply("weather_report", {R"({"precipitation": 0, "fog_density": 0, "time_of_day": 12, "friction_multiplier": 1})"});
  ep.reply("ego_locator", {R"({"map_id": "highway_3lane", "context": "straight-lane", "target_speed": 20})"});
  ep.reply("adv_locator", {R"({"adversaries": [{"id": "van_1", "vehicle_class": "van", "relation": "ahead", "gap": 30}]})"});
  ep.reply("action_generator", {R"(```json
{"behaviors": {"van_1": {"type": "sequential", "children": [
  {"type": "atomic", "kind": "FollowRoute", "agent": "route", "config": {"target_speed": 18}, "success": {"op": "elapsed", "value": 4}},
  {"type": "atomic", "kind": "SuddenBrake", "agent": "brake", "config": {"deceleration": "max"}}]}}}
```)"});
  ep.reply("chaos_maker", {R"({"density_profile": "none", "count": 0})"});
}

}  // namespace

TEST(Template, AllPresetDescriptionsProduceValidScenarios)
{
  for (const auto & name : kPresets) {
    const auto g = generate(name);
    EXPECT_TRUE(validate_cross_references(g.spec, &maps()).empty()) << name;
    EXPECT_FALSE(g.spec.adversaries.empty()) << name;
    const auto m = evaluate(run_scenario(g.spec, maps()));
    EXPECT_GT(m.comfortability, 0.0);
    EXPECT_LE(m.comfortability, 1.0);
  }
}

TEST(Template, ShippedPresetsAreGeneratorOutputAtSeed1000)
{
  for (const auto & name : kPresets) {
    EXPECT_EQ(serialize_scenario(generate(name).spec), slurp(fs::path(CRITSIM_DATA_DIR) / "presets" / (name + ".json")))
      << name;
  }
}

TEST(Template, DeterministicPerSeed)
{
  EXPECT_EQ(generate("dangerous", 7).spec, generate("dangerous", 7).spec);
  EXPECT_NE(generate("dangerous", 7).spec, generate("dangerous", 8).spec);
}

TEST(Template, BandsFollowTheWording)
{
  EXPECT_EQ(generate("dangerous").spec.intent.band, CriticalityBand::DangerousNoCollision);
  EXPECT_EQ(generate("moderate").spec.intent.band, CriticalityBand::Moderate);
  EXPECT_EQ(generate("safe").spec.intent.band, CriticalityBand::Safe);
}

TEST(Template, LayersAndPlacement)
{
  const auto d = generate("dangerous");
  EXPECT_EQ(d.spec.environment.map_id, "highway_3lane");
  EXPECT_EQ(d.spec.background.density_profile, DensityProfile::Heavy);
  ASSERT_EQ(d.spec.adversaries.size(), 2u);
  EXPECT_EQ(d.spec.adversaries[0].id, "truck_1");
  EXPECT_EQ(d.spec.adversaries[0].placement.relation, Relation::Left);
  EXPECT_EQ(d.spec.adversaries[1].id, "sedan_1");
  EXPECT_EQ(d.spec.adversaries[1].placement.relation, Relation::Behind);
  EXPECT_TRUE(d.spec.ego.placement.require_left_neighbor);

  const auto s = generate("sudden_stop");
  EXPECT_EQ(s.spec.environment.map_id, "curve_2lane");
  EXPECT_LT(s.spec.environment.weather.friction_multiplier, 1.0);
  EXPECT_GT(s.spec.environment.weather.precipitation, 0.0);

  const auto r = generate("running_red_light");
  EXPECT_EQ(r.spec.environment.map_id, "intersection_4way");
  EXPECT_GT(r.spec.environment.weather.fog_density, 0.0);
  EXPECT_EQ(r.spec.adversaries[0].placement.relation, Relation::OppositeApproach);
}

TEST(Template, MissingLayersAreImprovisedAndNoted)
{
  const auto g = generate("moderate");
  EXPECT_FALSE(g.elaborated.improvised.empty());
  EXPECT_FALSE(g.notes.empty());
}

TEST(Template, EmptyDescriptionRejected)
{
  TemplateBackend backend;
  EXPECT_THROW(generate_scenario("   ", backend, PipelineContext{maps(), 1}), Error);
}

TEST(Template, MentionsSplitThePlan)
{
  const auto m = find_mentions("a truck on the left cuts in, then a sedan follows closely");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].id, "truck_1");
  EXPECT_EQ(m[0].vehicle_class, VehicleClass::Truck);
  EXPECT_EQ(m[1].id, "sedan_1");
  EXPECT_NE(m[0].text.find("cuts in"), std::string::npos);
}

TEST(Template, WeatherFirstMentionWins)
{
  TemplateBackend backend;
  ElaboratedDescription d;
  d.general_environment = "a rainy, slightly foggy morning";
  const auto w = backend.weather_report(d, PipelineContext{maps(), 1});
  EXPECT_EQ(w.friction_multiplier, 0.7);
  EXPECT_EQ(w.fog_density, 0.0);
}

TEST(Template, DensityCounts)
{
  EXPECT_EQ(density_count(DensityProfile::None), 0);
  EXPECT_LT(density_count(DensityProfile::Sparse), density_count(DensityProfile::Heavy));
}

TEST(DescribedScenario, ForceRightTurnCrossesAheadOfEgo)
{
  const auto t = run_scenario(generate("force_right_turn").spec, maps());
  bool turned = false;
  for (const auto & tick : t.ticks) {
    const auto * s = tick.vehicle("sedan_1");
    if (s && s->lane.find("_right") != std::string::npos) turned = true;
  }
  EXPECT_TRUE(turned);
}

TEST(DescribedScenario, RedLightRunnerCrossesOnRedEgoDoesNot)
{
  const auto spec = generate("running_red_light").spec;
  const auto t = run_scenario(spec, maps());
  const auto & map = *maps().get(spec.environment.map_id);
  bool runner_on_red = false;
  std::map<std::string, std::string> prev;
  for (const auto & tick : t.ticks) {
    for (const auto & v : tick.vehicles) {
      const auto it = prev.find(v.id);
      if (it != prev.end() && map.approach(it->second) != nullptr && map.is_connector(v.lane)) {
        const bool red = signal_color_at(map, it->second, tick.t) == SignalColor::Red;
        if (v.id == "sedan_1" && red) runner_on_red = true;
        if (v.id == "ego") EXPECT_FALSE(red) << "ego entered on red at t=" << tick.t;
      }
      prev[v.id] = v.lane;
    }
  }
  EXPECT_TRUE(runner_on_red);
}

TEST(Schema, Validation)
{
  const json schema = agent_schema("chaos_maker");
  EXPECT_TRUE(validate_schema(json{{"density_profile", "none"}, {"count", 0}}, schema).empty());
  EXPECT_FALSE(validate_schema(json{{"density_profile", "medium"}, {"count", 0}}, schema).empty());
  EXPECT_FALSE(validate_schema(json{{"density_profile", "none"}, {"count", 1.5}}, schema).empty());
  EXPECT_FALSE(validate_schema(json{{"density_profile", "none"}}, schema).empty());
  EXPECT_FALSE(validate_schema(json{{"density_profile", "none"}, {"count", 0}, {"extra", 1}}, schema).empty());
  EXPECT_FALSE(validate_schema(json::array(), schema).empty());
  EXPECT_THROW(agent_schema("oracle"), Error);
}

TEST(RemoteConfig, TokenFromEnvironmentOverridesFile)
{
  ::setenv("CRITSIM_API_TOKEN", "from-env", 1);
  const auto c = RemoteConfig::from_json({{"base_url", "http://x"}, {"token", "from-file"}});
  ::unsetenv("CRITSIM_API_TOKEN");
  EXPECT_EQ(c.token, "from-env");
  EXPECT_EQ(RemoteConfig::from_json({{"base_url", "http://x"}, {"token", "from-file"}}).token, "from-file");
}

TEST(Remote, EndToEndGeneration)
{
  FakeEndpoint ep;
  script_valid_generation(ep);
  RemoteBackend backend(ep.config(prompt_dir()));
  const auto g = generate_scenario("a van ahead brakes", backend, PipelineContext{maps(), 3});
  EXPECT_EQ(g.spec.environment.map_id, "highway_3lane");
  ASSERT_EQ(g.spec.adversaries.size(), 1u);
  EXPECT_EQ(g.spec.adversaries[0].behavior_root.children.size(), 2u);
  EXPECT_EQ(backend.requests(), 6u);
  EXPECT_NO_THROW(run_scenario(g.spec, maps()));
}

TEST(Remote, InvalidReplyIsRetriedWithTheViolations)
{
  FakeEndpoint ep;
  script_valid_generation(ep);
  ep.reply("chaos_maker", {R"({"density_profile": "lots"})", R"({"density_profile": "sparse", "count": 4})"});
  RemoteBackend backend(ep.config(prompt_dir()));
  ElaboratedDescription d;
  const auto bg = backend.make_chaos(d, PipelineContext{maps(), 1});
  EXPECT_EQ(bg.count, 4);
  EXPECT_EQ(ep.calls("chaos_maker"), 2);
  EXPECT_NE(ep.last_user("chaos_maker").find("rejected"), std::string::npos);
}

TEST(Remote, PersistentInvalidReplyIsSchemaViolation)
{
  FakeEndpoint ep;
  ep.reply("chaos_maker", {"not json at all"});
  RemoteBackend backend(ep.config(prompt_dir()));
  try {
    backend.make_chaos({}, PipelineContext{maps(), 1});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaViolation);
  }
  EXPECT_EQ(ep.calls("chaos_maker"), 3);
}

TEST(Remote, HttpErrorIsBackendError)
{
  FakeEndpoint ep;
  ep.fail_with(500);
  RemoteBackend backend(ep.config(prompt_dir()));
  try {
    backend.make_chaos({}, PipelineContext{maps(), 1});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::Backend);
  }
}

TEST(Remote, UnreachableEndpointIsBackendError)
{
  RemoteConfig c;
  c.base_url = "http://127.0.0.1:1";
  c.prompt_dir = prompt_dir().string();
  c.timeout_seconds = 2;
  RemoteBackend backend(c);
  try {
    backend.make_chaos({}, PipelineContext{maps(), 1});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::Backend);
  }
}

TEST(Remote, RefinerRepliesAreValidatedAndDiffed)
{
  FakeEndpoint ep;
  const ScenarioSpec spec = generate("dangerous").spec;
  json changed = scenario_to_json(spec);
  changed["adversaries"][1]["placement"]["gap"] = 40.0;
  changed["seed"] = 5;  // the refiner may not reseed; the seed is restored
  json broken = changed;
  broken["adversaries"][0]["behavior"]["children"][0]["kind"] = "Teleport";
  ep.reply("refiner", {json{{"scenario", broken}}.dump(), json{{"scenario", changed}, {"rationale", "wider gap"}}.dump()});
  RemoteBackend backend(ep.config(prompt_dir()));
  RemoteRefiner refiner(backend, maps());
  std::vector<Mutation> log;
  const auto out = refiner.refine(spec, {RefineDirection::ReduceAggression, ViolatedPredicate::Collision, 1.0}, {}, 1, log);
  EXPECT_EQ(out.seed, spec.seed);
  EXPECT_EQ(out.adversaries[1].placement.gap, 40.0);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].path, "/adversaries/1/placement/gap");
  EXPECT_EQ(ep.calls("refiner"), 2);
}
