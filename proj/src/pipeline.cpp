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


#include "critsim/pipeline.hpp"

#include "critsim/error.hpp"
#include "critsim/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>

namespace critsim
{

namespace
{

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\n,.;");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\n,.;");
  return s.substr(b, e - b + 1);
}

bool has(const std::string & text, const std::string & kw) { return text.find(kw) != std::string::npos; }

bool has_any(const std::string & text, std::initializer_list<const char *> kws)
{
  return std::any_of(kws.begin(), kws.end(), [&](const char * k) { return has(text, k); });
}

std::vector<std::string> split_clauses(const std::string & text)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == '.' || c == ';') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::string join(const std::vector<std::string> & parts)
{
  std::string out;
  for (const auto & p : parts) {
    if (!out.empty()) out += ", ";
    out += p;
  }
  return out;
}

const std::regex & mention_regex()
{
  static const std::regex re(R"(\b(a|an|another)\s+(truck|sedan|van|car|suv|lorry)\b)", std::regex::icase);
  return re;
}

VehicleClass class_of(const std::string & word)
{
  const std::string w = lower(word);
  if (w == "truck" || w == "lorry") return VehicleClass::Truck;
  if (w == "van") return VehicleClass::Van;
  return VehicleClass::Sedan;
}

constexpr const char * kDangerWords[] = {"aggressive", "suddenly", "very closely", "ignore", "without fully", "maximum deceleration", "reckless"};
constexpr const char * kSafeWords[] = {"decent", "remotely", "quiet", "gently", "carefully"};

std::optional<Relation> relation_in(const std::string & span)
{
  if (has_any(span, {"left entrance", "right entrance", "opposite", "crossing road", "from the side"})) {
    return Relation::OppositeApproach;
  }
  if (has(span, "on the left")) return Relation::Left;
  if (has(span, "on the right")) return Relation::Right;
  if (has_any(span, {"ahead", "in front of the ego"})) return Relation::Ahead;
  if (has_any(span, {"behind", "follows", "following", "tailgat"})) return Relation::Behind;
  if (has(span, "overtak")) return Relation::Left;
  return std::nullopt;
}

double aggressiveness_in(const std::string & span)
{
  if (has_any(span, {"aggressive", "very closely", "reckless", "lane marks"})) return 1.0;
  if (has_any(span, {"decent", "remotely", "gently", "carefully", "safe distance"})) return 0.0;
  if (has(span, "closely")) return 0.75;
  return 0.5;
}

// Action tokens found in one mention span, in text order.
enum class Token
{
  TurnCut,
  Overtake,
  CutIn,
  Turn,
  Brake,
  Idle,
  KeepGoing,
  Follow,
  RunRed,
  Cruise,
  Later,
};

struct Found
{
  std::size_t pos;
  Token token;
  std::string match;
};

std::vector<Found> tokens_in(const std::string & span)
{
  static const std::vector<std::pair<Token, std::regex>> table = {
    {Token::TurnCut, std::regex(R"(without (fully )?overtaking)")},
    {Token::Overtake, std::regex(R"(overtak\w*|passes the ego)")},
    {Token::CutIn, std::regex(R"(\bcut(s|ting)? in\b|\bmerges? in\b)")},
    {Token::Turn, std::regex(R"(\bturns? (right|left)\b)")},
    {Token::Brake, std::regex(R"(\bbrak(e|es|ing)\b|\bslams? on the brakes?\b)")},
    {Token::Idle, std::regex(R"(\bremains? idle\b|\bstays? (idle|still)\b|\bstands? still\b|\bcomes? to a stop\b)")},
    {Token::KeepGoing, std::regex(R"(\bke(pt|eps?) (going|driving)\b|\bcontinues\b|\bdrives on\b)")},
    {Token::Follow, std::regex(R"(\bfollow(s|ing)? the ego\b|\btailgat\w*)")},
    {Token::RunRed, std::regex(R"(\b(ignor\w*|runs?|running) (the )?red light\b)")},
    {Token::Cruise, std::regex(R"(\b(is )?(driving|drives|cruising|cruises) ahead\b)")},
    {Token::Later, std::regex(R"(\b(a while later|after a while|later on|moments later)\b)")},
  };
  std::vector<Found> out;
  for (const auto & [token, re] : table) {
    for (auto it = std::sregex_iterator(span.begin(), span.end(), re); it != std::sregex_iterator(); ++it) {
      out.push_back({static_cast<std::size_t>(it->position()), token, it->str()});
    }
  }
  std::sort(out.begin(), out.end(), [](const Found & a, const Found & b) { return a.pos < b.pos; });
  // "without fully overtaking" is not an overtake.
  std::vector<Found> kept;
  for (const auto & f : out) {
    const bool inside_turn_cut = f.token == Token::Overtake &&
      std::any_of(out.begin(), out.end(), [&](const Found & g) {
        return g.token == Token::TurnCut && f.pos >= g.pos && f.pos < g.pos + g.match.size();
      });
    if (!inside_turn_cut) kept.push_back(f);
  }
  return kept;
}

AtomicBehavior atomic(std::string kind, std::string agent, ParamMap config)
{
  AtomicBehavior a;
  a.kind = std::move(kind);
  a.agent = std::move(agent);
  a.config = std::move(config);
  return a;
}

double round_to(double v, double step)
{
  const double per_unit = std::round(1.0 / step);
  return std::round(v * per_unit) / per_unit;
}

}  // namespace

const std::vector<WeatherRule> & weather_rules()
{
  static const std::vector<WeatherRule> rules = {
    {"rain", {0.8, 0.0, 12.0, 0.7}},
    {"storm", {1.0, 0.2, 12.0, 0.6}},
    {"snow", {0.7, 0.2, 12.0, 0.5}},
    {"mist", {0.0, 0.6, 12.0, 1.0}},
    {"fog", {0.0, 0.6, 12.0, 1.0}},
    {"beautiful", {0.0, 0.0, 12.0, 1.0}},
    {"sunny", {0.0, 0.0, 12.0, 1.0}},
    {"clear", {0.0, 0.0, 12.0, 1.0}},
  };
  return rules;
}

int density_count(DensityProfile d)
{
  switch (d) {
    case DensityProfile::None: return 0;
    case DensityProfile::Sparse: return 4;
    case DensityProfile::Heavy: return 12;
  }
  return 0;
}

double ego_speed_for(RoadContext context)
{
  switch (context) {
    case RoadContext::StraightLane: return 20.0;
    case RoadContext::Curve: return 15.0;
    case RoadContext::IntersectionApproach: return 10.0;
  }
  return 20.0;
}

std::string map_for(RoadContext context)
{
  switch (context) {
    case RoadContext::StraightLane: return "highway_3lane";
    case RoadContext::Curve: return "curve_2lane";
    case RoadContext::IntersectionApproach: return "intersection_4way";
  }
  return "highway_3lane";
}

const std::vector<Relation> & placement_fallback_order()
{
  static const std::vector<Relation> order = {Relation::Behind, Relation::Ahead, Relation::Left, Relation::Right};
  return order;
}

std::vector<Mention> find_mentions(const std::string & plan)
{
  std::vector<Mention> out;
  std::map<VehicleClass, int> counts;
  std::vector<std::size_t> starts;
  for (auto it = std::sregex_iterator(plan.begin(), plan.end(), mention_regex()); it != std::sregex_iterator(); ++it) {
    Mention m;
    m.vehicle_class = class_of((*it)[2].str());
    m.id = std::string(to_string(m.vehicle_class)) + "_" + std::to_string(++counts[m.vehicle_class]);
    starts.push_back(static_cast<std::size_t>(it->position()) + it->length());
    out.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t end = plan.size();
    if (i + 1 < out.size()) {
      std::smatch next;
      const std::string rest = plan.substr(starts[i]);
      if (std::regex_search(rest, next, mention_regex())) end = starts[i] + static_cast<std::size_t>(next.position());
    }
    out[i].text = lower(plan.substr(starts[i], end - starts[i]));
  }
  return out;
}

double TemplateBackend::jitter(const PipelineContext & ctx, const std::string & key, double amplitude) const
{
  if (amplitude <= 0.0) return 1.0;
  Rng rng = Rng::substream(ctx.seed, "jitter/" + key);
  return 1.0 + amplitude * rng.uniform(-1.0, 1.0);
}

ElaboratedDescription TemplateBackend::interpret(const std::string & description, const PipelineContext &)
{
  if (trim(description).empty()) throw Error(ErrorKind::Range, "empty description");
  ElaboratedDescription d;
  const std::string low = lower(description);

  std::smatch m;
  std::size_t plan_start = description.size();
  if (std::regex_search(description, m, mention_regex())) plan_start = static_cast<std::size_t>(m.position());
  // Scene-setting clauses come before the first vehicle mention.
  std::vector<std::string> env;
  std::vector<std::string> road;
  std::vector<std::string> traffic;
  for (const auto & clause : split_clauses(description.substr(0, plan_start))) {
    const std::string c = lower(clause);
    if (has_any(c, {"traffic", "no one", "nobody", "quiet", "busy", "crowded", "empty", "deserted", "street"})) {
      traffic.push_back(clause);
    } else if (has_any(c, {"crossroad", "intersection", "junction", "curve", "bend", "highway", "road", "lane"})) {
      road.push_back(clause);
    } else {
      env.push_back(clause);
    }
  }
  // Traffic and road hints may also trail the plan ("..., pretty quiet").
  d.adversarial_plan = trim(description.substr(plan_start));
  for (const auto & clause : split_clauses(d.adversarial_plan)) {
    const std::string c = lower(clause);
    if (has_any(c, {"crossroad", "intersection", "curved road"}) && !has(c, "entrance") && !has(c, "drives through")) {
      road.push_back(clause);
    }
  }

  d.general_environment = join(env);
  d.ego_context = join(road);
  d.background_plan = join(traffic);
  if (d.general_environment.empty()) {
    d.general_environment = "clear weather at noon";
    d.improvised.push_back("general_environment");
  }
  if (d.ego_context.empty()) {
    d.ego_context = "on a straight multi-lane road";
    d.improvised.push_back("ego_context");
  }
  if (d.background_plan.empty()) {
    d.background_plan = "light background traffic";
    d.improvised.push_back("background_plan");
  }
  if (d.adversarial_plan.empty()) {
    d.adversarial_plan = "a sedan follows the ego vehicle";
    d.improvised.push_back("adversarial_plan");
  }

  if (std::any_of(std::begin(kDangerWords), std::end(kDangerWords), [&](const char * w) { return has(low, w); })) {
    d.band = CriticalityBand::DangerousNoCollision;
  } else if (std::any_of(std::begin(kSafeWords), std::end(kSafeWords), [&](const char * w) { return has(low, w); })) {
    d.band = CriticalityBand::Safe;
  } else {
    d.band = CriticalityBand::Moderate;
  }

  const std::string plan = lower(d.adversarial_plan);
  for (const auto & mention : find_mentions(d.adversarial_plan)) {
    const auto rel = relation_in(mention.text);
    if (rel == Relation::Left) d.hints.require_left_neighbor = true;
    if (rel == Relation::Right) d.hints.require_right_neighbor = true;
  }
  d.hints.green_on_arrival = has(plan, "red light") || has_any(lower(d.ego_context), {"crossroad", "intersection", "junction"});
  return d;
}

WeatherConfig TemplateBackend::weather_report(const ElaboratedDescription & d, const PipelineContext &)
{
  const std::string text = lower(d.general_environment);
  WeatherConfig w;
  std::size_t best = std::string::npos;
  for (const auto & rule : weather_rules()) {
    const auto pos = text.find(rule.keyword);
    if (pos != std::string::npos && (best == std::string::npos || pos < best)) {
      best = pos;
      w = rule.weather;
    }
  }
  if (has(text, "morning")) w.time_of_day = 8.0;
  else if (has(text, "evening") || has(text, "dusk")) w.time_of_day = 19.0;
  else if (has(text, "night")) w.time_of_day = 22.0;
  return w;
}

EgoPlan TemplateBackend::locate_ego(const ElaboratedDescription & d, const PipelineContext & ctx)
{
  const std::string text = lower(d.ego_context);
  EgoPlan plan;
  RoadContext context = RoadContext::StraightLane;
  if (has_any(text, {"crossroad", "intersection", "junction"})) context = RoadContext::IntersectionApproach;
  else if (has_any(text, {"curve", "bend"})) context = RoadContext::Curve;
  plan.placement.context = context;
  plan.placement.require_left_neighbor = d.hints.require_left_neighbor;
  plan.placement.require_right_neighbor = d.hints.require_right_neighbor;
  plan.placement.green_on_arrival = context == RoadContext::IntersectionApproach && d.hints.green_on_arrival;
  plan.map_id = map_for(context);
  plan.target_speed = round_to(ego_speed_for(context) * jitter(ctx, "ego/speed", jitter_.speed), 0.01);
  return plan;
}

namespace
{

double default_gap(Relation rel, const std::string & span, CriticalityBand band)
{
  switch (rel) {
    case Relation::Behind: {
      const double a = aggressiveness_in(span);
      if (a >= 1.0) return 10.0;
      if (a <= 0.0) return 40.0;
      return 20.0;
    }
    case Relation::Ahead: return 30.0;
    case Relation::Left:
    case Relation::Right:
      if (has(span, "without fully")) return 4.0;
      return band == CriticalityBand::DangerousNoCollision ? 20.0 : 5.0;
    case Relation::OppositeApproach: return 2.0;
  }
  return 10.0;
}

}  // namespace

std::vector<AdversaryPlan> TemplateBackend::locate_adversaries(
  const ElaboratedDescription & d, const EgoPlan &, const PipelineContext & ctx)
{
  std::vector<AdversaryPlan> out;
  for (const auto & m : find_mentions(d.adversarial_plan)) {
    AdversaryPlan p;
    p.id = m.id;
    p.vehicle_class = m.vehicle_class;
    p.placement.relation = relation_in(m.text).value_or(Relation::Behind);
    const double base = default_gap(p.placement.relation, m.text, d.band);
    p.placement.gap = round_to(base * jitter(ctx, m.id + "/gap", jitter_.gap), 0.01);
    out.push_back(p);
  }
  return out;
}

AdversaryPlan TemplateBackend::relocate_adversary(
  const ElaboratedDescription & d, const AdversaryPlan & plan, const std::vector<Relation> & tried,
  const std::string & reason, const PipelineContext &)
{
  for (Relation r : placement_fallback_order()) {
    if (std::find(tried.begin(), tried.end(), r) != tried.end()) continue;
    AdversaryPlan next = plan;
    next.placement.relation = r;
    next.placement.gap = default_gap(r, "", d.band);
    return next;
  }
  throw Error(ErrorKind::Unsatisfiable, "adversary '" + plan.id + "' cannot be placed: " + reason);
}

std::map<std::string, BehaviorNode> TemplateBackend::generate_actions(
  const ElaboratedDescription & d, const PlacedScene & scene, const PipelineContext & ctx)
{
  std::map<std::string, BehaviorNode> out;
  const double v_ego = scene.ego.target_speed;
  const auto mentions = find_mentions(d.adversarial_plan);
  for (const auto & adv : scene.adversaries) {
    std::string span;
    for (const auto & m : mentions) {
      if (m.id == adv.id) span = m.text;
    }
    const LanePosition & pos = scene.adversary_positions.at(adv.id);
    const double limit = scene.map->lane(pos.lane_id).speed_limit;
    const auto j = [&](const std::string & field, double amplitude) { return jitter(ctx, adv.id + "/" + field, amplitude); };
    const double aggr = aggressiveness_in(span);
    const double fast = round_to(std::min(v_ego + 5.0, limit) * j("speed", jitter_.speed), 0.01);
    const double cruise = round_to(v_ego * j("cruise", jitter_.speed), 0.01);
    double travel = cruise;
    if (has(span, "moderate speed")) travel = round_to(0.8 * limit * j("cruise", jitter_.speed), 0.01);
    else if (has_any(span, {"high speed", "fast"})) travel = round_to(limit * j("cruise", jitter_.speed), 0.01);
    else if (has(span, "slow")) travel = round_to(0.5 * limit * j("cruise", jitter_.speed), 0.01);

    std::vector<AtomicBehavior> steps;
    const auto tokens = tokens_in(span);
    bool turn_cut = false;
    for (const auto & t : tokens) turn_cut = turn_cut || t.token == Token::TurnCut;
    for (const auto & t : tokens) {
      switch (t.token) {
        case Token::TurnCut: break;
        case Token::Overtake:
          steps.push_back(atomic("Overtake", "overtake", {{"target", kEgoId}, {"target_speed", fast}, {"pass_margin", 1.0}}));
          break;
        case Token::CutIn:
          steps.push_back(atomic(
            "CutIn", "cut_in",
            {{"victim", kEgoId}, {"trigger_gap", round_to(10.0 * j("trigger", jitter_.trigger), 0.01)},
             {"aggressiveness", aggr},
             {"target_speed", round_to(std::min(v_ego + 1.0 + 3.0 * (1.0 - aggr), limit) * j("cut_speed", jitter_.speed), 0.01)}}));
          break;
        case Token::Turn: {
          const std::string dir = has(t.match, "right") ? "right" : "left";
          if (turn_cut) {
            steps.push_back(atomic(
              "CutIn", "cut_in",
              {{"victim", kEgoId}, {"trigger_gap", round_to(0.5 * j("trigger", jitter_.trigger), 0.01)},
               {"aggressiveness", 1.0}, {"target_speed", fast}}));
          }
          steps.push_back(atomic("FollowRoute", "route", {{"target_speed", cruise}, {"turn", dir}}));
          break;
        }
        case Token::Brake: {
          const bool hard = has_any(span, {"suddenly", "maximum", "hard", "abrupt", "slam"});
          if (hard) {
            AtomicBehavior b = atomic("SuddenBrake", "brake", {{"deceleration", std::string("max")}});
            const bool resumes = std::any_of(tokens.begin(), tokens.end(), [&](const Found & f) {
              return f.pos > t.pos && f.token == Token::KeepGoing;
            });
            if (resumes) b.success = Condition::speed_below(round_to(0.22 * v_ego * j("brake_floor", jitter_.timing), 0.01));
            steps.push_back(std::move(b));
          } else {
            steps.push_back(atomic("StopVehicle", "brake", {{"deceleration", 3.0}}));
          }
          break;
        }
        case Token::Idle: steps.push_back(atomic("IdleHold", "hold", {})); break;
        case Token::KeepGoing: steps.push_back(atomic("FollowRoute", "route", {{"target_speed", fast}})); break;
        case Token::Follow:
          steps.push_back(atomic(
            "FollowVehicle", "acc", {{"target", kEgoId}, {"target_speed", fast}, {"aggressiveness", aggr}}));
          break;
        case Token::RunRed: {
          AtomicBehavior r = atomic("RunRedLight", "runner", {{"target_speed", round_to(std::min(1.2 * v_ego, limit) * j("speed", jitter_.speed), 0.01)}});
          r.success = Condition::passed_position(pos.lane_id, scene.map->lane(pos.lane_id).length());
          steps.push_back(std::move(r));
          steps.push_back(atomic("FollowRoute", "route", {{"target_speed", travel}}));
          break;
        }
        case Token::Cruise: steps.push_back(atomic("FollowRoute", "route", {{"target_speed", travel}})); break;
        case Token::Later:
          if (!steps.empty() && !steps.back().success) {
            steps.back().success = Condition::elapsed(round_to(6.0 * j("later", jitter_.timing), 0.01));
          }
          break;
      }
    }
    if (steps.empty()) steps.push_back(atomic("FollowRoute", "route", {{"target_speed", travel}}));
    if (steps.size() == 1) {
      out[adv.id] = BehaviorNode::make_atomic(std::move(steps.front()));
    } else {
      std::vector<BehaviorNode> children;
      for (auto & s : steps) children.push_back(BehaviorNode::make_atomic(std::move(s)));
      out[adv.id] = BehaviorNode::sequential(std::move(children));
    }
  }
  return out;
}

BackgroundSpec TemplateBackend::make_chaos(const ElaboratedDescription & d, const PipelineContext &)
{
  const std::string text = lower(d.background_plan);
  BackgroundSpec b;
  if (has_any(text, {"heavy", "busy", "crowded", "dense", "rush"})) b.density_profile = DensityProfile::Heavy;
  else if (has_any(text, {"no one", "nobody", "quiet", "empty", "deserted"})) b.density_profile = DensityProfile::None;
  else b.density_profile = DensityProfile::Sparse;
  b.count = density_count(b.density_profile);
  return b;
}

// --- orchestration ----------------------------------------------------------

GenerationResult generate_scenario(const std::string & description, GenerationBackend & backend, const PipelineContext & ctx)
{
  GenerationResult result;
  auto & notes = result.notes;
  ElaboratedDescription d = backend.interpret(description, ctx);
  for (const auto & layer : d.improvised) notes.push_back("improvised " + layer);

  ScenarioSpec spec;
  spec.seed = ctx.seed;
  spec.environment.weather = backend.weather_report(d, ctx);
  const EgoPlan ego = backend.locate_ego(d, ctx);
  spec.environment.map_id = ego.map_id;
  spec.ego.placement = ego.placement;
  spec.ego.target_speed = ego.target_speed;

  const auto map = ctx.maps.get(ego.map_id);
  const LanePosition ego_pos = find_ego_spawn(*map, ego.placement, ctx.seed);
  const Footprint ego_size = footprint_of(VehicleClass::Sedan);

  PlacedScene scene;
  scene.map = map.get();
  scene.ego = ego;
  scene.ego_position = ego_pos;
  std::vector<OrientedBox> boxes{{map->pose_at(ego_pos), ego_size}};
  for (AdversaryPlan plan : backend.locate_adversaries(d, ego, ctx)) {
    std::vector<Relation> tried;
    while (true) {
      std::string reason;
      try {
        const Footprint size = footprint_of(plan.vehicle_class);
        const LanePosition pos = resolve_relative_placement(*map, ego_pos, ego_size, plan.placement, size);
        const OrientedBox box{map->pose_at(pos), size};
        const bool overlaps = std::any_of(boxes.begin(), boxes.end(), [&](const OrientedBox & b) { return boxes_overlap(b, box); });
        if (!overlaps) {
          boxes.push_back(box);
          scene.adversary_positions[plan.id] = pos;
          scene.adversaries.push_back(plan);
          break;
        }
        reason = "overlaps an already placed vehicle";
      } catch (const Error & e) {
        if (e.kind() != ErrorKind::Unsatisfiable) throw;
        reason = e.what();
      }
      tried.push_back(plan.placement.relation);
      const Relation before = plan.placement.relation;
      plan = backend.relocate_adversary(d, plan, tried, reason, ctx);
      notes.push_back(
        "adversary '" + plan.id + "': relation " + std::string(to_string(before)) + " unsatisfiable (" + reason +
        "), using " + std::string(to_string(plan.placement.relation)));
    }
  }

  auto behaviors = backend.generate_actions(d, scene, ctx);
  for (const auto & plan : scene.adversaries) {
    AdversarySpec a;
    a.id = plan.id;
    a.vehicle_class = plan.vehicle_class;
    a.placement = plan.placement;
    const auto it = behaviors.find(plan.id);
    if (it == behaviors.end()) {
      throw Error(ErrorKind::SchemaViolation, "no behavior generated for adversary '" + plan.id + "'");
    }
    a.behavior_root = it->second;
    spec.adversaries.push_back(std::move(a));
  }
  spec.background = backend.make_chaos(d, ctx);
  spec.intent.band = d.band;
  spec.intent.narrative = trim(description);
  throw_first(validate_cross_references(spec, &ctx.maps), "generated scenario");
  result.spec = std::move(spec);
  result.elaborated = std::move(d);
  return result;
}

nlohmann::json elaborated_to_json(const ElaboratedDescription & d)
{
  return {
    {"general_environment", d.general_environment},
    {"ego_context", d.ego_context},
    {"adversarial_plan", d.adversarial_plan},
    {"background_plan", d.background_plan},
    {"band", std::string(to_string(d.band))},
    {"hints",
     {{"require_left_neighbor", d.hints.require_left_neighbor},
      {"require_right_neighbor", d.hints.require_right_neighbor},
      {"green_on_arrival", d.hints.green_on_arrival}}},
    {"improvised", d.improvised}};
}

}  // namespace critsim
