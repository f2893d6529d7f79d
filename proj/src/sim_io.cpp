#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fipp/errors.hpp"
#include "fipp/sim.hpp"

namespace fipp {

using nlohmann::json;

namespace {

json vec_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("expected [x, y] pair");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json rect_json(const Rect& r) { return {{"min", vec_json(r.min)}, {"max", vec_json(r.max)}}; }

Rect rect_from(const json& j) { return {vec_from(j.at("min")), vec_from(j.at("max"))}; }

json config_json(const EpisodeConfig& c) {
  return {{"sim_dt", c.sim_dt},
          {"max_t", c.max_t},
          {"v_max", c.v_max},
          {"goal_tolerance", c.goal_tolerance},
          {"freeze_time", c.freeze_time},
          {"warmup_t", c.warmup_t},
          {"cell_size", c.cell_size},
          {"replan_period", c.replan_period},
          {"xi", c.flow.xi},
          {"h", c.flow.h},
          {"ema_decay", c.flow.ema_decay},
          {"rel_velocity_mode", c.flow.rel_velocity_mode == RelVelocityMode::mean ? "mean" : "sum"},
          {"influence_sign", c.flow.influence_sign == InfluenceSign::toward_neighbors
                                 ? "toward_neighbors"
                                 : "as_written"},
          {"lambda", c.cost.lambda_flow},
          {"step_weight", c.cost.step_weight},
          {"heuristic_weight", c.cost.heuristic_weight},
          {"connectivity", c.cost.connectivity},
          {"tr_horizon", c.rollout.horizon},
          {"tr_collision_radius", c.rollout.collision_radius},
          {"tr_goal_weight", c.rollout.goal_weight},
          {"tr_clearance_weight", c.rollout.clearance_weight},
          {"ped_heading_noise", c.peds.heading_noise},
          {"ped_yield", c.peds.yield_enabled}};
}

json scenario_json(const Scenario& s) {
  json lanes = json::array();
  for (const auto& l : s.lanes) {
    lanes.push_back({{"region", rect_json(l.region)},
                     {"direction", vec_json(l.direction)},
                     {"speed", l.speed},
                     {"spawn_rate", l.spawn_rate},
                     {"n_peds", l.n_peds}});
  }
  json j = {{"kind", to_string(s.kind)},
            {"bounds", rect_json(s.bounds)},
            {"lanes", lanes},
            {"n_peds", s.n_peds},
            {"robot_start", vec_json(s.robot_start)},
            {"robot_goal", vec_json(s.robot_goal)},
            {"seed", s.seed}};
  if (!s.placements.empty()) {
    json p = json::array();
    for (const auto& pl : s.placements) p.push_back({{"lane", pl.lane}, {"position", vec_json(pl.position)}});
    j["placements"] = p;
  }
  return j;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);
  out += buf;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) { return scenario_json(s).dump(2); }

Scenario scenario_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Scenario s;
    s.kind = parse_scenario_kind(j.at("kind").get<std::string>());
    s.bounds = rect_from(j.at("bounds"));
    for (const auto& lj : j.at("lanes")) {
      Lane l;
      l.region = rect_from(lj.at("region"));
      l.direction = vec_from(lj.at("direction"));
      l.speed = lj.at("speed").get<double>();
      l.spawn_rate = lj.value("spawn_rate", 0.0);
      l.n_peds = lj.at("n_peds").get<int>();
      const double n = l.direction.norm();
      if (std::abs(n - 1.0) > 1e-6) throw InputError("lane direction must be unit length");
      s.lanes.push_back(l);
    }
    s.n_peds = j.at("n_peds").get<int>();
    s.robot_start = vec_from(j.at("robot_start"));
    s.robot_goal = vec_from(j.at("robot_goal"));
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("placements")) {
      for (const auto& pj : j.at("placements"))
        s.placements.push_back({pj.at("lane").get<int>(), vec_from(pj.at("position"))});
    }
    if (!s.bounds.contains(s.robot_start) || !s.bounds.contains(s.robot_goal))
      throw InputError("robot start and goal must lie inside the bounds");
    int total = 0;
    for (const auto& l : s.lanes) total += l.n_peds;
    const int expected = s.placements.empty() ? total : static_cast<int>(s.placements.size());
    if (expected != s.n_peds) throw InputError("n_peds does not match the lane counts");
    for (const auto& pl : s.placements)
      if (pl.lane < 0 || pl.lane >= static_cast<int>(s.lanes.size()))
        throw InputError("placement refers to an unknown lane");
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("scenario JSON: ") + e.what());
  }
}

void write_episode_jsonl(std::ostream& out, const EpisodeLog& log) {
  json header = {{"type", "episode"},
                 {"planner", to_string(log.planner)},
                 {"scenario", scenario_json(log.scenario)},
                 {"config", config_json(log.config)},
                 {"ped_fields", {"id", "x", "y", "vx", "vy"}}};
  out << header.dump() << '\n';
  std::string line;
  for (const auto& r : log.records) {
    line.clear();
    line += "{\"t\":";
    append_number(line, r.t);
    line += ",\"robot\":{\"x\":";
    append_number(line, r.robot_position.x);
    line += ",\"y\":";
    append_number(line, r.robot_position.y);
    line += ",\"vx\":";
    append_number(line, r.robot_velocity.x);
    line += ",\"vy\":";
    append_number(line, r.robot_velocity.y);
    line += "},\"peds\":[";
    for (std::size_t k = 0; k < r.pedestrians.size(); ++k) {
      const auto& p = r.pedestrians[k];
      if (k) line += ',';
      line += '[';
      line += std::to_string(p.id);
      for (double v : {p.position.x, p.position.y, p.velocity.x, p.velocity.y}) {
        line += ',';
        append_number(line, v);
      }
      line += ']';
    }
    line += "]}";
    out << line << '\n';
  }
  json footer = {{"type", "outcome"}, {"outcome", to_string(log.outcome)}};
  if (!log.note.empty()) footer["note"] = log.note;
  out << footer.dump() << '\n';
}

}  // namespace fipp
