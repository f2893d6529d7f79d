#pragma once

// Deterministic 2D crowd + robot simulator.
//
// Pedestrians walk along lanes with Gaussian heading noise and stop when the
// robot stands in front of them. Every pedestrian slot owns its own random
// stream, so two episodes on the same scenario see the same crowd noise no
// matter which planner drives the robot.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fipp/baseline_tr.hpp"
#include "fipp/flowfield.hpp"
#include "fipp/planner.hpp"

namespace fipp {

enum class ScenarioKind { chaotic, single_flow, double_flow, intersection, wall };
enum class PlannerKind { fipp, tr };
enum class Outcome { reached, timeout, frozen };

const char* to_string(ScenarioKind k);
const char* to_string(PlannerKind k);
const char* to_string(Outcome o);
// Throw std::invalid_argument on unknown names.
ScenarioKind parse_scenario_kind(const std::string& s);
PlannerKind parse_planner_kind(const std::string& s);
Outcome parse_outcome(const std::string& s);

// The four crowd families used in benchmarks (the wall fixture excluded).
inline constexpr ScenarioKind kBenchKinds[] = {ScenarioKind::chaotic, ScenarioKind::single_flow,
                                               ScenarioKind::double_flow,
                                               ScenarioKind::intersection};

struct Rect {
  Vec2 min;
  Vec2 max;
  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

struct Lane {
  Rect region;
  Vec2 direction;        // unit length
  double speed = 1.0;    // m/s
  double spawn_rate = 0; // steady-state respawns per second
  int n_peds = 0;
};

struct PedPlacement {
  int lane = 0;
  Vec2 position;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::single_flow;
  Rect bounds{{0.0, 0.0}, {20.0, 20.0}};
  std::vector<Lane> lanes;
  int n_peds = 0;
  Vec2 robot_start;
  Vec2 robot_goal;
  std::uint64_t seed = 0;
  // Fixed initial positions; when empty pedestrians start uniformly inside
  // their lane regions.
  std::vector<PedPlacement> placements;
};

struct ScenarioOptions {
  double world_size = 20.0;
  double ped_speed = 1.0;
  double min_start_goal_distance = 8.0;
};

// Deterministic in (kind, n_peds, seed). Throws std::invalid_argument for
// n_peds < 1 or the wall kind (use wall_fixture).
Scenario generate_scenario(ScenarioKind kind, int n_peds, std::uint64_t seed,
                           const ScenarioOptions& opts = {});

// Stationary pedestrian wall across the world at x = 10 with 0.7 m spacing;
// start on the left, goal on the right.
Scenario wall_fixture(std::uint64_t seed);

struct Pedestrian {
  PedId id = 0;
  int lane = 0;
  Vec2 position;
  Vec2 velocity;
};

struct PedParams {
  double heading_noise = 0.1;  // rad, std-dev per step
  bool yield_enabled = true;
  double yield_distance = 0.5;
  double yield_half_angle = 1.0471975511965976;  // 60 deg
};

struct PedStepResult {
  bool yielded = false;
  bool respawned = false;
};

// Advances one pedestrian. The heading noise sample is always drawn so the
// stream stays aligned across episodes. A respawned pedestrian receives
// `next_id`, which is then incremented.
PedStepResult ped_step(Pedestrian& ped, const Lane& lane, const Rect& bounds,
                       const std::optional<Vec2>& robot, double dt, std::mt19937_64& rng,
                       const PedParams& params, PedId& next_id);

// Uniform point on the upstream edge of a lane region (within `depth` of it).
Vec2 sample_spawn_point(const Lane& lane, std::mt19937_64& rng, double depth = 0.5);

struct WorldState {
  double t = 0.0;
  Vec2 robot_position;
  Vec2 robot_velocity;
  std::vector<PedObservation> pedestrians;
  bool done = false;
};

struct EpisodeConfig {
  double sim_dt = 0.1;
  double max_t = 120.0;
  double v_max = 1.0;
  double goal_tolerance = 0.25;
  double freeze_time = 10.0;
  // Crowd pre-roll before the robot is placed; FIPP observes it.
  double warmup_t = 10.0;
  double cell_size = 0.5;
  std::size_t replan_period = 10;
  FlowParams flow;
  CostParams cost;
  RolloutParams rollout;
  PedParams peds;
};

struct EpisodeLog {
  Scenario scenario;
  PlannerKind planner = PlannerKind::fipp;
  EpisodeConfig config;
  std::vector<WorldState> records;
  Outcome outcome = Outcome::timeout;
  std::string note;  // planner error text, if any
};

GridSpec world_grid(const Rect& bounds, double cell_size);

// Never throws for planner failures; they surface as the outcome.
EpisodeLog run_episode(const Scenario& scenario, PlannerKind planner, const EpisodeConfig& config);

// Crowd-only recording (no robot present) sampled every dt for `duration`.
TrackLog record_crowd(const Scenario& scenario, double duration, double dt,
                      const PedParams& params = {});

TrackLog episode_track_log(const EpisodeLog& log);

// Scenario JSON and EpisodeLog JSONL.
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
void write_episode_jsonl(std::ostream& out, const EpisodeLog& log);

}  // namespace fipp
