#include "fipp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fipp/errors.hpp"

namespace fipp {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::chaotic: return "chaotic";
    case ScenarioKind::single_flow: return "single_flow";
    case ScenarioKind::double_flow: return "double_flow";
    case ScenarioKind::intersection: return "intersection";
    case ScenarioKind::wall: return "wall";
  }
  return "?";
}

const char* to_string(PlannerKind k) { return k == PlannerKind::fipp ? "fipp" : "tr"; }

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::reached: return "reached";
    case Outcome::timeout: return "timeout";
    case Outcome::frozen: return "frozen";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  for (auto k : {ScenarioKind::chaotic, ScenarioKind::single_flow, ScenarioKind::double_flow,
                 ScenarioKind::intersection, ScenarioKind::wall})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown scenario kind '" + s + "'");
}

PlannerKind parse_planner_kind(const std::string& s) {
  if (s == "fipp") return PlannerKind::fipp;
  if (s == "tr") return PlannerKind::tr;
  throw std::invalid_argument("unknown planner '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
  for (auto o : {Outcome::reached, Outcome::timeout, Outcome::frozen})
    if (s == to_string(o)) return o;
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Distance from p back along -dir to the edge of the region.
double upstream_distance(const Rect& r, const Vec2& p, const Vec2& dir) {
  double t = std::numeric_limits<double>::infinity();
  if (dir.x > 0) t = std::min(t, (p.x - r.min.x) / dir.x);
  if (dir.x < 0) t = std::min(t, (r.max.x - p.x) / -dir.x);
  if (dir.y > 0) t = std::min(t, (p.y - r.min.y) / dir.y);
  if (dir.y < 0) t = std::min(t, (r.max.y - p.y) / -dir.y);
  return std::max(0.0, t);
}

Lane make_lane(const Rect& region, const Vec2& dir, double speed) {
  Lane l;
  l.region = region;
  l.direction = dir / dir.norm();
  l.speed = speed;
  return l;
}

void finish_lanes(Scenario& s, int n_peds) {
  const int n_lanes = static_cast<int>(s.lanes.size());
  for (int k = 0; k < n_lanes; ++k) {
    Lane& l = s.lanes[k];
    l.n_peds = n_peds / n_lanes + (k < n_peds % n_lanes ? 1 : 0);
    const double length = std::abs(l.direction.x) * l.region.width() +
                          std::abs(l.direction.y) * l.region.height();
    l.spawn_rate = length > 0.0 ? l.n_peds * l.speed / length : 0.0;
  }
  s.n_peds = n_peds;
}

bool in_spawn_zone(const Scenario& s, const Vec2& p) {
  for (const auto& l : s.lanes)
    if (l.region.contains(p) && upstream_distance(l.region, p, l.direction) < 1.0) return true;
  return false;
}

double angle_between(const Vec2& a, const Vec2& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::acos(std::clamp(a.dot(b) / (na * nb), -1.0, 1.0));
}

}  // namespace

Scenario generate_scenario(ScenarioKind kind, int n_peds, std::uint64_t seed,
                           const ScenarioOptions& opts) {
  if (n_peds < 1) throw std::invalid_argument("n_peds must be >= 1");
  if (kind == ScenarioKind::wall)
    throw std::invalid_argument("the wall fixture is built by wall_fixture()");
  std::mt19937_64 rng(seed);
  const double w = opts.world_size;
  const double v = opts.ped_speed;
  Scenario s;
  s.kind = kind;
  s.seed = seed;
  s.bounds = {{0.0, 0.0}, {w, w}};
  const double mid = w / 2.0;
  switch (kind) {
    case ScenarioKind::chaotic:
      for (int k = 0; k < n_peds; ++k) {
        const double a = uniform(rng, -std::numbers::pi, std::numbers::pi);
        s.lanes.push_back(make_lane(s.bounds, {std::cos(a), std::sin(a)}, v));
      }
      break;
    case ScenarioKind::single_flow:
      s.lanes.push_back(make_lane({{0.0, mid - 3.0}, {w, mid + 3.0}}, {1.0, 0.0}, v));
      break;
    case ScenarioKind::double_flow:
      s.lanes.push_back(make_lane({{0.0, mid - 5.0}, {w, mid}}, {1.0, 0.0}, v));
      s.lanes.push_back(make_lane({{0.0, mid}, {w, mid + 5.0}}, {-1.0, 0.0}, v));
      break;
    case ScenarioKind::intersection:
      s.lanes.push_back(make_lane({{0.0, mid - 2.5}, {w, mid + 2.5}}, {1.0, 0.0}, v));
      s.lanes.push_back(make_lane({{mid - 2.5, 0.0}, {mid + 2.5, w}}, {0.0, 1.0}, v));
      break;
    case ScenarioKind::wall:
      break;
  }
  finish_lanes(s, n_peds);

  for (int attempt = 0;; ++attempt) {
    if (attempt > 100000) throw std::runtime_error("could not place robot start/goal");
    const Vec2 a{uniform(rng, 1.0, w - 1.0), uniform(rng, 1.0, w - 1.0)};
    const Vec2 b{uniform(rng, 1.0, w - 1.0), uniform(rng, 1.0, w - 1.0)};
    if (in_spawn_zone(s, a) || in_spawn_zone(s, b)) continue;
    if (distance(a, b) < opts.min_start_goal_distance) continue;
    s.robot_start = a;
    s.robot_goal = b;
    break;
  }
  return s;
}

Scenario wall_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scenario s;
  s.kind = ScenarioKind::wall;
  s.seed = seed;
  s.bounds = {{0.0, 0.0}, {20.0, 20.0}};
  s.lanes.push_back(make_lane({{9.9, 0.0}, {10.1, 20.0}}, {1.0, 0.0}, 0.0));
  for (int k = 0; k < 29; ++k) s.placements.push_back({0, {10.0, 0.2 + 0.7 * k}});
  s.lanes[0].n_peds = 29;
  s.n_peds = 29;
  s.robot_start = {uniform(rng, 2.0, 6.0), uniform(rng, 2.0, 18.0)};
  s.robot_goal = {uniform(rng, 14.0, 18.0), uniform(rng, 2.0, 18.0)};
  return s;
}

Vec2 sample_spawn_point(const Lane& lane, std::mt19937_64& rng, double depth) {
  const Rect& r = lane.region;
  const Vec2 p{uniform(rng, r.min.x, r.max.x), uniform(rng, r.min.y, r.max.y)};
  const Vec2 entry = p - upstream_distance(r, p, lane.direction) * lane.direction;
  Vec2 out = entry + uniform(rng, 0.0, depth) * lane.direction;
  out.x = std::clamp(out.x, r.min.x, r.max.x);
  out.y = std::clamp(out.y, r.min.y, r.max.y);
  return out;
}

PedStepResult ped_step(Pedestrian& ped, const Lane& lane, const Rect& bounds,
                       const std::optional<Vec2>& robot, double dt, std::mt19937_64& rng,
                       const PedParams& params, PedId& next_id) {
  const double noise =
      params.heading_noise > 0.0
          ? std::normal_distribution<double>(0.0, params.heading_noise)(rng)
          : 0.0;
  PedStepResult res;
  if (params.yield_enabled && robot) {
    const Vec2 to_robot = *robot - ped.position;
    if (to_robot.norm() < params.yield_distance &&
        angle_between(lane.direction, to_robot) <= params.yield_half_angle) {
      ped.velocity = {};
      res.yielded = true;
      return res;
    }
  }
  const double heading = std::atan2(lane.direction.y, lane.direction.x) + noise;
  ped.velocity = lane.speed * Vec2{std::cos(heading), std::sin(heading)};
  ped.position += dt * ped.velocity;
  if (!bounds.contains(ped.position)) {
    ped.position = sample_spawn_point(lane, rng);
    ped.velocity = lane.speed * lane.direction;
    ped.id = next_id++;
    res.respawned = true;
  }
  return res;
}

GridSpec world_grid(const Rect& bounds, double cell_size) {
  GridSpec g;
  g.origin = bounds.min;
  g.cell_size = cell_size;
  g.width = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell_size - 1e-9)));
  g.height = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell_size - 1e-9)));
  return g;
}

namespace {

// Crowd state shared by episodes and crowd-only recordings.
class Crowd {
 public:
  Crowd(const Scenario& s, const PedParams& params) : scenario_(s), params_(params) {
    std::vector<int> lane_of;
    if (!s.placements.empty()) {
      for (const auto& p : s.placements) lane_of.push_back(p.lane);
    } else {
      for (int l = 0; l < static_cast<int>(s.lanes.size()); ++l)
        for (int k = 0; k < s.lanes[l].n_peds; ++k) lane_of.push_back(l);
    }
    for (std::size_t slot = 0; slot < lane_of.size(); ++slot) {
      std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                        static_cast<std::uint32_t>(slot), 0x5eedu};
      rngs_.emplace_back(seq);
      Pedestrian p;
      p.id = static_cast<PedId>(slot + 1);
      p.lane = lane_of[slot];
      const Lane& lane = s.lanes.at(p.lane);
      if (!s.placements.empty()) {
        p.position = s.placements[slot].position;
      } else {
        const Rect& r = lane.region;
        p.position = {uniform(rngs_.back(), r.min.x, r.max.x),
                      uniform(rngs_.back(), r.min.y, r.max.y)};
      }
      p.velocity = lane.speed * lane.direction;
      peds_.push_back(p);
    }
    next_id_ = static_cast<PedId>(peds_.size() + 1);
  }

  void step(const std::optional<Vec2>& robot, double dt) {
    for (std::size_t k = 0; k < peds_.size(); ++k)
      ped_step(peds_[k], scenario_.lanes[peds_[k].lane], scenario_.bounds, robot, dt, rngs_[k],
               params_, next_id_);
  }

  std::vector<PedObservation> observe() const {
    std::vector<PedObservation> out;
    out.reserve(peds_.size());
    for (const auto& p : peds_) out.push_back({p.id, p.position, p.velocity});
    return out;
  }

 private:
  const Scenario& scenario_;
  PedParams params_;
  std::vector<Pedestrian> peds_;
  std::vector<std::mt19937_64> rngs_;
  PedId next_id_ = 1;
};

// Moves along a polyline for at most `budget` metres.
Vec2 walk(Vec2 p, const std::vector<Vec2>& targets, double budget) {
  for (const Vec2& t : targets) {
    const double d = distance(p, t);
    if (d <= budget + 1e-12) {
      budget -= d;
      p = t;
      continue;
    }
    p += (t - p) * (budget / d);
    break;
  }
  return p;
}

}  // namespace

EpisodeLog run_episode(const Scenario& scenario, PlannerKind planner, const EpisodeConfig& cfg) {
  if (!(cfg.sim_dt > 0.0) || !(cfg.max_t > 0.0))
    throw std::invalid_argument("sim_dt and max_t must be > 0");
  EpisodeLog log;
  log.scenario = scenario;
  log.planner = planner;
  log.config = cfg;

  Crowd crowd(scenario, cfg.peds);
  FlowField field(world_grid(scenario.bounds, cfg.cell_size));
  Replanner replanner(cfg.cost, cfg.replan_period);
  std::size_t frame_no = 0;
  auto observe_flow = [&](const std::vector<PedObservation>& obs) {
    if (planner != PlannerKind::fipp) return;
    deposit_frame(field, {static_cast<double>(frame_no++) * cfg.sim_dt, obs}, cfg.flow);
  };

  const auto warmup_steps = static_cast<std::size_t>(std::llround(cfg.warmup_t / cfg.sim_dt));
  for (std::size_t k = 0; k < warmup_steps; ++k) {
    observe_flow(crowd.observe());
    crowd.step(std::nullopt, cfg.sim_dt);
  }

  const Vec2 goal = scenario.robot_goal;
  Vec2 pos = scenario.robot_start;
  Vec2 vel;
  const Vec2 to_goal = goal - pos;
  Pose tr_pose{pos, std::atan2(to_goal.y, to_goal.x)};
  const auto freeze_steps = static_cast<std::size_t>(std::llround(cfg.freeze_time / cfg.sim_dt));
  std::size_t zero_steps = 0;

  double t = 0.0;
  for (std::size_t step = 0;; ++step) {
    const auto peds = crowd.observe();
    log.records.push_back({t, pos, vel, peds, false});

    if (distance(pos, goal) <= cfg.goal_tolerance) {
      log.outcome = Outcome::reached;
      break;
    }
    if (t >= cfg.max_t - 1e-9) {
      log.outcome = Outcome::timeout;
      break;
    }
    if (zero_steps >= freeze_steps) {
      log.outcome = Outcome::frozen;
      break;
    }

    Vec2 next = pos;
    double commanded_speed = 0.0;
    if (planner == PlannerKind::fipp) {
      observe_flow(peds);
      try {
        update_field(field, cfg.flow);
        const Vec2 wp = replanner.next(field, pos, goal);
        auto targets = replanner.remaining();
        if (targets.empty()) targets.push_back(wp);
        next = walk(pos, targets, cfg.v_max * cfg.sim_dt);
        commanded_speed = distance(pos, next) / cfg.sim_dt;
      } catch (const PlanError& e) {
        log.note = e.what();
      }
    } else {
      RobotState st{pos, tr_pose.heading, 0.0, 0.0};
      RolloutParams rp = cfg.rollout;
      rp.goal_tolerance = cfg.goal_tolerance;
      const VelocityCommand cmd = tr_step(st, peds, goal, rp);
      tr_pose = integrate_unicycle(tr_pose, cmd, cfg.sim_dt);
      next = tr_pose.position;
      commanded_speed = cmd.speed;
    }
    zero_steps = commanded_speed > 0.0 ? 0 : zero_steps + 1;

    crowd.step(pos, cfg.sim_dt);
    vel = (next - pos) / cfg.sim_dt;
    pos = next;
    t = static_cast<double>(step + 1) * cfg.sim_dt;
  }
  log.records.back().done = true;
  return log;
}

TrackLog record_crowd(const Scenario& scenario, double duration, double dt,
                      const PedParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  Crowd crowd(scenario, params);
  TrackLog log;
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  for (std::size_t k = 0; k <= steps; ++k) {
    log.push_back({static_cast<double>(k) * dt, crowd.observe()});
    if (k < steps) crowd.step(std::nullopt, dt);
  }
  return log;
}

TrackLog episode_track_log(const EpisodeLog& log) {
  TrackLog out;
  for (const auto& r : log.records) out.push_back({r.t, r.pedestrians});
  return out;
}

}  // namespace fipp
