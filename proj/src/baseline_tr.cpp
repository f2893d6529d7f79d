#include "fipp/baseline_tr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fipp {

std::vector<VelocityCommand> RolloutParams::default_candidates() {
  std::vector<VelocityCommand> out;
  const double deg = std::numbers::pi / 180.0;
  for (double speed : {0.0, 0.5, 1.0})
    for (double turn : {0.0, -45.0, 45.0, -90.0, 90.0}) out.push_back({speed, turn * deg});
  return out;
}

std::size_t RolloutParams::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / sim_dt));
}

void RolloutParams::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("rollout horizon must be > 0");
  if (!(sim_dt > 0.0)) throw std::invalid_argument("rollout sim_dt must be > 0");
  if (!(collision_radius > 0.0)) throw std::invalid_argument("collision_radius must be > 0");
  if (candidates.empty()) throw std::invalid_argument("candidate set is empty");
}

Pose integrate_unicycle(const Pose& pose, const VelocityCommand& cmd, double dt) {
  Pose out = pose;
  const double th = pose.heading;
  if (std::abs(cmd.turn_rate) < 1e-12) {
    out.position += cmd.speed * dt * Vec2{std::cos(th), std::sin(th)};
  } else {
    const double r = cmd.speed / cmd.turn_rate;
    const double th1 = th + cmd.turn_rate * dt;
    out.position += Vec2{r * (std::sin(th1) - std::sin(th)), -r * (std::cos(th1) - std::cos(th))};
    out.heading = th1;
  }
  return out;
}

std::vector<Pose> rollout(const RobotState& state, const VelocityCommand& cmd,
                          const RolloutParams& params) {
  params.validate();
  const std::size_t n = params.steps();
  std::vector<Pose> traj;
  traj.reserve(n + 1);
  traj.push_back({state.position, state.heading});
  for (std::size_t k = 0; k < n; ++k)
    traj.push_back(integrate_unicycle(traj.back(), cmd, params.sim_dt));
  return traj;
}

std::vector<std::vector<Vec2>> predict_obstacles(const std::vector<PedObservation>& peds,
                                                 const RolloutParams& params) {
  const std::size_t n = params.steps();
  std::vector<std::vector<Vec2>> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * params.sim_dt;
    out[k].reserve(peds.size());
    for (const auto& p : peds) out[k].push_back(p.position + t * p.velocity);
  }
  return out;
}

double score(const std::vector<Pose>& traj, const std::vector<std::vector<Vec2>>& obstacles,
             const Vec2& goal, const RolloutParams& params) {
  const double r2 = params.collision_radius * params.collision_radius;
  double min_clear2 = params.clearance_cap * params.clearance_cap;
  Vec2 end = traj.front().position;
  bool arrived = false;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (!arrived) {
      end = traj[k].position;
      arrived = distance(end, goal) <= params.goal_tolerance;
    }
    if (k == 0 || k >= obstacles.size()) continue;
    for (const Vec2& o : obstacles[k]) {
      const double d2 = (end - o).squaredNorm();
      if (d2 < r2) return std::numeric_limits<double>::infinity();
      min_clear2 = std::min(min_clear2, d2);
    }
  }
  return params.goal_weight * distance(end, goal) -
         params.clearance_weight * std::sqrt(min_clear2);
}

VelocityCommand tr_step(const RobotState& state, const std::vector<PedObservation>& peds,
                        const Vec2& goal, const RolloutParams& params) {
  params.validate();
  const auto obstacles = predict_obstacles(peds, params);
  double best = std::numeric_limits<double>::infinity();
  VelocityCommand chosen{};
  for (const auto& cmd : params.candidates) {
    const double s = score(rollout(state, cmd, params), obstacles, goal, params);
    if (s < best) {
      best = s;
      chosen = cmd;
    }
  }
  return chosen;
}

}  // namespace fipp
