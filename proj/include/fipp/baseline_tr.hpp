#pragma once

// Trajectory-rollout local planner used as the comparison baseline.
// Pedestrians are dynamic obstacles extrapolated at constant velocity; any
// candidate whose rollout comes within collision_radius of one is rejected,
// and when every candidate is rejected the robot stops.

#include <vector>

#include "fipp/flowfield.hpp"

namespace fipp {

struct RobotState {
  Vec2 position;
  double heading = 0.0;  // rad
  double speed = 0.0;    // m/s
  double turn_rate = 0.0;
};

struct VelocityCommand {
  double speed = 0.0;      // m/s
  double turn_rate = 0.0;  // rad/s
  bool operator==(const VelocityCommand&) const = default;
};

struct Pose {
  Vec2 position;
  double heading = 0.0;
};

struct RolloutParams {
  std::vector<VelocityCommand> candidates = default_candidates();
  double horizon = 2.0;
  double sim_dt = 0.1;
  double goal_weight = 1.0;
  double clearance_weight = 0.2;
  double clearance_cap = 2.0;  // clearance beyond this earns nothing
  double collision_radius = 0.5;
  // A rollout that reaches the goal stops there for the rest of the horizon.
  double goal_tolerance = 0.25;

  // speeds {0, 0.5, 1.0} x turn rates {0, -45, 45, -90, 90} deg/s; standing
  // still comes first so it wins ties.
  static std::vector<VelocityCommand> default_candidates();
  std::size_t steps() const;
  void validate() const;
};

// Exact unicycle integration of a constant command for one interval.
Pose integrate_unicycle(const Pose& pose, const VelocityCommand& cmd, double dt);

// Poses at t = 0, dt, ..., horizon.
std::vector<Pose> rollout(const RobotState& state, const VelocityCommand& cmd,
                          const RolloutParams& params);

// predicted[k][p] = position of pedestrian p at rollout step k.
std::vector<std::vector<Vec2>> predict_obstacles(const std::vector<PedObservation>& peds,
                                                 const RolloutParams& params);

// goal_weight * endpoint distance - clearance_weight * min clearance; lower is
// better and +inf marks a rejected candidate. The current pose (k = 0) is not
// collision-checked since no command can change it.
double score(const std::vector<Pose>& traj, const std::vector<std::vector<Vec2>>& obstacles,
             const Vec2& goal, const RolloutParams& params);

// Argmin over the candidate list, first candidate winning ties. Returns the
// zero command when every candidate is rejected.
VelocityCommand tr_step(const RobotState& state, const std::vector<PedObservation>& peds,
                        const Vec2& goal, const RolloutParams& params);

}  // namespace fipp
