#include "fipp/baseline_tr.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

namespace fipp {
namespace {

TEST(Rollout, StraightLine) {
  RolloutParams p;
  const auto t = rollout({{0, 0}, 0.0}, {1.0, 0.0}, p);
  ASSERT_EQ(t.size(), 21u);
  EXPECT_NEAR(t.back().position.x, 2.0, 1e-12);
  EXPECT_NEAR(t.back().position.y, 0.0, 1e-12);
}

TEST(Rollout, NullCommandStaysPut) {
  RolloutParams p;
  for (const auto& pose : rollout({{1.5, -2.0}, 0.7}, {0.0, 0.0}, p)) {
    EXPECT_EQ(pose.position, (Vec2{1.5, -2.0}));
    EXPECT_EQ(pose.heading, 0.7);
  }
}

TEST(Rollout, QuarterArc) {
  RolloutParams p;
  p.horizon = 1.0;
  const auto t = rollout({{0, 0}, 0.0}, {1.0, std::numbers::pi / 2}, p);
  EXPECT_NEAR(t.back().position.x, 2.0 / std::numbers::pi, 1e-12);
  EXPECT_NEAR(t.back().position.y, 2.0 / std::numbers::pi, 1e-12);
  EXPECT_NEAR(t.back().heading, std::numbers::pi / 2, 1e-12);
}

TEST(Score, PrefersEndpointNearGoal) {
  RolloutParams p;
  const std::vector<std::vector<Vec2>> none(p.steps() + 1);
  const auto near = rollout({{0, 0}, 0.0}, {1.0, 0.0}, p);
  const auto far = rollout({{0, 0}, 0.0}, {0.5, 0.0}, p);
  EXPECT_LT(score(near, none, {5, 0}, p), score(far, none, {5, 0}, p));
}

TEST(Score, RejectsCollision) {
  RolloutParams p;
  const auto traj = rollout({{0, 0}, 0.0}, {1.0, 0.0}, p);
  const auto obstacles = predict_obstacles({{1, {1.0, 0.1}, {0, 0}}}, p);
  EXPECT_TRUE(std::isinf(score(traj, obstacles, {5, 0}, p)));
}

TEST(Score, CurrentPoseNotChecked) {
  // A pedestrian already inside the radius does not veto moving away.
  RolloutParams p;
  const auto away = rollout({{0, 0}, 0.0}, {1.0, 0.0}, p);
  const auto obstacles = predict_obstacles({{1, {-0.45, 0.0}, {0, 0}}}, p);
  EXPECT_FALSE(std::isinf(score(away, obstacles, {5, 0}, p)));
}

TEST(TrStep, OpenSpaceGoesStraightAtFullSpeed) {
  RolloutParams p;
  const auto cmd = tr_step({{0, 0}, 0.0}, {}, {10, 0}, p);
  EXPECT_EQ(cmd, (VelocityCommand{1.0, 0.0}));
}

TEST(TrStep, TurnsAroundObstacleAhead) {
  RolloutParams p;
  p.candidates = {{1.0, 0.0}, {1.0, std::numbers::pi / 4}, {0.0, 0.0}};
  const std::vector<PedObservation> ped{{1, {1.5, 0.0}, {0, 0}}};
  const RobotState st{{0, 0}, 0.0};
  const auto obstacles = predict_obstacles(ped, p);
  const Vec2 goal{10, 0};
  const double straight = score(rollout(st, p.candidates[0], p), obstacles, goal, p);
  const double turn = score(rollout(st, p.candidates[1], p), obstacles, goal, p);
  const double stay = score(rollout(st, p.candidates[2], p), obstacles, goal, p);
  EXPECT_TRUE(std::isinf(straight));
  EXPECT_LT(turn, stay);
  EXPECT_EQ(tr_step(st, ped, goal, p), p.candidates[1]);
}

TEST(TrStep, SurroundedFreezes) {
  RolloutParams p;
  std::vector<PedObservation> ring;
  for (int k = 0; k < 16; ++k) {
    const double a = 2 * std::numbers::pi * k / 16;
    ring.push_back({k, {0.6 * std::cos(a), 0.6 * std::sin(a)}, {0, 0}});
  }
  EXPECT_EQ(tr_step({{0, 0}, 0.0}, ring, {10, 0}, p), (VelocityCommand{0.0, 0.0}));
}

TEST(TrStep, WallFreezes) {
  RolloutParams p;
  std::vector<PedObservation> wall;
  for (int k = 0; k < 29; ++k) wall.push_back({k, {10.0, 0.2 + 0.7 * k}, {0, 0}});
  EXPECT_EQ(tr_step({{9.4, 10.0}, 0.0}, wall, {15, 10}, p), (VelocityCommand{0.0, 0.0}));
}

TEST(TrStep, DeterministicAndWeaklyBestWithoutObstacles) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10), a(-3, 3);
  RolloutParams p;
  for (int k = 0; k < 100; ++k) {
    const RobotState st{{u(rng), u(rng)}, a(rng)};
    const Vec2 goal{u(rng), u(rng)};
    const auto cmd = tr_step(st, {}, goal, p);
    EXPECT_EQ(cmd, tr_step(st, {}, goal, p));
    // Rollouts stop once they reach the goal.
    auto endpoint_distance = [&](const VelocityCommand& c) {
      const auto tr = rollout(st, c, p);
      for (const auto& pose : tr)
        if (distance(pose.position, goal) <= p.goal_tolerance) return distance(pose.position, goal);
      return distance(tr.back().position, goal);
    };
    const double chosen = endpoint_distance(cmd);
    for (const auto& c : p.candidates) EXPECT_LE(chosen, endpoint_distance(c) + 1e-12);
  }
}

TEST(RolloutParams, Validation) {
  RolloutParams p;
  p.candidates.clear();
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = RolloutParams{};
  p.collision_radius = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace fipp
