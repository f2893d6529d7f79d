#include "fipp/sim.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "fipp/errors.hpp"
#include "gtest/gtest.h"

namespace fipp {
namespace {

TEST(Scenario, Deterministic) {
  const Scenario a = generate_scenario(ScenarioKind::single_flow, 30, 7);
  const Scenario b = generate_scenario(ScenarioKind::single_flow, 30, 7);
  EXPECT_EQ(scenario_to_json(a), scenario_to_json(b));
  EXPECT_NE(scenario_to_json(a), scenario_to_json(generate_scenario(ScenarioKind::single_flow, 30, 8)));
}

TEST(Scenario, LaneGeometry) {
  const Scenario d = generate_scenario(ScenarioKind::double_flow, 40, 1);
  ASSERT_EQ(d.lanes.size(), 2u);
  EXPECT_DOUBLE_EQ(d.lanes[0].direction.dot(d.lanes[1].direction), -1.0);
  const Scenario x = generate_scenario(ScenarioKind::intersection, 30, 3);
  ASSERT_EQ(x.lanes.size(), 2u);
  EXPECT_DOUBLE_EQ(x.lanes[0].direction.dot(x.lanes[1].direction), 0.0);
  const Scenario c = generate_scenario(ScenarioKind::chaotic, 25, 2);
  EXPECT_EQ(c.lanes.size(), 25u);
}

TEST(Scenario, InvariantsAcrossSeeds) {
  for (auto kind : kBenchKinds)
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const Scenario s = generate_scenario(kind, 25 + static_cast<int>(seed % 26), seed);
      EXPECT_TRUE(s.bounds.contains(s.robot_start));
      EXPECT_TRUE(s.bounds.contains(s.robot_goal));
      EXPECT_GE(distance(s.robot_start, s.robot_goal), 8.0);
      int total = 0;
      for (const auto& l : s.lanes) {
        EXPECT_NEAR(l.direction.norm(), 1.0, 1e-12);
        total += l.n_peds;
      }
      EXPECT_EQ(total, s.n_peds);
    }
}

TEST(Scenario, JsonRoundTrip) {
  const Scenario s = wall_fixture(4);
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
  EXPECT_THROW(scenario_from_json("{\"kind\": \"single_flow\"}"), InputError);
  EXPECT_THROW(scenario_from_json("not json"), InputError);
}

TEST(Scenario, Errors) {
  EXPECT_THROW(generate_scenario(ScenarioKind::single_flow, 0, 1), std::invalid_argument);
  EXPECT_THROW(parse_scenario_kind("stampede"), std::invalid_argument);
}

struct PedFixture {
  Lane lane;
  Rect bounds{{0, 0}, {20, 20}};
  PedParams params;
  std::mt19937_64 rng{1};
  PedId next_id = 100;
  PedFixture() {
    lane.region = bounds;
    lane.direction = {1, 0};
    lane.speed = 1.2;
    params.heading_noise = 0.0;
  }
};

TEST(PedStep, FreeFlow) {
  PedFixture f;
  Pedestrian p{1, 0, {5, 5}, {}};
  ped_step(p, f.lane, f.bounds, std::nullopt, 0.1, f.rng, f.params, f.next_id);
  EXPECT_NEAR(p.position.x, 5.12, 1e-12);
  EXPECT_EQ(p.position.y, 5.0);
}

TEST(PedStep, YieldsToRobotAhead) {
  PedFixture f;
  Pedestrian p{1, 0, {5, 5}, {}};
  const auto r = ped_step(p, f.lane, f.bounds, Vec2{5.3, 5.0}, 0.1, f.rng, f.params, f.next_id);
  EXPECT_TRUE(r.yielded);
  EXPECT_EQ(p.position, (Vec2{5, 5}));
  EXPECT_EQ(p.velocity, (Vec2{0, 0}));
  // Behind the pedestrian, or outside the cone: no yield.
  ped_step(p, f.lane, f.bounds, Vec2{4.7, 5.0}, 0.1, f.rng, f.params, f.next_id);
  EXPECT_GT(p.position.x, 5.0);
  f.params.yield_enabled = false;
  Pedestrian q{2, 0, {5, 5}, {}};
  ped_step(q, f.lane, f.bounds, Vec2{5.3, 5.0}, 0.1, f.rng, f.params, f.next_id);
  EXPECT_GT(q.position.x, 5.0);
}

TEST(PedStep, RespawnsUpstreamWithNewId) {
  PedFixture f;
  f.lane.region = {{0, 7}, {20, 13}};
  Pedestrian p{1, 0, {19.95, 10}, {}};
  const auto r = ped_step(p, f.lane, f.bounds, std::nullopt, 0.1, f.rng, f.params, f.next_id);
  EXPECT_TRUE(r.respawned);
  EXPECT_EQ(p.id, 100);
  EXPECT_EQ(f.next_id, 101);
  EXPECT_LE(p.position.x, 0.5);
  EXPECT_TRUE(f.lane.region.contains(p.position));
}

TEST(PedStep, NoiseKeepsSpeed) {
  PedFixture f;
  f.params.heading_noise = 0.1;
  Pedestrian p{1, 0, {1, 10}, {}};
  for (int k = 0; k < 100; ++k) {
    ped_step(p, f.lane, f.bounds, std::nullopt, 0.1, f.rng, f.params, f.next_id);
    EXPECT_NEAR(p.velocity.norm(), 1.2, 1e-12);
  }
}

Scenario empty_scenario() {
  Scenario s;
  s.kind = ScenarioKind::single_flow;
  s.robot_start = {2.0, 3.0};
  s.robot_goal = {17.0, 15.0};
  s.seed = 1;
  return s;
}

TEST(Episode, EmptyWorldTimeMatchesDistance) {
  const Scenario s = empty_scenario();
  const double ideal = distance(s.robot_start, s.robot_goal);
  for (auto planner : {PlannerKind::fipp, PlannerKind::tr}) {
    const EpisodeLog log = run_episode(s, planner, EpisodeConfig{});
    EXPECT_EQ(log.outcome, Outcome::reached) << to_string(planner);
    const double t = log.records.back().t;
    EXPECT_NEAR(t, ideal / 1.0, 0.1 * ideal) << to_string(planner);
  }
}

TEST(Episode, Deterministic) {
  const Scenario s = generate_scenario(ScenarioKind::intersection, 35, 9);
  for (auto planner : {PlannerKind::fipp, PlannerKind::tr}) {
    std::stringstream a, b;
    write_episode_jsonl(a, run_episode(s, planner, EpisodeConfig{}));
    write_episode_jsonl(b, run_episode(s, planner, EpisodeConfig{}));
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Episode, Invariants) {
  const Scenario s = generate_scenario(ScenarioKind::double_flow, 40, 5);
  EpisodeConfig cfg;
  for (auto planner : {PlannerKind::fipp, PlannerKind::tr}) {
    const EpisodeLog log = run_episode(s, planner, cfg);
    double prev_t = -1.0;
    for (const auto& r : log.records) {
      EXPECT_GT(r.t, prev_t);
      prev_t = r.t;
      EXPECT_LE(r.robot_velocity.norm(), cfg.v_max + 1e-9);
      EXPECT_EQ(r.pedestrians.size(), 40u);
      for (const auto& p : r.pedestrians) EXPECT_LE(p.velocity.norm(), 1.0 + 1e-12);
    }
    EXPECT_TRUE(log.records.back().done);
  }
}

TEST(Episode, FippMovesWithFlowDownstream) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 40 && checked < 5; ++seed) {
    Scenario s = generate_scenario(ScenarioKind::single_flow, 30, seed);
    if (s.robot_goal.x - s.robot_start.x < 8.0) continue;
    ++checked;
    const EpisodeLog log = run_episode(s, PlannerKind::fipp, EpisodeConfig{});
    Vec2 heading;
    for (const auto& r : log.records) heading += r.robot_velocity;
    EXPECT_GT(heading.dot(s.lanes[0].direction), 0.0) << "seed " << seed;
  }
  EXPECT_GT(checked, 0);
}

TEST(Episode, WallFreezesTrOnly) {
  const Scenario s = wall_fixture(3);
  EXPECT_EQ(run_episode(s, PlannerKind::tr, EpisodeConfig{}).outcome, Outcome::frozen);
  EXPECT_EQ(run_episode(s, PlannerKind::fipp, EpisodeConfig{}).outcome, Outcome::reached);
}

TEST(Episode, Timeout) {
  Scenario s = empty_scenario();
  EpisodeConfig cfg;
  cfg.max_t = 3.0;
  const EpisodeLog log = run_episode(s, PlannerKind::tr, cfg);
  EXPECT_EQ(log.outcome, Outcome::timeout);
  EXPECT_NEAR(log.records.back().t, 3.0, 1e-9);
}

TEST(RecordCrowd, CountConservedAndSampled) {
  const Scenario s = generate_scenario(ScenarioKind::single_flow, 30, 2);
  const TrackLog log = record_crowd(s, 30.0, 0.1);
  ASSERT_EQ(log.size(), 301u);
  std::map<PedId, int> seen;
  for (const auto& f : log) {
    EXPECT_EQ(f.observations.size(), 30u);
    for (const auto& o : f.observations) ++seen[o.id];
  }
  EXPECT_GT(seen.size(), 30u);  // respawns issue fresh ids
}

}  // namespace
}  // namespace fipp
