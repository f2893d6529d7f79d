#include "fipp/flowfield.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracles.hpp"

namespace fipp {
namespace {

GridSpec grid(int w, int h, double cell = 0.5) {
  GridSpec g;
  g.cell_size = cell;
  g.width = w;
  g.height = h;
  return g;
}

TEST(Friction, HandValues) {
  const Vec2 nb[] = {{1, 0}, {2, 0}};
  EXPECT_DOUBLE_EQ(neighbor_friction({0, 0}, nb), 0.25);
  const Vec2 single[] = {{3.7, 0}};
  EXPECT_EQ(neighbor_friction({0, 0}, single), 0.0);
  const Vec2 ring[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  EXPECT_EQ(neighbor_friction({0, 0}, ring), 0.0);
  EXPECT_EQ(neighbor_friction({0, 0}, {}), 0.0);
  const Vec2 coincident[] = {{0, 0}, {0, 0}};
  EXPECT_EQ(neighbor_friction({0, 0}, coincident), 0.0);
}

TEST(Friction, StaysInUnitInterval) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> count(1, 30);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Vec2> nb(count(rng));
    for (auto& p : nb) p = {u(rng), u(rng)};
    const double mu = neighbor_friction({u(rng), u(rng)}, nb);
    EXPECT_GE(mu, 0.0);
    EXPECT_LT(mu, 1.0);
  }
}

TEST(AverageVelocity, Means) {
  TrackFrame f;
  EXPECT_EQ(average_velocity(f), (Vec2{0, 0}));
  f.observations = {{1, {}, {1, 0}}, {2, {}, {0, 1}}, {3, {}, {2, -1}}};
  const Vec2 avg = average_velocity(f);
  EXPECT_DOUBLE_EQ(avg.x, 1.0);
  EXPECT_DOUBLE_EQ(avg.y, 0.0);
  f.observations = {{1, {}, {1, 0}}, {2, {}, {-1, 0}}};
  EXPECT_EQ(average_velocity(f), (Vec2{0, 0}));
}

TEST(RelativeVelocity, RadiusAndModes) {
  const Neighbor far_and_near[] = {{{1, 0}, {1, 0}}, {{3, 0}, {5, 5}}};
  EXPECT_EQ(relative_velocity({0, 0}, far_and_near, 2.0, RelVelocityMode::mean), (Vec2{1, 0}));
  const Neighbor pair[] = {{{1, 0}, {1, 0}}, {{0, 1}, {1, 0}}};
  EXPECT_EQ(relative_velocity({0, 0}, pair, 2.0, RelVelocityMode::sum), (Vec2{2, 0}));
  EXPECT_EQ(relative_velocity({0, 0}, pair, 2.0, RelVelocityMode::mean), (Vec2{1, 0}));
  EXPECT_EQ(relative_velocity({0, 0}, far_and_near, 0.5, RelVelocityMode::mean), (Vec2{0, 0}));
  EXPECT_THROW(relative_velocity({0, 0}, pair, 0.0, RelVelocityMode::mean), std::invalid_argument);
}

TEST(InteractionCoefficient, Ratio) {
  EXPECT_DOUBLE_EQ(interaction_coefficient({1, 0}, {2, 0}), 0.5);
  EXPECT_DOUBLE_EQ(interaction_coefficient({0.3, 0.4}, {0, 0.5}), 1.0);
  EXPECT_EQ(interaction_coefficient({1, 0}, {0, 0}), 0.0);
}

TEST(ActiveLangevin, HandValues) {
  FlowParams p;
  EXPECT_EQ(active_langevin_force({0, 0}, {0, 0}, 0.3, 2.0, p), (Vec2{0, 0}));
  for (auto sign : {InfluenceSign::toward_neighbors, InfluenceSign::as_written}) {
    p.influence_sign = sign;
    const Vec2 f = active_langevin_force({1.2, -0.4}, {1.2, -0.4}, 0.0, 0.8, p);
    EXPECT_DOUBLE_EQ(f.x, 0.6);
    EXPECT_DOUBLE_EQ(f.y, -0.2);
  }
  p.influence_sign = InfluenceSign::toward_neighbors;
  EXPECT_EQ(active_langevin_force({0, 0}, {1, 0}, 0.0, 1.0, p), (Vec2{1, 0}));
  p.influence_sign = InfluenceSign::as_written;
  EXPECT_EQ(active_langevin_force({0, 0}, {1, 0}, 0.0, 1.0, p), (Vec2{-1, 0}));
}

TEST(ActiveLangevin, HomogeneousOfDegreeOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3), c(0.01, 10), m(0, 0.99);
  FlowParams p;
  for (int k = 0; k < 500; ++k) {
    const Vec2 vi{u(rng), u(rng)}, vr{u(rng), u(rng)};
    const double mu = m(rng), a = c(rng), s = c(rng);
    p.influence_sign = k % 2 ? InfluenceSign::as_written : InfluenceSign::toward_neighbors;
    const Vec2 lhs = active_langevin_force(s * vi, s * vr, mu, a, p);
    const Vec2 rhs = s * active_langevin_force(vi, vr, mu, a, p);
    EXPECT_NEAR(lhs.x, rhs.x, 1e-12 * (1 + std::abs(rhs.x)));
    EXPECT_NEAR(lhs.y, rhs.y, 1e-12 * (1 + std::abs(rhs.y)));
  }
}

TEST(Deposit, EmaAndAveraging) {
  FlowParams p;
  p.ema_decay = 1.0;
  FlowField f(grid(4, 4));
  DepositStats st = deposit_frame(f, {0.0, {{1, f.spec.center(1, 1), {1, 0}}}}, p);
  EXPECT_EQ(st.deposited, 1u);
  EXPECT_EQ(f.at(1, 1).velocity, (Vec2{1, 0}));

  FlowField g(grid(4, 4));
  deposit_frame(g, {0.0, {{1, {0.6, 0.6}, {1, 0}}, {2, {0.9, 0.7}, {0, 1}}}}, p);
  EXPECT_EQ(g.at(1, 1).velocity, (Vec2{0.5, 0.5}));
  EXPECT_EQ(g.at(1, 1).occupancy, 2);

  p.ema_decay = 0.3;
  FlowField e(grid(4, 4));
  deposit_frame(e, {0.0, {{1, {0.6, 0.6}, {1, 0}}}}, p);
  deposit_frame(e, {0.1, {{1, {0.6, 0.6}, {1, 0}}}}, p);
  EXPECT_DOUBLE_EQ(e.at(1, 1).velocity.x, 0.3 + 0.7 * 0.3);
}

TEST(Deposit, OutOfBoundsDropped) {
  FlowParams p;
  FlowField f(grid(4, 4));
  const auto before = f.cells;
  const DepositStats st = deposit_frame(f, {0.0, {{1, {5.0, 1.0}, {1, 0}}}}, p);
  EXPECT_EQ(st.out_of_bounds, 1u);
  EXPECT_EQ(st.deposited, 0u);
  for (std::size_t c = 0; c < f.cells.size(); ++c) EXPECT_EQ(f.cells[c].velocity, before[c].velocity);
}

TEST(Deposit, TimeMustAdvance) {
  FlowParams p;
  FlowField f(grid(2, 2));
  deposit_frame(f, {1.0, {}}, p);
  EXPECT_THROW(deposit_frame(f, {1.0, {}}, p), std::invalid_argument);
  EXPECT_THROW(deposit_frame(f, {0.5, {}}, p), std::invalid_argument);
}

TEST(Deposit, ObservationOrderDoesNotMatter) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 5), w(-1.5, 1.5);
  TrackFrame frame{0.0, {}};
  for (int k = 0; k < 200; ++k) frame.observations.push_back({k, {u(rng), u(rng)}, {w(rng), w(rng)}});
  TrackFrame shuffled = frame;
  std::shuffle(shuffled.observations.begin(), shuffled.observations.end(), rng);
  FlowParams p;
  p.h = 1.0;
  FlowField a(grid(10, 10)), b(grid(10, 10));
  deposit_frame(a, frame, p);
  deposit_frame(b, shuffled, p);
  update_field(a, p);
  update_field(b, p);
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    EXPECT_EQ(a.cells[c].velocity, b.cells[c].velocity);
    EXPECT_EQ(a.cells[c].force, b.cells[c].force);
  }
  EXPECT_EQ(a.frame_avg_velocity, b.frame_avg_velocity);
}

TEST(UpdateField, AllZeroStaysZero) {
  FlowParams p;
  FlowField f(grid(6, 6));
  deposit_frame(f, {0.0, {}}, p);
  update_field(f, p);
  for (const auto& c : f.cells) EXPECT_EQ(c.force, (Vec2{0, 0}));
}

TEST(UpdateField, IsolatedPedestrian) {
  FlowParams p;
  p.ema_decay = 1.0;
  p.h = 1.0;
  p.influence_sign = InfluenceSign::as_written;
  FlowField f(grid(10, 10));
  deposit_frame(f, {0.0, {{1, f.spec.center(5, 5), {1, 0}}}}, p);
  update_field(f, p);
  EXPECT_EQ(f.at(5, 5).mu, 0.0);
  EXPECT_DOUBLE_EQ(f.at(5, 5).force.x, 0.5);
  EXPECT_DOUBLE_EQ(f.at(5, 5).force.y, 0.0);
}

TEST(UpdateField, UniformLaneGivesSelfPropellingForce) {
  for (auto sign : {InfluenceSign::toward_neighbors, InfluenceSign::as_written}) {
    FlowParams p;
    p.ema_decay = 1.0;
    p.h = 0.5;  // one cell: occupied neighbours are equidistant
    p.influence_sign = sign;
    FlowField f(grid(12, 5));
    TrackFrame frame{0.0, {}};
    for (int i = 0; i < 12; ++i) frame.observations.push_back({i, f.spec.center(i, 2), {1, 0}});
    deposit_frame(f, frame, p);
    update_field(f, p);
    for (int i = 1; i < 11; ++i) {
      EXPECT_EQ(f.at(i, 2).mu, 0.0);
      EXPECT_DOUBLE_EQ(f.at(i, 2).force.x, 0.5) << i;
      EXPECT_DOUBLE_EQ(f.at(i, 2).force.y, 0.0) << i;
    }
  }
}

TEST(UpdateField, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 6), w(-1.5, 1.5), hh(0.3, 1.7);
  for (int trial = 0; trial < 20; ++trial) {
    FlowParams p;
    p.h = hh(rng);
    p.ema_decay = 0.5;
    p.rel_velocity_mode = trial % 2 ? RelVelocityMode::sum : RelVelocityMode::mean;
    p.influence_sign = trial % 3 ? InfluenceSign::toward_neighbors : InfluenceSign::as_written;
    FlowField f(grid(12, 12));
    for (int k = 0; k < 3; ++k) {
      TrackFrame frame{0.1 * k, {}};
      for (int n = 0; n < 40; ++n) frame.observations.push_back({n, {u(rng), u(rng)}, {w(rng), w(rng)}});
      deposit_frame(f, frame, p);
    }
    update_field(f, p);
    const auto ref = oracle::update_field(f, p);
    for (std::size_t c = 0; c < f.cells.size(); ++c) {
      EXPECT_NEAR(f.cells[c].mu, ref[c].mu, 1e-12);
      const double scale = 1e-9 * std::max(1.0, oracle::len(ref[c].force));
      EXPECT_NEAR(f.cells[c].force.x, ref[c].force.x, scale);
      EXPECT_NEAR(f.cells[c].force.y, ref[c].force.y, scale);
    }
  }
}

TEST(UpdateField, ParallelMatchesSerialBitForBit) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 20), w(-1.5, 1.5);
  FlowParams p;
  FlowField a(grid(40, 40));
  for (int k = 0; k < 5; ++k) {
    TrackFrame frame{0.1 * k, {}};
    for (int n = 0; n < 300; ++n) frame.observations.push_back({n, {u(rng), u(rng)}, {w(rng), w(rng)}});
    deposit_frame(a, frame, p);
  }
  FlowField b = a;
  update_field(a, p);
  update_field_serial(b, p);
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    EXPECT_EQ(a.cells[c].force, b.cells[c].force);
    EXPECT_EQ(a.cells[c].mu, b.cells[c].mu);
  }
}

TEST(Stencil, ExcludesSelfAndRespectsRadius) {
  const auto s = influence_stencil(grid(5, 5), 1.0);
  EXPECT_EQ(s.size(), 12u);  // 4 at 0.5, 4 at 0.707, 4 at 1.0
  for (const auto& e : s) {
    EXPECT_FALSE(e.di == 0 && e.dj == 0);
    EXPECT_LE(e.distance, 1.0 + 1e-12);
  }
}

TEST(SampleFlow, CentresAndMidpoints) {
  FlowField f(grid(3, 3));
  f.at(0, 0).force = {1, 0};
  EXPECT_EQ(sample_flow(f, f.spec.center(0, 0)), (Vec2{1, 0}));
  const Vec2 mid = 0.5 * (f.spec.center(0, 0) + f.spec.center(1, 0));
  EXPECT_EQ(sample_flow(f, mid), (Vec2{0.5, 0}));
  EXPECT_EQ(sample_flow(f, {-4.0, -4.0}), (Vec2{1, 0}));
}

TEST(Advect, UniformFieldClosedForm) {
  FlowField f(grid(10, 10));
  for (auto& c : f.cells) c.force = {1, 0};
  const Trajectory t = advect(f, {0, 0}, 0.1, 10, 1.0);
  ASSERT_EQ(t.size(), 11u);
  EXPECT_NEAR(t.back().x, 1.0, 1e-12);
  EXPECT_EQ(t.back().y, 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 200; ++k) {
    const Vec2 force{u(rng), u(rng)};
    for (auto& c : f.cells) c.force = force;
    const Vec2 p0{u(rng) + 2.5, u(rng) + 2.5};
    const double dt = 0.05, scale = 2.0;
    const std::size_t steps = 50;
    const Trajectory tr = advect(f, p0, dt, steps, scale);
    const Vec2 expect = p0 + (steps * dt * scale) * force;
    EXPECT_NEAR(tr.back().x, expect.x, 1e-9);
    EXPECT_NEAR(tr.back().y, expect.y, 1e-9);
  }
}

TEST(Deviation, IndexAndArcLength) {
  const Trajectory a{{0, 0}, {1, 0}, {2, 0}};
  const Trajectory b{{0, 1}, {1, 1}, {2, 1}};
  EXPECT_DOUBLE_EQ(trajectory_deviation(a, b), 1.0);
  EXPECT_EQ(trajectory_deviation(a, a), 0.0);
  const Trajectory dense{{0, 0}, {0.5, 0}, {1, 0}, {1.5, 0}, {2, 0}};
  EXPECT_NEAR(trajectory_deviation(dense, a), 0.0, 1e-15);
  EXPECT_THROW(trajectory_deviation({}, a), std::invalid_argument);
}

TEST(Extract, SingleLaneForcesFollowLane) {
  FlowParams p;
  TrackLog log;
  for (int k = 0; k < 50; ++k) {
    TrackFrame fr{0.1 * k, {}};
    for (int n = 0; n < 8; ++n) fr.observations.push_back({n, {0.3 + 0.1 * k + 0.6 * n, 2.2}, {1, 0}});
    log.push_back(fr);
  }
  const FlowField f = extract_field(grid(20, 10), log, p);
  for (const auto& c : f.cells)
    if (c.occupancy > 0) EXPECT_GT(c.force.x, 0.0);
}

}  // namespace
}  // namespace fipp
