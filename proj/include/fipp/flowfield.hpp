#pragma once

// Crowd flow field on a regular 2D mesh grid.
//
// Pedestrian observations are deposited into their nearest cell, where they
// update an exponentially smoothed velocity estimate. update_field() then
// evaluates the Active-Langevin force (friction + self-propelling +
// influence, random term fixed to zero) at every cell. The result can be
// sampled bilinearly and used to advect test particles.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fipp/vec2.hpp"

namespace fipp {

using PedId = std::int64_t;
using CellIndex = std::size_t;

struct PedObservation {
  PedId id = 0;
  Vec2 position;
  Vec2 velocity;
};

struct TrackFrame {
  double t = 0.0;
  std::vector<PedObservation> observations;
};

using TrackLog = std::vector<TrackFrame>;

// Axis-aligned grid. `origin` is the lower-left corner of cell (0, 0); cell
// (i, j) spans [origin.x + i*cell_size, origin.x + (i+1)*cell_size) in x and
// likewise in y. Cells are stored row-major: index = j * width + i.
struct GridSpec {
  Vec2 origin;
  double cell_size = 0.5;
  int width = 1;
  int height = 1;

  std::size_t cellCount() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  CellIndex index(int i, int j) const {
    return static_cast<CellIndex>(j) * static_cast<CellIndex>(width) +
           static_cast<CellIndex>(i);
  }
  int column(CellIndex c) const { return static_cast<int>(c % width); }
  int row(CellIndex c) const { return static_cast<int>(c / width); }
  Vec2 center(int i, int j) const {
    return {origin.x + (i + 0.5) * cell_size, origin.y + (j + 0.5) * cell_size};
  }
  Vec2 center(CellIndex c) const { return center(column(c), row(c)); }
  bool contains(const Vec2& p) const;
  // Cell containing p, or false when p lies outside the grid.
  bool locate(const Vec2& p, CellIndex& out) const;
  Vec2 upperCorner() const {
    return {origin.x + width * cell_size, origin.y + height * cell_size};
  }

  // Throws std::invalid_argument on a degenerate grid.
  void validate() const;
};

enum class RelVelocityMode { mean, sum };
enum class InfluenceSign { toward_neighbors, as_written };

struct FlowParams {
  double xi = 0.5;    // self-propelling coefficient
  double h = 1.0;     // influence radius [m]
  RelVelocityMode rel_velocity_mode = RelVelocityMode::mean;
  InfluenceSign influence_sign = InfluenceSign::toward_neighbors;
  double ema_decay = 0.3;  // weight of the new observation per frame
  // Pedestrians are assumed free of random forcing.
  static constexpr Vec2 f_random{0.0, 0.0};

  void validate() const;
};

struct FlowCell {
  Vec2 velocity;
  Vec2 force;
  int occupancy = 0;
  double mu = 0.0;
};

struct FlowField {
  GridSpec spec;
  std::vector<FlowCell> cells;
  std::size_t frame_count = 0;
  // Mean pedestrian velocity of the most recently deposited frame.
  Vec2 frame_avg_velocity;
  double last_t = 0.0;

  FlowField() = default;
  explicit FlowField(const GridSpec& spec);

  FlowCell& at(int i, int j) { return cells[spec.index(i, j)]; }
  const FlowCell& at(int i, int j) const { return cells[spec.index(i, j)]; }
};

constexpr double kVelocityEpsilon = 1e-9;

// Crowd friction coefficient at `origin` given its neighbours' positions:
// mu = 1 - sum|x_i - x_j| / (n * max|x_i - x_j|). Zero for an empty or
// fully coincident neighbourhood.
double neighbor_friction(const Vec2& origin, std::span<const Vec2> neighbor_positions);
// Same quantity from precomputed neighbour distances.
double friction_from_distances(std::span<const double> distances);

Vec2 average_velocity(const TrackFrame& frame);

struct Neighbor {
  Vec2 position;
  Vec2 velocity;
};

Vec2 relative_velocity(const Vec2& cell_center, std::span<const Neighbor> neighbors,
                       double h, RelVelocityMode mode);

// alpha = |v_rel| / |v_avg|, 0 when the crowd is at rest.
double interaction_coefficient(const Vec2& v_rel, const Vec2& v_avg);

Vec2 active_langevin_force(const Vec2& v_i, const Vec2& v_rel, double mu, double alpha,
                           const FlowParams& params);

struct DepositStats {
  std::size_t deposited = 0;
  std::size_t out_of_bounds = 0;
};

// Blends a frame's observations into the grid. Throws std::invalid_argument
// if the frame time does not advance past the previous frame.
DepositStats deposit_frame(FlowField& field, const TrackFrame& frame, const FlowParams& params);

// Recomputes mu and the Active-Langevin force of every cell. The OpenMP
// kernel and the serial reference produce bit-identical fields.
void update_field(FlowField& field, const FlowParams& params);
void update_field_serial(FlowField& field, const FlowParams& params);

// Cell offsets (di, dj) whose centres lie within h of a cell centre, the
// cell itself excluded. Shared by both update kernels.
struct StencilEntry {
  int di;
  int dj;
  double distance;
};
std::vector<StencilEntry> influence_stencil(const GridSpec& spec, double h);

Vec2 sample_flow(const FlowField& field, const Vec2& p);

using Trajectory = std::vector<Vec2>;

Trajectory advect(const FlowField& field, const Vec2& start, double dt, std::size_t steps,
                  double speed_scale);

// Mean pointwise distance. Equal-length trajectories are compared index by
// index; otherwise both are resampled by arc length to the shorter point
// count. Throws std::invalid_argument on an empty input.
double trajectory_deviation(const Trajectory& predicted, const Trajectory& actual);

// Replays a whole track log: deposit + update per frame.
FlowField extract_field(const GridSpec& spec, const TrackLog& log, const FlowParams& params,
                        std::size_t* out_of_bounds = nullptr);

}  // namespace fipp
