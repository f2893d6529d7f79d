#include "fipp/flowfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fipp {

bool GridSpec::contains(const Vec2& p) const {
  CellIndex unused;
  return locate(p, unused);
}

bool GridSpec::locate(const Vec2& p, CellIndex& out) const {
  if (!p.finite()) return false;
  const double u = (p.x - origin.x) / cell_size;
  const double v = (p.y - origin.y) / cell_size;
  if (u < 0.0 || v < 0.0 || u >= width || v >= height) return false;
  const int i = std::min(static_cast<int>(std::floor(u)), width - 1);
  const int j = std::min(static_cast<int>(std::floor(v)), height - 1);
  out = index(i, j);
  return true;
}

void GridSpec::validate() const {
  if (width < 1 || height < 1)
    throw std::invalid_argument("grid width and height must be >= 1");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size))
    throw std::invalid_argument("grid cell_size must be > 0");
  if (!origin.finite()) throw std::invalid_argument("grid origin must be finite");
}

void FlowParams::validate() const {
  if (!(xi >= 0.0)) throw std::invalid_argument("xi must be >= 0");
  if (!(h > 0.0)) throw std::invalid_argument("influence radius h must be > 0");
  if (!(ema_decay >= 0.0 && ema_decay <= 1.0))
    throw std::invalid_argument("ema_decay must lie in [0, 1]");
}

FlowField::FlowField(const GridSpec& s) : spec(s) {
  spec.validate();
  cells.resize(spec.cellCount());
}

double friction_from_distances(std::span<const double> distances) {
  if (distances.empty()) return 0.0;
  double sum = 0.0;
  double max_d = 0.0;
  for (double d : distances) {
    sum += d;
    max_d = std::max(max_d, d);
  }
  if (max_d <= 0.0) return 0.0;
  const double mu = 1.0 - sum / (static_cast<double>(distances.size()) * max_d);
  // Rounding can push the equidistant case a hair below zero.
  return std::max(0.0, mu);
}

double neighbor_friction(const Vec2& origin, std::span<const Vec2> neighbor_positions) {
  std::vector<double> d;
  d.reserve(neighbor_positions.size());
  for (const auto& p : neighbor_positions) d.push_back(distance(origin, p));
  return friction_from_distances(d);
}

Vec2 average_velocity(const TrackFrame& frame) {
  if (frame.observations.empty()) return {};
  Vec2 sum;
  for (const auto& o : frame.observations) sum += o.velocity;
  return sum / static_cast<double>(frame.observations.size());
}

Vec2 relative_velocity(const Vec2& cell_center, std::span<const Neighbor> neighbors, double h,
                       RelVelocityMode mode) {
  if (!(h > 0.0)) throw std::invalid_argument("influence radius h must be > 0");
  Vec2 sum;
  std::size_t n = 0;
  for (const auto& nb : neighbors) {
    if (distance(nb.position, cell_center) <= h) {
      sum += nb.velocity;
      ++n;
    }
  }
  if (n == 0) return {};
  return mode == RelVelocityMode::sum ? sum : sum / static_cast<double>(n);
}

double interaction_coefficient(const Vec2& v_rel, const Vec2& v_avg) {
  const double avg = v_avg.norm();
  if (avg < kVelocityEpsilon) return 0.0;
  return v_rel.norm() / avg;
}

Vec2 active_langevin_force(const Vec2& v_i, const Vec2& v_rel, double mu, double alpha,
                           const FlowParams& params) {
  const Vec2 friction = -mu * v_i;
  const Vec2 influence = params.influence_sign == InfluenceSign::as_written
                             ? alpha * (v_i - v_rel)
                             : alpha * (v_rel - v_i);
  const Vec2 self_propelling = params.xi * v_i;
  return friction + (influence + self_propelling) + FlowParams::f_random;
}

DepositStats deposit_frame(FlowField& field, const TrackFrame& frame, const FlowParams& params) {
  params.validate();
  if (field.frame_count > 0 && !(frame.t > field.last_t))
    throw std::invalid_argument("track frame time " + std::to_string(frame.t) +
                                " does not advance past " + std::to_string(field.last_t));
  if (frame.t < 0.0) throw std::invalid_argument("track frame time must be nonnegative");

  // Canonical order so the field does not depend on observation order.
  TrackFrame sorted = frame;
  std::sort(sorted.observations.begin(), sorted.observations.end(),
            [](const PedObservation& a, const PedObservation& b) { return a.id < b.id; });

  for (auto& c : field.cells) c.occupancy = 0;

  std::vector<Vec2> sums(field.cells.size());
  DepositStats stats;
  for (const auto& o : sorted.observations) {
    CellIndex c;
    if (!field.spec.locate(o.position, c)) {
      ++stats.out_of_bounds;
      continue;
    }
    sums[c] += o.velocity;
    ++field.cells[c].occupancy;
    ++stats.deposited;
  }

  const double a = params.ema_decay;
  for (std::size_t c = 0; c < field.cells.size(); ++c) {
    auto& cell = field.cells[c];
    if (cell.occupancy == 0) continue;
    const Vec2 observed = sums[c] / static_cast<double>(cell.occupancy);
    cell.velocity = (1.0 - a) * cell.velocity + a * observed;
  }

  field.frame_avg_velocity = average_velocity(sorted);
  field.last_t = frame.t;
  ++field.frame_count;
  return stats;
}

Vec2 sample_flow(const FlowField& field, const Vec2& p) {
  const auto& s = field.spec;
  // Continuous index with cell centres at integers.
  double u = (p.x - s.origin.x) / s.cell_size - 0.5;
  double v = (p.y - s.origin.y) / s.cell_size - 0.5;
  u = std::clamp(u, 0.0, static_cast<double>(s.width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(s.height - 1));
  const int i0 = static_cast<int>(std::floor(u));
  const int j0 = static_cast<int>(std::floor(v));
  const int i1 = std::min(i0 + 1, s.width - 1);
  const int j1 = std::min(j0 + 1, s.height - 1);
  const double fu = u - i0;
  const double fv = v - j0;

  const Vec2& f00 = field.at(i0, j0).force;
  const Vec2& f10 = field.at(i1, j0).force;
  const Vec2& f01 = field.at(i0, j1).force;
  const Vec2& f11 = field.at(i1, j1).force;
  const Vec2 bottom = (1.0 - fu) * f00 + fu * f10;
  const Vec2 top = (1.0 - fu) * f01 + fu * f11;
  return (1.0 - fv) * bottom + fv * top;
}

Trajectory advect(const FlowField& field, const Vec2& start, double dt, std::size_t steps,
                  double speed_scale) {
  if (!(dt > 0.0)) throw std::invalid_argument("advect: dt must be > 0");
  Trajectory traj;
  traj.reserve(steps + 1);
  traj.push_back(start);
  Vec2 p = start;
  for (std::size_t k = 0; k < steps; ++k) {
    p += dt * speed_scale * sample_flow(field, p);
    traj.push_back(p);
  }
  return traj;
}

namespace {

Trajectory resample_by_arc_length(const Trajectory& t, std::size_t n) {
  if (n == 1 || t.size() == 1) return Trajectory(n, t.front());
  std::vector<double> s(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) s[k] = s[k - 1] + distance(t[k - 1], t[k]);
  const double total = s.back();
  Trajectory out;
  out.reserve(n);
  std::size_t seg = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg < t.size() - 1 && s[seg] < target) ++seg;
    const double len = s[seg] - s[seg - 1];
    const double w = len > 0.0 ? std::clamp((target - s[seg - 1]) / len, 0.0, 1.0) : 0.0;
    out.push_back((1.0 - w) * t[seg - 1] + w * t[seg]);
  }
  return out;
}

}  // namespace

double trajectory_deviation(const Trajectory& predicted, const Trajectory& actual) {
  if (predicted.empty() || actual.empty())
    throw std::invalid_argument("trajectory_deviation: empty trajectory");
  const Trajectory* a = &predicted;
  const Trajectory* b = &actual;
  Trajectory ra, rb;
  if (predicted.size() != actual.size()) {
    const std::size_t n = std::min(predicted.size(), actual.size());
    ra = resample_by_arc_length(predicted, n);
    rb = resample_by_arc_length(actual, n);
    a = &ra;
    b = &rb;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a->size(); ++k) sum += distance((*a)[k], (*b)[k]);
  return sum / static_cast<double>(a->size());
}

FlowField extract_field(const GridSpec& spec, const TrackLog& log, const FlowParams& params,
                        std::size_t* out_of_bounds) {
  FlowField field(spec);
  std::size_t oob = 0;
  for (const auto& frame : log) oob += deposit_frame(field, frame, params).out_of_bounds;
  // Forces depend only on the current cell state, so one update at the end
  // equals updating after every frame.
  update_field(field, params);
  if (out_of_bounds) *out_of_bounds = oob;
  return field;
}

}  // namespace fipp
