#include <cmath>
#include <vector>

#include "fipp/flowfield.hpp"

namespace fipp {

std::vector<StencilEntry> influence_stencil(const GridSpec& spec, double h) {
  std::vector<StencilEntry> out;
  const int reach = static_cast<int>(std::ceil(h / spec.cell_size));
  // Distances are exact multiples of cell_size apart from hypot rounding.
  const double limit = h * (1.0 + 1e-12);
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      if (di == 0 && dj == 0) continue;
      const double d = std::hypot(di * spec.cell_size, dj * spec.cell_size);
      if (d <= limit) out.push_back({di, dj, d});
    }
  }
  return out;
}

namespace {

struct CellResult {
  double mu;
  Vec2 force;
};

CellResult compute_cell(const FlowField& field, const std::vector<StencilEntry>& stencil,
                        int i, int j, const FlowParams& params, std::vector<double>& scratch) {
  const auto& s = field.spec;
  scratch.clear();
  Vec2 vel_sum;
  std::size_t vel_count = 0;
  for (const auto& e : stencil) {
    const int ni = i + e.di;
    const int nj = j + e.dj;
    if (ni < 0 || nj < 0 || ni >= s.width || nj >= s.height) continue;
    const FlowCell& nb = field.at(ni, nj);
    if (nb.occupancy > 0) scratch.push_back(e.distance);
    // Cells that never saw a pedestrian carry no velocity information.
    if (nb.velocity.squaredNorm() > 0.0) {
      vel_sum += nb.velocity;
      ++vel_count;
    }
  }
  const double mu = friction_from_distances(scratch);
  Vec2 v_rel;
  if (vel_count > 0) {
    v_rel = params.rel_velocity_mode == RelVelocityMode::sum
                ? vel_sum
                : vel_sum / static_cast<double>(vel_count);
  }
  const double alpha = interaction_coefficient(v_rel, field.frame_avg_velocity);
  return {mu, active_langevin_force(field.at(i, j).velocity, v_rel, mu, alpha, params)};
}

}  // namespace

void update_field_serial(FlowField& field, const FlowParams& params) {
  params.validate();
  const auto stencil = influence_stencil(field.spec, params.h);
  std::vector<CellResult> results(field.cells.size());
  std::vector<double> scratch;
  for (int j = 0; j < field.spec.height; ++j)
    for (int i = 0; i < field.spec.width; ++i)
      results[field.spec.index(i, j)] = compute_cell(field, stencil, i, j, params, scratch);
  for (std::size_t c = 0; c < results.size(); ++c) {
    field.cells[c].mu = results[c].mu;
    field.cells[c].force = results[c].force;
  }
}

void update_field(FlowField& field, const FlowParams& params) {
  params.validate();
  const auto stencil = influence_stencil(field.spec, params.h);
  const int width = field.spec.width;
  const long long n = static_cast<long long>(field.cells.size());
  std::vector<CellResult> results(field.cells.size());
  const FlowField& snapshot = field;

#pragma omp parallel
  {
    std::vector<double> scratch;
    scratch.reserve(stencil.size());
#pragma omp for schedule(static)
    for (long long c = 0; c < n; ++c) {
      const int i = static_cast<int>(c % width);
      const int j = static_cast<int>(c / width);
      results[c] = compute_cell(snapshot, stencil, i, j, params, scratch);
    }
  }

  for (std::size_t c = 0; c < results.size(); ++c) {
    field.cells[c].mu = results[c].mu;
    field.cells[c].force = results[c].force;
  }
}

}  // namespace fipp
