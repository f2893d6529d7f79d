#include "fipp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "fipp/errors.hpp"
#include "fipp/io.hpp"

namespace fipp {

void CostParams::validate() const {
  if (!(lambda_flow >= 0.0) || !(step_weight >= 0.0) || !(heuristic_weight >= 0.0))
    throw std::invalid_argument("cost weights must be >= 0");
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8");
}

double flow_cost(const Vec2& action_dir, const Vec2& flow, double lambda_flow) {
  const double mag = flow.norm();
  const double dir_norm = action_dir.norm();
  if (mag < kVelocityEpsilon || dir_norm <= 0.0) return 0.0;
  const double cos_theta = std::clamp(action_dir.dot(flow) / (dir_norm * mag), -1.0, 1.0);
  return lambda_flow * mag * (1.0 - cos_theta) / 2.0;
}

EdgeCost edge_cost_parts(CellIndex from, CellIndex to, const FlowField& field,
                         const CostParams& params) {
  const auto& s = field.spec;
  const int di = s.column(to) - s.column(from);
  const int dj = s.row(to) - s.row(from);
  const int adi = std::abs(di);
  const int adj = std::abs(dj);
  const bool adjacent = params.connectivity == 4 ? (adi + adj == 1)
                                                 : (std::max(adi, adj) == 1);
  if (!adjacent || from >= s.cellCount() || to >= s.cellCount())
    throw std::invalid_argument("edge_cost: cells are not adjacent");
  const Vec2 step{static_cast<double>(di), static_cast<double>(dj)};
  const double step_cells = step.norm();
  return {params.step_weight * step_cells * s.cell_size,
          flow_cost(step / step_cells, field.cells[to].force, params.lambda_flow)};
}

double edge_cost(CellIndex from, CellIndex to, const FlowField& field, const CostParams& params) {
  return edge_cost_parts(from, to, field, params).total();
}

double heuristic(const GridSpec& spec, CellIndex cell, CellIndex goal, const CostParams& params) {
  return params.heuristic_weight * distance(spec.center(cell), spec.center(goal));
}

double canonical_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

namespace {

struct OpenEntry {
  double f;
  double h;
  CellIndex cell;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    return cell > o.cell;
  }
};

constexpr int kOffsets8[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                 {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};

}  // namespace

PlanResult plan(const FlowField& field, const Vec2& start, const Vec2& goal,
                const CostParams& params, std::span<const CellIndex> blocked) {
  params.validate();
  const auto& s = field.spec;
  CellIndex start_cell, goal_cell;
  if (!s.locate(start, start_cell)) throw OutOfBoundsError("start lies outside the grid");
  if (!s.locate(goal, goal_cell)) throw OutOfBoundsError("goal lies outside the grid");

  std::vector<std::uint8_t> is_blocked(s.cellCount(), 0);
  for (CellIndex b : blocked)
    if (b < is_blocked.size()) is_blocked[b] = 1;
  if (is_blocked[start_cell]) throw std::invalid_argument("start cell is blocked");
  if (is_blocked[goal_cell]) throw std::invalid_argument("goal cell is blocked");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr CellIndex kNone = std::numeric_limits<CellIndex>::max();
  std::vector<double> g(s.cellCount(), kInf);
  std::vector<CellIndex> parent(s.cellCount(), kNone);
  std::vector<std::uint8_t> closed(s.cellCount(), 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

  g[start_cell] = 0.0;
  const double h0 = heuristic(s, start_cell, goal_cell, params);
  open.push({h0, h0, start_cell});
  const int n_dirs = params.connectivity == 4 ? 4 : 8;

  PlanResult result;
  bool found = false;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.cell]) continue;
    closed[top.cell] = 1;
    ++result.expanded;
    if (top.cell == goal_cell) {
      found = true;
      break;
    }
    const int ci = s.column(top.cell);
    const int cj = s.row(top.cell);
    for (int k = 0; k < n_dirs; ++k) {
      const int ni = ci + kOffsets8[k][0];
      const int nj = cj + kOffsets8[k][1];
      if (ni < 0 || nj < 0 || ni >= s.width || nj >= s.height) continue;
      const CellIndex nb = s.index(ni, nj);
      if (is_blocked[nb]) continue;
      const double ng = g[top.cell] + edge_cost(top.cell, nb, field, params);
      if (ng < g[nb]) {
        // Reopening only happens with an inconsistent (over-weighted) heuristic.
        g[nb] = ng;
        parent[nb] = top.cell;
        closed[nb] = 0;
        const double hn = heuristic(s, nb, goal_cell, params);
        open.push({ng + hn, hn, nb});
      }
    }
  }
  if (!found) throw NoPathError();

  for (CellIndex c = goal_cell; c != kNone; c = parent[c]) result.path.push_back(c);
  std::reverse(result.path.begin(), result.path.end());
  for (CellIndex c : result.path) result.waypoints.push_back(s.center(c));
  for (std::size_t k = 1; k < result.path.size(); ++k) {
    const EdgeCost e = edge_cost_parts(result.path[k - 1], result.path[k], field, params);
    result.edge_cost_T.push_back(e.traversal);
    result.edge_cost_F.push_back(e.flow);
  }
  result.cost_T = canonical_sum(result.edge_cost_T);
  result.cost_F = canonical_sum(result.edge_cost_F);
  result.cost_total = result.cost_T + result.cost_F;
  return result;
}

void write_plan(std::ostream& out, const FlowField& field, const PlanResult& r) {
  const auto& s = field.spec;
  out << "# i,j,cx,cy,edge_cost_T,edge_cost_F\n";
  for (std::size_t k = 0; k < r.path.size(); ++k) {
    const CellIndex c = r.path[k];
    const Vec2 center = s.center(c);
    const double et = k == 0 ? 0.0 : r.edge_cost_T[k - 1];
    const double ef = k == 0 ? 0.0 : r.edge_cost_F[k - 1];
    out << s.column(c) << ',' << s.row(c) << ',' << format_double(center.x) << ','
        << format_double(center.y) << ',' << format_double(et) << ',' << format_double(ef)
        << '\n';
  }
  out << "# summary C_T=" << format_double(r.cost_T) << " C_F=" << format_double(r.cost_F)
      << " C_phi=" << format_double(r.cost_total) << " expanded=" << r.expanded << '\n';
}

Replanner::Replanner(CostParams params, std::size_t period, double arrive_tol)
    : params_(params), period_(std::max<std::size_t>(period, 1)), arrive_tol_(arrive_tol) {
  params_.validate();
}

void Replanner::reset() {
  waypoints_.clear();
  cells_.clear();
  cursor_ = 0;
  since_plan_ = 0;
  have_plan_ = false;
}

void Replanner::replan(const FlowField& field, const Vec2& robot_pos, const Vec2& goal,
                       std::span<const CellIndex> blocked) {
  PlanResult r = plan(field, robot_pos, goal, params_, blocked);
  waypoints_ = std::move(r.waypoints);
  cells_ = std::move(r.path);
  waypoints_.back() = goal;
  // The robot already occupies the first cell.
  cursor_ = waypoints_.size() > 1 ? 1 : 0;
  since_plan_ = 0;
  have_plan_ = true;
  ++replans_;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

}  // namespace

void Replanner::advance(const Vec2& robot_pos) {
  // Skip waypoints the robot has reached or already moved past along the path.
  while (cursor_ < waypoints_.size()) {
    if (distance(robot_pos, waypoints_[cursor_]) <= arrive_tol_) {
      ++cursor_;
    } else if (cursor_ + 1 < waypoints_.size() &&
               point_segment_distance(robot_pos, waypoints_[cursor_],
                                      waypoints_[cursor_ + 1]) <= arrive_tol_) {
      ++cursor_;
    } else {
      break;
    }
  }
}

Vec2 Replanner::next(const FlowField& field, const Vec2& robot_pos, const Vec2& goal,
                     std::span<const CellIndex> blocked) {
  if (distance(robot_pos, goal) <= arrive_tol_) {
    waypoints_.clear();
    cells_.clear();
    cursor_ = 0;
    return goal;
  }
  if (have_plan_) advance(robot_pos);

  bool need = !have_plan_ || since_plan_ >= period_ || cursor_ >= waypoints_.size();
  if (!need && !blocked.empty())
    need = std::find(blocked.begin(), blocked.end(), cells_[cursor_]) != blocked.end();
  if (need) {
    replan(field, robot_pos, goal, blocked);
    advance(robot_pos);
    cursor_ = std::min(cursor_, waypoints_.size() - 1);
  }
  ++since_plan_;
  return waypoints_[cursor_];
}

std::vector<Vec2> Replanner::remaining() const {
  if (cursor_ >= waypoints_.size()) return {};
  return {waypoints_.begin() + static_cast<std::ptrdiff_t>(cursor_), waypoints_.end()};
}

}  // namespace fipp
