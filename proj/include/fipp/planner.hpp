#pragma once

// Flow-informed A* on the flow-field grid.
//
// Each action pays a traversal term (step_weight * step length, accumulated
// as g), a flow term penalising motion against the local crowd force, and is
// guided by a goal-distance heuristic. The path minimises C_T + C_F.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fipp/flowfield.hpp"

namespace fipp {

struct CostParams {
  double lambda_flow = 2.0;
  double step_weight = 1.0;
  double heuristic_weight = 1.0;
  int connectivity = 8;  // 4 or 8

  void validate() const;
};

struct PlanResult {
  std::vector<CellIndex> path;
  std::vector<Vec2> waypoints;  // cell centres along the path
  std::vector<double> edge_cost_T;
  std::vector<double> edge_cost_F;
  double cost_T = 0.0;
  double cost_F = 0.0;
  double cost_total = 0.0;
  std::size_t expanded = 0;
};

// lambda * |flow| * (1 - cos theta) / 2; zero for negligible flow.
double flow_cost(const Vec2& action_dir, const Vec2& flow, double lambda_flow);

struct EdgeCost {
  double traversal;
  double flow;
  double total() const { return traversal + flow; }
};

// Throws std::invalid_argument when the cells are not adjacent under the
// configured connectivity.
EdgeCost edge_cost_parts(CellIndex from, CellIndex to, const FlowField& field,
                         const CostParams& params);
double edge_cost(CellIndex from, CellIndex to, const FlowField& field, const CostParams& params);

double heuristic(const GridSpec& spec, CellIndex cell, CellIndex goal, const CostParams& params);

// Sums path costs in ascending order of magnitude so that paths with the same
// multiset of edge costs report bit-identical totals.
double canonical_sum(std::vector<double> terms);

// Throws OutOfBoundsError for off-grid endpoints, NoPathError when the goal
// is unreachable and std::invalid_argument for blocked endpoints.
PlanResult plan(const FlowField& field, const Vec2& start, const Vec2& goal,
                const CostParams& params, std::span<const CellIndex> blocked = {});

void write_plan(std::ostream& out, const FlowField& field, const PlanResult& result);

// Receding-horizon wrapper around plan(). Keeps the current path and hands
// out its next waypoint, replanning every `period` calls or when the next
// cell becomes blocked.
class Replanner {
 public:
  Replanner(CostParams params, std::size_t period, double arrive_tol = 1e-6);

  Vec2 next(const FlowField& field, const Vec2& robot_pos, const Vec2& goal,
            std::span<const CellIndex> blocked = {});

  // Waypoints not yet handed out, the current target included.
  std::vector<Vec2> remaining() const;
  std::size_t replans() const { return replans_; }
  void reset();

 private:
  void advance(const Vec2& robot_pos);
  void replan(const FlowField& field, const Vec2& robot_pos, const Vec2& goal,
              std::span<const CellIndex> blocked);

  CostParams params_;
  std::size_t period_;
  double arrive_tol_;
  std::vector<Vec2> waypoints_;
  std::vector<CellIndex> cells_;
  std::size_t cursor_ = 0;
  std::size_t since_plan_ = 0;
  std::size_t replans_ = 0;
  bool have_plan_ = false;
};

}  // namespace fipp
