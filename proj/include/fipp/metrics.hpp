#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fipp/sim.hpp"

namespace fipp {

enum class ProxemicZone { intimate, social, beyond_social };

const char* to_string(ProxemicZone z);

// < 1 m intimate, [1, 4] m social, beyond that outside the social zone.
// Throws std::invalid_argument for negative distances.
ProxemicZone proxemic_zone(double d);

constexpr double kViolationThreshold = 0.5;

struct ViolationCount {
  std::size_t steps = 0;   // records with robot-pedestrian distance < threshold
  std::size_t events = 0;  // maximal runs of such records
};

// Minimum robot-pedestrian distance per record (+inf when no pedestrians).
std::vector<double> min_pedestrian_distances(const EpisodeLog& log);

ViolationCount social_violations(const EpisodeLog& log, double threshold = kViolationThreshold);

struct Efficiency {
  double time_to_goal = 0.0;
  double path_length = 0.0;
  double avg_velocity = 0.0;
};

// Throws std::invalid_argument for an empty or zero-duration log.
Efficiency efficiency(const EpisodeLog& log);

struct MetricsReport {
  ScenarioKind kind = ScenarioKind::single_flow;
  std::uint64_t seed = 0;
  PlannerKind planner = PlannerKind::fipp;
  Outcome outcome = Outcome::timeout;
  std::size_t violations_steps = 0;
  std::size_t violation_events = 0;
  double time_to_goal = 0.0;
  double path_length = 0.0;
  double avg_velocity = 0.0;
};

MetricsReport make_report(const EpisodeLog& log, double threshold = kViolationThreshold);

struct Stats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// NaN fields when `values` is empty.
Stats summarize(std::vector<double> values);

struct PlannerSummary {
  std::string label;
  std::size_t episodes = 0;
  std::size_t reached = 0;
  std::size_t timeouts = 0;
  std::size_t frozen = 0;
  Stats violation_events;
  Stats violations_steps;
  Stats path_length;
  // Reached episodes only; timeouts and freezes are counted separately.
  Stats time_to_goal;
  Stats avg_velocity;
};

struct ScenarioComparison {
  ScenarioKind kind;
  PlannerSummary a;
  PlannerSummary b;
  double delta_events_median = 0.0;   // a - b
  double delta_time_median = 0.0;     // a - b over reached episodes
  int violation_winner = 0;           // -1 a wins, +1 b wins, 0 tie
};

struct Comparison {
  PlannerSummary a;
  PlannerSummary b;
  double delta_events_median = 0.0;
  double delta_time_median = 0.0;
  std::vector<ScenarioComparison> per_scenario;
};

PlannerSummary summarize_reports(const std::string& label,
                                 const std::vector<MetricsReport>& reports);

// Both sets must cover the same (kind, seed) pairs; throws
// std::invalid_argument otherwise.
Comparison compare(const std::string& label_a, const std::vector<MetricsReport>& a,
                   const std::string& label_b, const std::vector<MetricsReport>& b);

std::string comparison_to_json(const Comparison& c);
std::string comparison_to_table(const Comparison& c);

}  // namespace fipp
