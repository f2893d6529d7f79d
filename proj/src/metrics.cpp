#include "fipp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fipp {

const char* to_string(ProxemicZone z) {
  switch (z) {
    case ProxemicZone::intimate: return "intimate";
    case ProxemicZone::social: return "social";
    case ProxemicZone::beyond_social: return "beyond_social";
  }
  return "?";
}

ProxemicZone proxemic_zone(double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("proxemic_zone: negative distance");
  if (d < 1.0) return ProxemicZone::intimate;
  if (d <= 4.0) return ProxemicZone::social;
  return ProxemicZone::beyond_social;
}

std::vector<double> min_pedestrian_distances(const EpisodeLog& log) {
  std::vector<double> out;
  out.reserve(log.records.size());
  for (const auto& r : log.records) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : r.pedestrians)
      best = std::min(best, distance(r.robot_position, p.position));
    out.push_back(best);
  }
  return out;
}

ViolationCount social_violations(const EpisodeLog& log, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("violation threshold must be > 0");
  if (log.records.empty()) throw std::invalid_argument("social_violations: empty log");
  ViolationCount vc;
  bool inside = false;
  for (double d : min_pedestrian_distances(log)) {
    const bool v = d < threshold;
    if (v) {
      ++vc.steps;
      if (!inside) ++vc.events;
    }
    inside = v;
  }
  return vc;
}

Efficiency efficiency(const EpisodeLog& log) {
  if (log.records.empty()) throw std::invalid_argument("efficiency: empty log");
  Efficiency e;
  for (std::size_t k = 1; k < log.records.size(); ++k)
    e.path_length += distance(log.records[k - 1].robot_position, log.records[k].robot_position);
  const double t0 = log.records.front().t;
  e.time_to_goal = log.outcome == Outcome::timeout ? log.config.max_t
                                                   : log.records.back().t - t0;
  if (!(e.time_to_goal > 0.0)) throw std::invalid_argument("efficiency: zero-duration log");
  e.avg_velocity = e.path_length / e.time_to_goal;
  return e;
}

MetricsReport make_report(const EpisodeLog& log, double threshold) {
  MetricsReport r;
  r.kind = log.scenario.kind;
  r.seed = log.scenario.seed;
  r.planner = log.planner;
  r.outcome = log.outcome;
  const auto vc = social_violations(log, threshold);
  r.violations_steps = vc.steps;
  r.violation_events = vc.events;
  const auto e = efficiency(log);
  r.time_to_goal = e.time_to_goal;
  r.path_length = e.path_length;
  r.avg_velocity = e.avg_velocity;
  return r;
}

Stats summarize(std::vector<double> values) {
  Stats s;
  s.n = values.size();
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.median = s.min = s.max = nan;
    return s;
  }
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
  s.min = values.front();
  s.max = values.back();
  return s;
}

PlannerSummary summarize_reports(const std::string& label,
                                 const std::vector<MetricsReport>& reports) {
  PlannerSummary p;
  p.label = label;
  p.episodes = reports.size();
  std::vector<double> events, steps, length, time, vel;
  for (const auto& r : reports) {
    events.push_back(static_cast<double>(r.violation_events));
    steps.push_back(static_cast<double>(r.violations_steps));
    length.push_back(r.path_length);
    switch (r.outcome) {
      case Outcome::reached:
        ++p.reached;
        time.push_back(r.time_to_goal);
        vel.push_back(r.avg_velocity);
        break;
      case Outcome::timeout: ++p.timeouts; break;
      case Outcome::frozen: ++p.frozen; break;
    }
  }
  p.violation_events = summarize(events);
  p.violations_steps = summarize(steps);
  p.path_length = summarize(length);
  p.time_to_goal = summarize(time);
  p.avg_velocity = summarize(vel);
  return p;
}

namespace {

int winner(double a, double b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

Comparison compare(const std::string& label_a, const std::vector<MetricsReport>& a,
                   const std::string& label_b, const std::vector<MetricsReport>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("compare: empty report set");
  using Key = std::pair<int, std::uint64_t>;
  std::multiset<Key> ka, kb;
  for (const auto& r : a) ka.insert({static_cast<int>(r.kind), r.seed});
  for (const auto& r : b) kb.insert({static_cast<int>(r.kind), r.seed});
  if (ka != kb) throw std::invalid_argument("compare: mismatched scenario sets");

  Comparison c;
  c.a = summarize_reports(label_a, a);
  c.b = summarize_reports(label_b, b);
  c.delta_events_median = c.a.violation_events.median - c.b.violation_events.median;
  c.delta_time_median = c.a.time_to_goal.median - c.b.time_to_goal.median;

  std::map<int, std::pair<std::vector<MetricsReport>, std::vector<MetricsReport>>> by_kind;
  for (const auto& r : a) by_kind[static_cast<int>(r.kind)].first.push_back(r);
  for (const auto& r : b) by_kind[static_cast<int>(r.kind)].second.push_back(r);
  for (const auto& [kind, sets] : by_kind) {
    ScenarioComparison sc;
    sc.kind = static_cast<ScenarioKind>(kind);
    sc.a = summarize_reports(label_a, sets.first);
    sc.b = summarize_reports(label_b, sets.second);
    sc.delta_events_median = sc.a.violation_events.median - sc.b.violation_events.median;
    sc.delta_time_median = sc.a.time_to_goal.median - sc.b.time_to_goal.median;
    sc.violation_winner = winner(sc.a.violation_events.median, sc.b.violation_events.median);
    c.per_scenario.push_back(sc);
  }
  return c;
}

namespace {

nlohmann::json stats_json(const Stats& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

nlohmann::json summary_json(const PlannerSummary& p) {
  return {{"label", p.label},
          {"episodes", p.episodes},
          {"reached", p.reached},
          {"timeouts", p.timeouts},
          {"frozen", p.frozen},
          {"violation_events", stats_json(p.violation_events)},
          {"violations_steps", stats_json(p.violations_steps)},
          {"path_length", stats_json(p.path_length)},
          {"time_to_goal", stats_json(p.time_to_goal)},
          {"avg_velocity", stats_json(p.avg_velocity)}};
}

std::string cell(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string comparison_to_json(const Comparison& c) {
  nlohmann::json scen = nlohmann::json::array();
  for (const auto& s : c.per_scenario) {
    scen.push_back({{"kind", to_string(s.kind)},
                    {"a", summary_json(s.a)},
                    {"b", summary_json(s.b)},
                    {"delta_events_median", s.delta_events_median},
                    {"delta_time_median", s.delta_time_median},
                    {"violation_winner", s.violation_winner < 0   ? s.a.label
                                         : s.violation_winner > 0 ? s.b.label
                                                                  : "tie"}});
  }
  nlohmann::json j = {{"a", summary_json(c.a)},
                      {"b", summary_json(c.b)},
                      {"delta_events_median", c.delta_events_median},
                      {"delta_time_median", c.delta_time_median},
                      {"per_scenario", scen}};
  return j.dump(2);
}

std::string comparison_to_table(const Comparison& c) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-6s %5s %7s %7s %7s %9s %9s %8s %8s\n", "scenario",
                "planner", "n", "reached", "frozen", "timeout", "viol_med", "viol_mean",
                "ttg_med", "vel_med");
  out << line;
  auto row = [&](const std::string& name, const PlannerSummary& p) {
    std::snprintf(line, sizeof line, "%-14s %-6s %5zu %7zu %7zu %7zu %9s %9s %8s %8s\n",
                  name.c_str(), p.label.c_str(), p.episodes, p.reached, p.frozen, p.timeouts,
                  cell(p.violation_events.median).c_str(), cell(p.violation_events.mean).c_str(),
                  cell(p.time_to_goal.median).c_str(), cell(p.avg_velocity.median).c_str());
    out << line;
  };
  for (const auto& s : c.per_scenario) {
    row(to_string(s.kind), s.a);
    row(to_string(s.kind), s.b);
  }
  row("all", c.a);
  row("all", c.b);
  return out.str();
}

}  // namespace fipp
