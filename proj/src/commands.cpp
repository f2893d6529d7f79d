#include "fipp/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <type_traits>

#include <CLI11.hpp>
#include <json.hpp>

#include "fipp/errors.hpp"
#include "fipp/io.hpp"
#include "fipp/planner.hpp"

namespace fipp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int bench_ped_count(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ull);
  return std::uniform_int_distribution<int>(25, 50)(rng);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw InputError("bad seed range '" + part + "'");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw InputError("bad seed list '" + text + "'");
    }
  }
  if (out.empty()) throw InputError("empty seed list");
  return out;
}

std::vector<ScenarioKind> parse_kind_list(const std::string& text) {
  if (text == "all") return {std::begin(kBenchKinds), std::end(kBenchKinds)};
  std::vector<ScenarioKind> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(parse_scenario_kind(part));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (out.empty()) throw InputError("empty scenario list");
  return out;
}

BenchResult run_bench(const BenchOptions& opt) {
  struct Job {
    ScenarioKind kind;
    std::uint64_t seed;
    PlannerKind planner;
  };
  std::vector<Job> jobs;
  for (auto kind : opt.kinds)
    for (auto seed : opt.seeds)
      for (auto planner : {PlannerKind::fipp, PlannerKind::tr}) jobs.push_back({kind, seed, planner});

  if (!opt.out_dir.empty() && opt.write_logs) fs::create_directories(fs::path(opt.out_dir) / "episodes");

  BenchResult result;
  result.episodes.resize(jobs.size());
  const long long n = static_cast<long long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long long k = 0; k < n; ++k) {
    const Job& job = jobs[k];
    EpisodeResult& er = result.episodes[k];
    er.kind = job.kind;
    er.seed = job.seed;
    er.planner = job.planner;
    try {
      const int peds = opt.n_peds > 0 ? opt.n_peds : bench_ped_count(job.seed);
      const Scenario sc = generate_scenario(job.kind, peds, job.seed);
      const EpisodeLog log = run_episode(sc, job.planner, opt.config);
      er.report = make_report(log, opt.threshold);
      er.ok = true;
      if (!opt.out_dir.empty() && opt.write_logs) {
        const auto name = std::string(to_string(job.kind)) + "_s" + std::to_string(job.seed) +
                          "_" + to_string(job.planner) + ".jsonl";
        std::ofstream f(fs::path(opt.out_dir) / "episodes" / name);
        write_episode_jsonl(f, log);
      }
    } catch (const std::exception& e) {
      er.error = e.what();
    }
  }

  // Pairs where either planner failed are left out of the comparison.
  std::vector<MetricsReport> fipp_reports, tr_reports;
  for (std::size_t k = 0; k + 1 < result.episodes.size(); k += 2) {
    const auto& f = result.episodes[k];
    const auto& t = result.episodes[k + 1];
    if (f.ok && t.ok) {
      fipp_reports.push_back(f.report);
      tr_reports.push_back(t.report);
    }
  }
  if (!fipp_reports.empty())
    result.comparison = compare("fipp", fipp_reports, "tr", tr_reports);
  return result;
}

namespace {

// Options shared by the subcommands, resolved from defaults, then the
// config file, then explicit flags.
struct Settings {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double xi = 0.5;
  double h = 1.0;
  double ema = 0.3;
  std::string rel_mode = "mean";
  std::string sign = "toward_neighbors";
  double cell_size = 0.5;
  double lambda = 2.0;
  int connectivity = 8;
  double threshold = kViolationThreshold;
  std::vector<double> bounds{0.0, 0.0, 20.0, 20.0};
  // extract
  std::string tracks;
  // predict / plan
  std::string field;
  std::vector<std::string> starts;
  std::string start;
  std::string goal;
  std::vector<std::string> blocked;  // i,j cells
  double dt = 0.1;
  int steps = 100;
  double speed_scale = 0.0;  // 0: 1 / xi
  std::string truth;
  // simulate / bench
  std::string scenario = "single_flow";
  std::string scenario_file;
  int peds = 0;
  std::string planner = "fipp";
  std::string kinds = "all";
  std::string seeds = "1";
  double max_t = 120.0;
  double tr_radius = RolloutParams{}.collision_radius;
  bool no_logs = false;
};

struct Binding {
  CLI::Option* option;
  std::function<void(const json&)> assign;
  std::function<json()> read;
};

template <typename T>
Binding bind_opt(CLI::App& app, const std::string& flag, T& target, const std::string& help) {
  CLI::Option* o = nullptr;
  if constexpr (std::is_same_v<T, bool>)
    o = app.add_flag(flag, target, help);
  else
    o = app.add_option(flag, target, help)->capture_default_str();
  return {o, [&target](const json& j) { target = j.get<T>(); }, [&target]() { return json(target); }};
}

std::string key_of(const CLI::Option* o) {
  std::string k = o->get_lnames().empty() ? o->get_name() : o->get_lnames().front();
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

Vec2 parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InputError("expected x,y point, got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw InputError("expected x,y point, got '" + s + "'");
  }
}

FlowParams flow_params(const Settings& s) {
  FlowParams p;
  p.xi = s.xi;
  p.h = s.h;
  p.ema_decay = s.ema;
  if (s.rel_mode == "mean") p.rel_velocity_mode = RelVelocityMode::mean;
  else if (s.rel_mode == "sum") p.rel_velocity_mode = RelVelocityMode::sum;
  else throw InputError("rel-mode must be mean or sum");
  if (s.sign == "toward_neighbors") p.influence_sign = InfluenceSign::toward_neighbors;
  else if (s.sign == "as_written") p.influence_sign = InfluenceSign::as_written;
  else throw InputError("sign must be toward_neighbors or as_written");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return p;
}

CostParams cost_params(const Settings& s) {
  CostParams c;
  c.lambda_flow = s.lambda;
  c.connectivity = s.connectivity;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return c;
}

EpisodeConfig episode_config(const Settings& s) {
  EpisodeConfig c;
  c.flow = flow_params(s);
  c.cost = cost_params(s);
  c.cell_size = s.cell_size;
  c.max_t = s.max_t;
  c.rollout.collision_radius = s.tr_radius;
  try {
    c.rollout.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return c;
}

fs::path prepare_out(const Settings& s) {
  fs::path out(s.out_dir);
  fs::create_directories(out);
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

int cmd_extract(const Settings& s, const json& effective, std::ostream& out) {
  const FlowParams fp = flow_params(s);
  if (s.bounds.size() != 4) throw InputError("--bounds expects xmin ymin xmax ymax");
  const Rect bounds{{s.bounds[0], s.bounds[1]}, {s.bounds[2], s.bounds[3]}};
  if (!(bounds.width() > 0.0 && bounds.height() > 0.0)) throw InputError("empty --bounds");
  if (!(s.cell_size > 0.0)) throw InputError("--cell-size must be > 0");
  const TrackLog log = read_track_log_file(s.tracks);
  std::size_t oob = 0;
  const FlowField field = extract_field(world_grid(bounds, s.cell_size), log, fp, &oob);

  const fs::path dir = prepare_out(s);
  std::ofstream f(dir / "field.csv");
  write_field(f, field);
  json manifest = effective;
  manifest["frames"] = log.size();
  manifest["out_of_bounds"] = oob;
  write_text(dir / "config.json", manifest.dump(2) + "\n");
  out << "extracted " << field.spec.width << "x" << field.spec.height << " field from "
      << log.size() << " frames (" << oob << " out-of-bounds observations) -> "
      << (dir / "field.csv").string() << "\n";
  return kOk;
}

int cmd_predict(const Settings& s, const json& effective, std::ostream& out) {
  const FlowField field = read_field_file(s.field);
  const double scale = s.speed_scale > 0.0 ? s.speed_scale : 1.0 / s.xi;
  if (!(s.dt > 0.0) || s.steps < 0) throw InputError("--dt must be > 0 and --steps >= 0");

  struct Item {
    PedId id;
    Trajectory predicted;
    Trajectory actual;
  };
  std::vector<Item> items;
  if (!s.truth.empty()) {
    const TrackLog truth = read_track_log_file(s.truth);
    std::map<PedId, std::pair<std::vector<double>, Trajectory>> tracks;
    for (const auto& frame : truth)
      for (const auto& o : frame.observations) {
        tracks[o.id].first.push_back(frame.t);
        tracks[o.id].second.push_back(o.position);
      }
    for (auto& [id, tr] : tracks) {
      const auto& [times, pts] = tr;
      const std::size_t n = pts.size();
      const double dt = n > 1 ? (times.back() - times.front()) / static_cast<double>(n - 1) : s.dt;
      items.push_back({id, advect(field, pts.front(), dt, n - 1, scale), pts});
    }
  } else {
    PedId id = 0;
    for (const auto& st : s.starts)
      items.push_back({id++, advect(field, parse_point(st), s.dt, static_cast<std::size_t>(s.steps), scale), {}});
  }

  const fs::path dir = prepare_out(s);
  std::ofstream traj(dir / "trajectories.csv");
  traj << "# id,k,x,y\n";
  for (const auto& it : items)
    for (std::size_t k = 0; k < it.predicted.size(); ++k)
      traj << it.id << ',' << k << ',' << format_double(it.predicted[k].x) << ','
           << format_double(it.predicted[k].y) << '\n';

  json manifest = effective;
  manifest["trajectories"] = items.size();
  if (!s.truth.empty()) {
    std::ofstream dev(dir / "deviation.csv");
    dev << "# id,points,deviation\n";
    double sum = 0.0;
    for (const auto& it : items) {
      const double d = trajectory_deviation(it.predicted, it.actual);
      sum += d;
      dev << it.id << ',' << it.actual.size() << ',' << format_double(d) << '\n';
    }
    const double mean = items.empty() ? 0.0 : sum / static_cast<double>(items.size());
    manifest["mean_deviation"] = mean;
    out << "pedestrians " << items.size() << " mean deviation " << format_double(mean) << " m\n";
  } else {
    out << "advected " << items.size() << " particles\n";
  }
  write_text(dir / "config.json", manifest.dump(2) + "\n");
  return kOk;
}

int cmd_plan(const Settings& s, const json& effective, std::ostream& out) {
  const FlowField field = read_field_file(s.field);
  std::vector<CellIndex> blocked;
  for (const auto& b : s.blocked) {
    const Vec2 ij = parse_point(b);
    const int i = static_cast<int>(ij.x), j = static_cast<int>(ij.y);
    if (i != ij.x || j != ij.y || i < 0 || j < 0 || i >= field.spec.width || j >= field.spec.height)
      throw InputError("--blocked expects an on-grid i,j cell, got '" + b + "'");
    blocked.push_back(field.spec.index(i, j));
  }
  PlanResult r;
  try {
    r = plan(field, parse_point(s.start), parse_point(s.goal), cost_params(s), blocked);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const fs::path dir = prepare_out(s);
  std::ofstream f(dir / "plan.csv");
  write_plan(f, field, r);
  write_text(dir / "config.json", effective.dump(2) + "\n");
  out << "C_T " << format_double(r.cost_T) << "\nC_F " << format_double(r.cost_F) << "\nC_phi "
      << format_double(r.cost_total) << "\nexpanded " << r.expanded << "\n";
  return kOk;
}

json report_json(const MetricsReport& r) {
  return {{"kind", to_string(r.kind)},
          {"seed", r.seed},
          {"planner", to_string(r.planner)},
          {"outcome", to_string(r.outcome)},
          {"violations_steps", r.violations_steps},
          {"violation_events", r.violation_events},
          {"time_to_goal", r.time_to_goal},
          {"path_length", r.path_length},
          {"avg_velocity", r.avg_velocity}};
}

int cmd_simulate(const Settings& s, const json& effective, std::ostream& out) {
  Scenario sc;
  if (!s.scenario_file.empty()) {
    std::ifstream f(s.scenario_file);
    if (!f) throw InputError("cannot open scenario file '" + s.scenario_file + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    sc = scenario_from_json(buf.str());
  } else {
    ScenarioKind kind;
    try {
      kind = parse_scenario_kind(s.scenario);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    sc = kind == ScenarioKind::wall
             ? wall_fixture(s.seed)
             : generate_scenario(kind, s.peds > 0 ? s.peds : bench_ped_count(s.seed), s.seed);
  }
  PlannerKind planner;
  try {
    planner = parse_planner_kind(s.planner);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const EpisodeLog log = run_episode(sc, planner, episode_config(s));
  const MetricsReport rep = make_report(log, s.threshold);

  const fs::path dir = prepare_out(s);
  write_text(dir / "scenario.json", scenario_to_json(sc) + "\n");
  {
    std::ofstream f(dir / "episode.jsonl");
    write_episode_jsonl(f, log);
  }
  {
    std::ofstream f(dir / "tracks.csv");
    write_track_log(f, episode_track_log(log));
  }
  write_text(dir / "metrics.json", report_json(rep).dump(2) + "\n");
  write_text(dir / "config.json", effective.dump(2) + "\n");
  out << "outcome " << to_string(rep.outcome) << "  violations " << rep.violation_events
      << " events / " << rep.violations_steps << " steps  time " << rep.time_to_goal
      << " s  path " << rep.path_length << " m\n";
  return kOk;
}

int cmd_bench(const Settings& s, const json& effective, std::ostream& out) {
  BenchOptions opt;
  opt.kinds = parse_kind_list(s.kinds);
  opt.seeds = parse_seed_list(s.seeds);
  opt.n_peds = s.peds;
  opt.config = episode_config(s);
  opt.threshold = s.threshold;
  opt.out_dir = s.out_dir;
  opt.write_logs = !s.no_logs;
  prepare_out(s);
  const BenchResult res = run_bench(opt);

  const fs::path dir(s.out_dir);
  json failures = json::array();
  {
    std::ofstream f(dir / "reports.csv");
    f << "# kind,seed,planner,outcome,violation_events,violations_steps,time_to_goal,path_length,avg_velocity\n";
    for (const auto& e : res.episodes) {
      if (!e.ok) {
        failures.push_back({{"kind", to_string(e.kind)},
                            {"seed", e.seed},
                            {"planner", to_string(e.planner)},
                            {"error", e.error}});
        continue;
      }
      const auto& r = e.report;
      f << to_string(r.kind) << ',' << r.seed << ',' << to_string(r.planner) << ','
        << to_string(r.outcome) << ',' << r.violation_events << ',' << r.violations_steps << ','
        << format_double(r.time_to_goal) << ',' << format_double(r.path_length) << ','
        << format_double(r.avg_velocity) << '\n';
    }
  }
  json summary = json::parse(comparison_to_json(res.comparison));
  summary["failures"] = failures;
  summary["episodes"] = res.episodes.size();
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  const std::string table = comparison_to_table(res.comparison);
  write_text(dir / "summary.txt", table);
  write_text(dir / "config.json", effective.dump(2) + "\n");
  out << table;
  if (!failures.empty()) out << failures.size() << " episode(s) failed, see summary.json\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flow-informed path planning toolkit"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  Settings s;
  std::vector<Binding> common;
  std::map<CLI::App*, std::vector<Binding>> local;

  auto add_common = [&](CLI::App* sub) {
    auto& b = local[sub];
    sub->add_option("--config", s.config_path, "JSON file with option defaults");
    b.push_back(bind_opt(*sub, "--seed", s.seed, "random seed"));
    b.push_back(bind_opt(*sub, "--out", s.out_dir, "output directory"));
    b.push_back(bind_opt(*sub, "--xi", s.xi, "self-propelling coefficient"));
    b.push_back(bind_opt(*sub, "--h", s.h, "influence radius [m]"));
    b.push_back(bind_opt(*sub, "--ema", s.ema, "per-frame velocity smoothing weight"));
    b.push_back(bind_opt(*sub, "--rel-mode", s.rel_mode, "mean | sum"));
    b.push_back(bind_opt(*sub, "--sign", s.sign, "toward_neighbors | as_written"));
    b.push_back(bind_opt(*sub, "--cell-size", s.cell_size, "grid cell size [m]"));
    b.push_back(bind_opt(*sub, "--lambda", s.lambda, "flow cost weight"));
    b.push_back(bind_opt(*sub, "--connectivity", s.connectivity, "4 | 8"));
    b.push_back(bind_opt(*sub, "--threshold", s.threshold, "social violation distance [m]"));
  };

  auto* extract = app.add_subcommand("extract", "build a flow field from a track log");
  add_common(extract);
  local[extract].push_back(bind_opt(*extract, "--tracks", s.tracks, "track log (t,id,x,y,vx,vy)"));
  local[extract].push_back(bind_opt(*extract, "--bounds", s.bounds, "xmin ymin xmax ymax"));
  local[extract].back().option->expected(4);

  auto* predict = app.add_subcommand("predict", "advect particles through a flow field");
  add_common(predict);
  local[predict].push_back(bind_opt(*predict, "--field", s.field, "flow field file"));
  local[predict].push_back(bind_opt(*predict, "--start", s.starts, "x,y start point (repeatable)"));
  local[predict].push_back(bind_opt(*predict, "--dt", s.dt, "time step [s]"));
  local[predict].push_back(bind_opt(*predict, "--steps", s.steps, "integration steps"));
  local[predict].push_back(bind_opt(*predict, "--speed-scale", s.speed_scale, "force-to-velocity scale (0: 1/xi)"));
  local[predict].push_back(bind_opt(*predict, "--truth", s.truth, "ground-truth track log"));

  auto* plan_cmd = app.add_subcommand("plan", "flow-informed A* on a flow field");
  add_common(plan_cmd);
  local[plan_cmd].push_back(bind_opt(*plan_cmd, "--field", s.field, "flow field file"));
  local[plan_cmd].push_back(bind_opt(*plan_cmd, "--start", s.start, "x,y"));
  local[plan_cmd].push_back(bind_opt(*plan_cmd, "--goal", s.goal, "x,y"));
  local[plan_cmd].push_back(bind_opt(*plan_cmd, "--blocked", s.blocked, "i,j static obstacle cell (repeatable)"));

  auto* simulate = app.add_subcommand("simulate", "run one episode");
  add_common(simulate);
  local[simulate].push_back(bind_opt(*simulate, "--scenario", s.scenario, "chaotic | single_flow | double_flow | intersection | wall"));
  local[simulate].push_back(bind_opt(*simulate, "--scenario-file", s.scenario_file, "scenario JSON"));
  local[simulate].push_back(bind_opt(*simulate, "--peds", s.peds, "pedestrian count (0: drawn from seed)"));
  local[simulate].push_back(bind_opt(*simulate, "--planner", s.planner, "fipp | tr"));
  local[simulate].push_back(bind_opt(*simulate, "--max-t", s.max_t, "episode time limit [s]"));
  local[simulate].push_back(bind_opt(*simulate, "--tr-radius", s.tr_radius, "trajectory-rollout collision radius [m]"));

  auto* bench = app.add_subcommand("bench", "compare planners over scenarios and seeds");
  add_common(bench);
  local[bench].push_back(bind_opt(*bench, "--kinds", s.kinds, "comma list or 'all'"));
  local[bench].push_back(bind_opt(*bench, "--seeds", s.seeds, "e.g. 1-20 or 1,3,5"));
  local[bench].push_back(bind_opt(*bench, "--peds", s.peds, "pedestrian count (0: drawn per seed)"));
  local[bench].push_back(bind_opt(*bench, "--max-t", s.max_t, "episode time limit [s]"));
  local[bench].push_back(bind_opt(*bench, "--tr-radius", s.tr_radius, "trajectory-rollout collision radius [m]"));
  local[bench].push_back(bind_opt(*bench, "--no-logs", s.no_logs, "skip per-episode logs"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const auto& bindings = local[sub];
  json effective = {{"command", sub->get_name()}};
  try {
    if (!s.config_path.empty()) {
      std::ifstream f(s.config_path);
      if (!f) throw InputError("cannot open config file '" + s.config_path + "'");
      json cfg;
      try {
        cfg = json::parse(f);
      } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
      }
      for (const auto& b : bindings) {
        const auto key = key_of(b.option);
        if (b.option->count() == 0 && cfg.contains(key)) {
          try {
            b.assign(cfg.at(key));
          } catch (const json::exception&) {
            throw InputError("config: bad value for '" + key + "'");
          }
        }
      }
      effective["config_file"] = s.config_path;
    }
    for (const auto& b : bindings) effective[key_of(b.option)] = b.read();

    const std::string name = sub->get_name();
    if (name == "extract") {
      if (s.tracks.empty()) throw InputError("--tracks is required");
      return cmd_extract(s, effective, out);
    }
    if (name == "predict") {
      if (s.field.empty()) throw InputError("--field is required");
      return cmd_predict(s, effective, out);
    }
    if (name == "plan") {
      if (s.field.empty() || s.start.empty() || s.goal.empty())
        throw InputError("--field, --start and --goal are required");
      return cmd_plan(s, effective, out);
    }
    if (name == "simulate") return cmd_simulate(s, effective, out);
    if (name == "bench") return cmd_bench(s, effective, out);
    return kInternal;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const NoPathError& e) {
    err << "no path: " << e.what() << "\n";
    return kNoPath;
  } catch (const OutOfBoundsError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace fipp::cli
