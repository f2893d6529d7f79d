#pragma once

// Subcommands of the `fipp` binary: extract | predict | plan | simulate | bench.
// Exit codes: 0 ok, 2 input error, 3 no path, 4 internal error.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fipp/metrics.hpp"
#include "fipp/sim.hpp"

namespace fipp::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNoPath = 3, kInternal = 4 };

struct BenchOptions {
  std::vector<ScenarioKind> kinds{std::begin(kBenchKinds), std::end(kBenchKinds)};
  std::vector<std::uint64_t> seeds{1};
  int n_peds = 0;  // 0: drawn per seed from [25, 50]
  EpisodeConfig config;
  double threshold = kViolationThreshold;
  std::string out_dir;  // empty: nothing written
  bool write_logs = true;
};

struct EpisodeResult {
  ScenarioKind kind;
  std::uint64_t seed;
  PlannerKind planner;
  bool ok = false;
  std::string error;
  MetricsReport report;
};

struct BenchResult {
  std::vector<EpisodeResult> episodes;  // ordered by (kind, seed, planner)
  Comparison comparison;                // fipp is `a`, tr is `b`
};

// Pedestrian count used for a bench seed when none is forced.
int bench_ped_count(std::uint64_t seed);

// Runs kind x seed x planner, in parallel when OpenMP is available, and
// merges results in a fixed order.
BenchResult run_bench(const BenchOptions& options);

// "1-20", "3", "1,4,9-12"
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<ScenarioKind> parse_kind_list(const std::string& text);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fipp::cli
