#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace drrt::cli {

// One row of the run metrics table (metrics.csv).
struct RunMetrics {
    std::uint64_t seed = 0;
    std::string allocation;
    double delta = 0.0;
    long nodes = 0;
    bool goal_reached = false;
    double best_cost = 0.0;  // NaN when the goal was not reached
    double wall_time_s = 0.0;
    double total_residual = 0.0;
    long rejections = 0;
};

// Columns: seed,allocation,delta,nodes,goal_reached,best_cost,wall_time_s,
//          total_residual,rejections
std::string metrics_csv_header();
std::string metrics_csv_row(const RunMetrics& m);

struct PlanFlags {
    std::string scenario_path;
    std::uint64_t seed = 0;
    std::optional<int> samples;
    std::optional<std::string> allocation;
    std::optional<double> delta;
    std::string out_dir = ".";
    bool early_stop = false;
};

// Runs one plan and writes tree-<seed>-<mode>-<delta>.jsonl, the matching
// .svg, and metrics.csv into the output directory. Returns a process exit
// status; failures are reported on `log`.
int run_plan(const PlanFlags& flags, std::ostream& log);

struct CompareConfig {
    std::string allocation;
    double delta = 0.0;
};

struct CompareFlags {
    std::string scenario_path;
    std::uint64_t seed_lo = 0;
    std::uint64_t seed_hi = 0;
    std::vector<CompareConfig> configs;
    std::string out_dir = ".";
};

// Cross product of seeds × configs with identical per-seed sampling streams;
// emits one metrics row per run plus per-config aggregate means.
int run_compare(const CompareFlags& flags, std::ostream& log);

struct AuditFlags {
    std::string tree_path;
    std::string scenario_path;
};

// Replays a serialized tree against its scenario; exit 0 iff the audit holds.
int run_audit(const AuditFlags& flags, std::ostream& log);

struct GenFlags {
    int n = 10;
    std::uint64_t seed = 0;
    std::string out_path;
    double clearance = 10.0;
};

int run_gen(const GenFlags& flags, std::ostream& log);

// "A..B" (inclusive) or a single "A".
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text);

// "era:0.1,ura:0.1,era:0.02"
std::vector<CompareConfig> parse_configs(const std::string& text);

// File stem shared by the dump and rendering of one run.
std::string run_file_stem(std::uint64_t seed, const std::string& allocation, double delta);

}  // namespace drrt::cli
