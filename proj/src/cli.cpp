#include "drrt/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "drrt/planner.hpp"
#include "drrt/scenario.hpp"
#include "drrt/svg.hpp"
#include "drrt/tree_io.hpp"

namespace drrt::cli {

namespace {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_delta(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

struct RunOutcome {
    RunMetrics metrics;
    PlanResult result;
};

RunOutcome execute_run(const Scenario& scenario, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    PlanResult result = plan(scenario.env, scenario.system, scenario.params, seed);
    const auto t1 = std::chrono::steady_clock::now();

    RunOutcome out;
    out.metrics.seed = seed;
    out.metrics.allocation = to_string(scenario.params.allocation);
    out.metrics.delta = scenario.params.delta;
    out.metrics.nodes = static_cast<long>(result.nodes.size());
    out.metrics.goal_reached = result.goal_node.has_value();
    out.metrics.best_cost = result.best_cost;
    out.metrics.wall_time_s =
        std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
    out.metrics.total_residual = result.metrics.total_residual_issued;
    out.metrics.rejections = result.metrics.feasibility_rejections;
    out.result = std::move(result);
    return out;
}

void write_run_artifacts(const fs::path& out_dir, const Scenario& scenario, std::uint64_t seed,
                         const PlanResult& result) {
    const std::string stem =
        run_file_stem(seed, to_string(scenario.params.allocation), scenario.params.delta);
    TreeDumpMeta meta;
    meta.seed = seed;
    meta.params = scenario.params;
    write_file(out_dir / (stem + ".jsonl"), dump_tree_jsonl(meta, result.nodes));
    write_file(out_dir / (stem + ".svg"),
               render_tree_svg(scenario.env, result.nodes, result.best_path));
}

void apply_overrides(Scenario& scenario, const std::optional<int>& samples,
                     const std::optional<std::string>& allocation,
                     const std::optional<double>& delta, bool early_stop) {
    if (samples) scenario.params.samples = *samples;
    if (allocation) scenario.params.allocation = allocation_from_string(*allocation);
    if (delta) scenario.params.delta = *delta;
    scenario.params.early_stop = early_stop;
}

}  // namespace

std::string metrics_csv_header() {
    return "seed,allocation,delta,nodes,goal_reached,best_cost,wall_time_s,total_residual,"
           "rejections\n";
}

std::string metrics_csv_row(const RunMetrics& m) {
    std::ostringstream out;
    out << m.seed << ',' << m.allocation << ',' << format_double(m.delta) << ',' << m.nodes << ','
        << (m.goal_reached ? 1 : 0) << ','
        << (m.goal_reached ? format_double(m.best_cost) : std::string("nan")) << ','
        << format_double(m.wall_time_s) << ',' << format_double(m.total_residual) << ','
        << m.rejections << '\n';
    return out.str();
}

std::string run_file_stem(std::uint64_t seed, const std::string& allocation, double delta) {
    return "tree-" + std::to_string(seed) + "-" + allocation + "-" + format_delta(delta);
}

int run_plan(const PlanFlags& flags, std::ostream& log) {
    try {
        Scenario scenario = load_scenario_file(flags.scenario_path);
        apply_overrides(scenario, flags.samples, flags.allocation, flags.delta, flags.early_stop);
        const fs::path out_dir(flags.out_dir);
        fs::create_directories(out_dir);

        const RunOutcome run = execute_run(scenario, flags.seed);
        write_run_artifacts(out_dir, scenario, flags.seed, run.result);
        write_file(out_dir / "metrics.csv", metrics_csv_header() + metrics_csv_row(run.metrics));

        log << "plan: seed " << flags.seed << ", " << run.metrics.allocation
            << ", delta " << format_delta(run.metrics.delta) << ": " << run.metrics.nodes
            << " nodes, goal " << (run.metrics.goal_reached ? "reached" : "not reached") << " ("
            << std::fixed << std::setprecision(2) << run.metrics.wall_time_s << " s)\n";
        return 0;
    } catch (const std::exception& e) {
        log << "plan: error: " << e.what() << '\n';
        return 1;
    }
}

int run_compare(const CompareFlags& flags, std::ostream& log) {
    try {
        if (flags.seed_hi < flags.seed_lo)
            throw std::invalid_argument("seed range must satisfy lo <= hi");
        if (flags.configs.empty()) throw std::invalid_argument("at least one config is required");

        const Scenario base = load_scenario_file(flags.scenario_path);
        const fs::path out_dir(flags.out_dir);
        fs::create_directories(out_dir);

        std::string csv = metrics_csv_header();
        std::map<std::size_t, std::pair<double, long>> aggregate;  // config -> (Σnodes, goal hits)
        log << "seed  allocation  delta      nodes  goal  best_cost      wall_s\n";
        for (std::uint64_t seed = flags.seed_lo; seed <= flags.seed_hi; ++seed) {
            for (std::size_t ci = 0; ci < flags.configs.size(); ++ci) {
                Scenario scenario = base;
                scenario.params.allocation =
                    allocation_from_string(flags.configs[ci].allocation);
                scenario.params.delta = flags.configs[ci].delta;

                const RunOutcome run = execute_run(scenario, seed);
                write_run_artifacts(out_dir, scenario, seed, run.result);
                csv += metrics_csv_row(run.metrics);
                aggregate[ci].first += static_cast<double>(run.metrics.nodes);
                aggregate[ci].second += run.metrics.goal_reached ? 1 : 0;

                log << std::left << std::setw(6) << seed << std::setw(12)
                    << run.metrics.allocation << std::setw(11) << format_delta(run.metrics.delta)
                    << std::setw(7) << run.metrics.nodes << std::setw(6)
                    << (run.metrics.goal_reached ? "yes" : "no") << std::setw(15)
                    << (run.metrics.goal_reached ? format_delta(run.metrics.best_cost)
                                                 : std::string("-"))
                    << std::fixed << std::setprecision(2) << run.metrics.wall_time_s << '\n';
            }
        }
        write_file(out_dir / "metrics.csv", csv);

        const double runs = static_cast<double>(flags.seed_hi - flags.seed_lo + 1);
        log << "\nper-config means over " << static_cast<long>(runs) << " seed(s):\n";
        for (std::size_t ci = 0; ci < flags.configs.size(); ++ci) {
            log << "  " << flags.configs[ci].allocation << " delta "
                << format_delta(flags.configs[ci].delta) << ": mean nodes "
                << std::fixed << std::setprecision(1) << aggregate[ci].first / runs
                << ", goal reached " << aggregate[ci].second << "/" << static_cast<long>(runs)
                << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        log << "compare: error: " << e.what() << '\n';
        return 1;
    }
}

int run_audit(const AuditFlags& flags, std::ostream& log) {
    try {
        const Scenario scenario = load_scenario_file(flags.scenario_path);
        const TreeDump dump = parse_tree_jsonl_file(flags.tree_path);
        // The meta record carries the parameters the run actually used
        // (command-line overrides included).
        const AuditResult audit =
            audit_tree(dump.nodes, scenario.env, scenario.system, dump.meta.params);
        if (!audit.ok) {
            log << "audit: FAIL: " << audit.diagnostic << '\n';
            return 1;
        }
        log << "audit: OK (" << dump.nodes.size() << " nodes)\n";
        return 0;
    } catch (const std::exception& e) {
        log << "audit: error: " << e.what() << '\n';
        return 1;
    }
}

int run_gen(const GenFlags& flags, std::ostream& log) {
    try {
        const Scenario scenario = generate_scenario(flags.n, flags.seed, flags.clearance);
        const fs::path out_path(flags.out_path);
        if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
        write_file(out_path, serialize_scenario(scenario));
        log << "gen: wrote " << flags.n << " obstacles (seed " << flags.seed << ") to "
            << flags.out_path << '\n';
        return 0;
    } catch (const std::exception& e) {
        log << "gen: error: " << e.what() << '\n';
        return 1;
    }
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto pos = text.find("..");
    try {
        if (pos == std::string::npos) {
            const std::uint64_t s = std::stoull(text);
            return {s, s};
        }
        const std::uint64_t lo = std::stoull(text.substr(0, pos));
        const std::uint64_t hi = std::stoull(text.substr(pos + 2));
        if (hi < lo) throw std::invalid_argument("range must be ascending");
        return {lo, hi};
    } catch (const std::exception&) {
        throw std::invalid_argument("seed range must be 'A' or 'A..B', got '" + text + "'");
    }
}

std::vector<CompareConfig> parse_configs(const std::string& text) {
    std::vector<CompareConfig> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config entries must look like 'era:0.1', got '" + item +
                                        "'");
        CompareConfig cfg;
        cfg.allocation = item.substr(0, colon);
        if (cfg.allocation != "era" && cfg.allocation != "ura")
            throw std::invalid_argument("allocation must be era or ura, got '" + cfg.allocation +
                                        "'");
        try {
            cfg.delta = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad delta in config '" + item + "'");
        }
        out.push_back(std::move(cfg));
    }
    if (out.empty()) throw std::invalid_argument("config list is empty");
    return out;
}

}  // namespace drrt::cli
