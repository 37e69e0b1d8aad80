#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "drrt/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust RRT with exact risk allocation"};
    app.require_subcommand(1);

    // DRRT_LOG=quiet silences informational output; on failure the captured
    // log is flushed to stderr so diagnostics are never lost.
    bool quiet = false;
    if (const char* level = std::getenv("DRRT_LOG")) quiet = std::string(level) == "quiet";

    drrt::cli::PlanFlags plan_flags;
    int plan_samples = -1;
    std::string plan_allocation;
    double plan_delta = -1.0;
    auto* plan = app.add_subcommand("plan", "Run one seeded plan and write its artifacts");
    plan->add_option("--scenario", plan_flags.scenario_path, "Scenario file")->required();
    plan->add_option("--seed", plan_flags.seed, "Run seed")->default_val(0);
    plan->add_option("--samples", plan_samples, "Override the scenario's sample count");
    plan->add_option("--allocation", plan_allocation, "Override allocation: era|ura")
        ->check(CLI::IsMember({"era", "ura"}));
    plan->add_option("--delta", plan_delta, "Override the total risk budget");
    plan->add_option("--out", plan_flags.out_dir, "Output directory")->default_val(".");
    plan->add_flag("--early-stop", plan_flags.early_stop, "Stop once the goal region is reached");

    drrt::cli::CompareFlags compare_flags;
    std::string compare_seeds = "0..9";
    std::string compare_configs = "ura:0.1,era:0.1,era:0.02";
    auto* compare =
        app.add_subcommand("compare", "Run seeds × configs with identical sampling streams");
    compare->add_option("--scenario", compare_flags.scenario_path, "Scenario file")->required();
    compare->add_option("--seeds", compare_seeds, "Seed range A..B (inclusive)");
    compare->add_option("--configs", compare_configs, "Comma list of mode:delta entries");
    compare->add_option("--out", compare_flags.out_dir, "Output directory")->default_val(".");

    drrt::cli::AuditFlags audit_flags;
    auto* audit = app.add_subcommand("audit", "Replay and verify a serialized tree");
    audit->add_option("--tree", audit_flags.tree_path, "Tree dump (.jsonl)")->required();
    audit->add_option("--scenario", audit_flags.scenario_path, "Scenario file")->required();

    drrt::cli::GenFlags gen_flags;
    auto* gen = app.add_subcommand("gen", "Generate a random rectangle scenario");
    gen->add_option("--n", gen_flags.n, "Number of obstacles")->default_val(10);
    gen->add_option("--seed", gen_flags.seed, "Generator seed")->default_val(0);
    gen->add_option("--out", gen_flags.out_path, "Output scenario path")->required();
    gen->add_option("--clearance", gen_flags.clearance,
                    "Minimum obstacle distance from the start position")
        ->default_val(10.0);

    CLI11_PARSE(app, argc, argv);

    std::ostringstream buffer;
    int rc = 2;
    if (plan->parsed()) {
        if (plan_samples >= 0) plan_flags.samples = plan_samples;
        if (!plan_allocation.empty()) plan_flags.allocation = plan_allocation;
        if (plan_delta >= 0.0) plan_flags.delta = plan_delta;
        rc = drrt::cli::run_plan(plan_flags, buffer);
    } else if (compare->parsed()) {
        try {
            const auto range = drrt::cli::parse_seed_range(compare_seeds);
            compare_flags.seed_lo = range.first;
            compare_flags.seed_hi = range.second;
            compare_flags.configs = drrt::cli::parse_configs(compare_configs);
            rc = drrt::cli::run_compare(compare_flags, buffer);
        } catch (const std::exception& e) {
            buffer << "compare: usage error: " << e.what() << '\n';
            rc = 2;
        }
    } else if (audit->parsed()) {
        rc = drrt::cli::run_audit(audit_flags, buffer);
    } else if (gen->parsed()) {
        rc = drrt::cli::run_gen(gen_flags, buffer);
    }

    if (!quiet) {
        std::cout << buffer.str();
    } else if (rc != 0) {
        std::cerr << buffer.str();
    }
    return rc;
}
