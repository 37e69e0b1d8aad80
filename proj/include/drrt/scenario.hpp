#pragma once

#include <cstdint>
#include <string>

#include "drrt/dynamics.hpp"
#include "drrt/environment.hpp"
#include "drrt/planner.hpp"

namespace drrt {

// Fully validated model objects loaded from one scenario document.
struct Scenario {
    StochasticLinearSystem system;
    Environment env;
    PlannerParams params;
};

// Parses and validates a scenario document (JSON; the exact schema lives in
// docs/scenario.md). Unknown fields, dimension mismatches, non-PSD
// covariances, empty polytope lists and out-of-range budgets are rejected
// with descriptive messages.
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Canonical serialization; load(serialize(s)) reproduces the model objects.
std::string serialize_scenario(const Scenario& s);

// Reproducible stand-in for a desk-scale benchmark: N axis-aligned
// random rectangles in the 50×50 workspace, rejecting any rectangle closer
// than `start_clearance` to the start position.
Scenario generate_scenario(int n_obstacles, std::uint64_t seed, double start_clearance = 10.0);

}  // namespace drrt
