#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "drrt/dynamics.hpp"
#include "drrt/environment.hpp"
#include "drrt/risk.hpp"

namespace drrt {

enum class Allocation { Era, Ura };

std::string to_string(Allocation a);
Allocation allocation_from_string(const std::string& s);

struct PlannerParams {
    double delta = 0.1;      // Δ
    int total_horizon = 1000;  // T
    int steer_horizon = 10;    // T_steer
    int near_count = 5;        // M
    double theta_J = 0.5;
    double theta_res = 0.5;
    int samples = 1000;
    Allocation allocation = Allocation::Era;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;
    double inflation_radius = 0.0;
    bool early_stop = false;

    void validate(int state_dim, int input_dim) const;
};

// Stored trajectory of the edge from the parent, including the risk charged
// along it; everything the audit needs to replay the admission decision.
struct EdgeData {
    Eigen::VectorXd target;                  // steering sample x_s
    std::vector<Eigen::VectorXd> mean_path;  // steps+1 entries, [0] = parent mean
    std::vector<Eigen::MatrixXd> cov_path;
    RiskLedger ledger;                       // steps columns

    int steps() const { return static_cast<int>(mean_path.size()) - 1; }
};

struct TreeNode {
    int id = 0;
    int parent = -1;  // -1 for the root
    MomentState state;
    std::optional<EdgeData> edge;  // empty for the root
    double cost_to_come = 0.0;     // J
    double residual = 0.0;         // δ_res
    int k_abs = 0;
};

struct ExpandReport {
    int nodes_added = 0;
    int candidates_evaluated = 0;
    int full_horizon_feasible = 0;
};

struct PlanMetrics {
    long samples_attempted = 0;
    long nodes_added = 0;
    long candidates_evaluated = 0;
    long feasibility_rejections = 0;  // candidates failing full-horizon admission
    long empty_iterations = 0;        // iterations that added no node
    double total_residual_issued = 0.0;
};

struct PlanResult {
    std::vector<TreeNode> nodes;
    std::optional<int> goal_node;               // minimum-J node inside the goal
    std::optional<std::vector<int>> best_path;  // root..goal ids
    double best_cost = std::numeric_limits<double>::quiet_NaN();
    PlanMetrics metrics;
};

// Selection score θ_J/J + θ_res·δ_res, with J floored at 1e-9 (J = 0 occurs
// only when steering from a node already at the sample).
double candidate_score(double cost_to_come, double residual, const PlannerParams& params);

// Uniform per-cell risk used by URA admission. Cells per step are the N
// obstacles plus, when the workspace is probabilistic, its n_e faces, so the
// uniform allocation exhausts Δ over the horizon by construction.
double ura_cell_risk(const Environment& env, const PlannerParams& params);

class Planner {
public:
    // Validates all inputs; throws std::invalid_argument on violations.
    Planner(Environment env, StochasticLinearSystem sys, PlannerParams params);

    const Environment& environment() const { return env_; }
    const StochasticLinearSystem& system() const { return sys_; }
    const PlannerParams& params() const { return params_; }
    const Budget& budget() const { return budget_; }

    TreeNode make_root() const;

    // The M nodes minimizing cost_to_go(node, sample); fewer if the tree is
    // smaller. Ties break toward the smaller node id.
    std::vector<int> nearest_m_nodes(const std::vector<TreeNode>& tree,
                                     const Eigen::VectorXd& sample, int m) const;

    // One tree-expansion iteration: sample, steer from the M near nodes, run
    // the configured risk allocation, admit the best-scoring full-horizon
    // candidate plus its feasible prefixes; when no candidate covers the full
    // horizon, admit the feasible prefixes of the candidate with the longest
    // one. Infeasible iterations are recorded in metrics, never raised.
    ExpandReport expand(std::vector<TreeNode>& tree, std::mt19937_64& sample_rng,
                        PlanMetrics& metrics) const;

    // Runs `samples` expansion iterations from the root. Bit-reproducible for
    // fixed inputs and seed.
    PlanResult plan(std::uint64_t seed) const;

private:
    Environment env_;
    StochasticLinearSystem sys_;
    PlannerParams params_;
    Budget budget_;
    RiccatiSolution riccati_;
    double delta_uni_ = 0.0;
    double kappa_uni_ = 0.0;
};

PlanResult plan(const Environment& env, const StochasticLinearSystem& sys,
                const PlannerParams& params, std::uint64_t seed);

// Independent verification pass: replays every edge's steering, moment
// propagation, risk allocation and admission arithmetic from scratch and
// compares against the stored values. Returns false with a diagnostic on the
// first mismatch.
struct AuditResult {
    bool ok = true;
    std::string diagnostic;
};

AuditResult audit_tree(const std::vector<TreeNode>& nodes, const Environment& env,
                       const StochasticLinearSystem& sys, const PlannerParams& params);

}  // namespace drrt
