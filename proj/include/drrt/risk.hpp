#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "drrt/environment.hpp"

namespace drrt {

// Risk budget bookkeeping. The total budget Δ for the planning horizon T is
// split uniformly over steering horizons: Δ_steer = Δ·T_steer/T, and the
// prefix budget up to step k within a horizon is Δ_k = k·Δ_steer/T_steer.
struct Budget {
    double delta = 0.0;
    int total_horizon = 0;  // T
    int steer_horizon = 0;  // T_steer
    double delta_steer = 0.0;

    Budget() = default;
    Budget(double delta_total, int total_horizon_steps, int steer_horizon_steps);

    // Δ_k; exactly Δ_steer at k = T_steer.
    double delta_k(int k) const;
};

// Per-segment risk matrices: delta(i, k-1) is the obstacle-i risk charged at
// step k of the segment, kappa(j, k-1) the workspace-face-j risk (all zero
// when the environment is not treated probabilistically). cumulative[k-1] is
// δ_tot(k), the running total accumulated cell by cell in (step, obstacle,
// face) order; every consumer recomputes it in exactly that order so the
// totals compare bitwise.
struct RiskLedger {
    Eigen::MatrixXd delta;           // N × T_s
    Eigen::MatrixXd kappa;           // n_e × T_s
    std::vector<double> cumulative;  // δ_tot(1..T_s)

    int steps() const { return static_cast<int>(delta.cols()); }
    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
    void recompute_cumulative();

    // Ledger restricted to the first k steps (for nodes admitted mid-horizon).
    RiskLedger prefix(int k) const;
};

// Deterministic tightening of an obstacle face (Cantelli form):
//   γ(δ) = sqrt((1-δ)/δ) · ‖(Σ_x + Σ_c)^{1/2} a‖₂.
// A mean satisfying aᵀx̂ ≥ b + γ(δ) puts the worst-case probability of the
// face event below δ for every distribution with those moments.
// Throws std::domain_error unless δ ∈ (0, 1).
double tightening_obstacle(const Eigen::VectorXd& a, const Eigen::MatrixXd& sigma_x,
                           const Eigen::MatrixXd& sigma_c, double delta);

// Workspace analog: η(κ) = sqrt((1-κ)/κ) · ‖Σ_x^{1/2} a‖₂.
double tightening_env(const Eigen::VectorXd& a, const Eigen::MatrixXd& sigma_x, double kappa);

// h-predicate: the mean lies outside the tightened obstacle, i.e. at least
// one face satisfies aᵀx̂ ≥ b + γ(δ) (inclusive, matching the equality
// construction of the minimum-risk result). Positions and covariances are in
// the obstacle's coordinates.
bool check_h(const Eigen::VectorXd& mean_pos, const Polytope& obstacle,
             const Eigen::MatrixXd& sigma_pos, const Eigen::MatrixXd& sigma_c, double delta);

// g-predicate for a single workspace face: aᵀx̂ ≤ b - η(κ) (inclusive).
bool check_g(const Eigen::VectorXd& mean_pos, const Halfspace& face,
             const Eigen::MatrixXd& sigma_pos, double kappa);

// Minimum risk for one obstacle: with normalized margins
//   m_j = (a_jᵀx̂ - b_j) / ‖(Σ_x + Σ_c)^{1/2} a_j‖₂
// the smallest risk satisfying the face disjunction is
//   δ* = (1 + (max_j m_j)²)^{-1},
// attained with equality on the face with the largest margin. Returns
// nullopt (infeasible) when max_j m_j ≤ 0, i.e. the mean is inside the
// obstacle. A zero-variance face with positive raw margin yields risk 0.
std::optional<double> era_obstacle_risk(const Eigen::VectorXd& mean_pos, const Polytope& obstacle,
                                        const Eigen::MatrixXd& sigma_pos,
                                        const Eigen::MatrixXd& sigma_c);

// Minimum risk for one workspace face: with slack
//   s = (b - aᵀx̂) / ‖Σ_x^{1/2} a‖₂
// κ* = (1 + s²)^{-1}; nullopt when s ≤ 0 (mean on or past the boundary).
// Workspace faces are a conjunction, so each face is charged individually.
std::optional<double> era_env_risk(const Eigen::VectorXd& mean_pos, const Halfspace& face,
                                   const Eigen::MatrixXd& sigma_pos);

// First cell at which a segment evaluation failed.
struct CellRef {
    enum class Kind { Obstacle, Workspace };
    Kind kind = Kind::Obstacle;
    int index = 0;  // obstacle or workspace-face index
    int step = 0;   // 1-based step within the segment
};

// Risk evaluation of one steered segment, shared by tree expansion and audit
// replay. Steps run k = 1..T_s over the path (the source node at index 0 has
// already been charged). valid_steps is the number of leading steps whose
// cells all evaluated (ERA) or passed their tightened checks (URA); ledger
// columns beyond valid_steps are zero and cumulative stops there.
struct SegmentEvaluation {
    RiskLedger ledger;
    int valid_steps = 0;
    std::optional<CellRef> first_failure;

    bool full(int horizon) const { return valid_steps == horizon; }
};

// Exact Risk Allocation over a segment: fills δ_{ik} (and κ_{jk} when the
// environment is probabilistic) with the minimum risks. When the environment
// is not probabilistic, each step's mean must instead lie inside the plain
// workspace; a violation invalidates the step. k_start is the absolute time
// of the source node (obstacle schedules are indexed by absolute time).
SegmentEvaluation evaluate_segment_era(const Environment& env,
                                       const std::vector<Eigen::VectorXd>& mean_path,
                                       const std::vector<Eigen::MatrixXd>& cov_path, int k_start,
                                       double inflation_radius);

// Uniform Risk Allocation over a segment: every obstacle cell carries
// delta_uni and every workspace cell kappa_uni, and a step is valid only if
// all of its tightened checks pass (plain workspace membership when the
// environment is not probabilistic).
SegmentEvaluation evaluate_segment_ura(const Environment& env,
                                       const std::vector<Eigen::VectorXd>& mean_path,
                                       const std::vector<Eigen::MatrixXd>& cov_path, int k_start,
                                       double inflation_radius, double delta_uni,
                                       double kappa_uni);

// Algorithm "ExactRiskAllocation" over a full segment: the ledger when every
// cell evaluated, otherwise the first failing cell.
struct AllocationResult {
    bool feasible = false;
    RiskLedger ledger;
    CellRef first_failure;
};
AllocationResult exact_risk_allocation(const Environment& env,
                                       const std::vector<Eigen::VectorXd>& mean_path,
                                       const std::vector<Eigen::MatrixXd>& cov_path, int k_start,
                                       double inflation_radius = 0.0);

// Uniform per-cell risk Δ/(T·N) for N constraint rows per step.
double uniform_risk_allocation(double delta, int total_horizon, int rows_per_step);

// Per-steering-horizon budget Δ_steer = Δ·T_steer/T.
double steering_budget(double delta, int total_horizon, int steer_horizon);

// Relaxed budget test: δ_tot(k) ≤ Δ_k + δ_res[parent].
bool dr_feasible(double delta_tot_k, int k, const Budget& budget, double residual_parent);

// Residual granted to a node admitted at step k:
//   δ_res = Δ_k + δ_res[parent] - δ_tot(k)   (≥ 0 whenever dr_feasible held).
double residual_update(double delta_tot_k, int k, const Budget& budget, double residual_parent);

}  // namespace drrt
