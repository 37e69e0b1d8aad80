#include "drrt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "drrt/numeric.hpp"
#include "drrt/rng.hpp"

namespace drrt {

namespace {

constexpr double kScoreCostFloor = 1e-9;

// Replay comparisons: recomputation runs the same arithmetic in the same
// order, so anything beyond round-off noise is a real mismatch.
constexpr double kAuditTol = 1e-12;

bool approx(double a, double b) {
    return std::abs(a - b) <= kAuditTol * std::max({1.0, std::abs(a), std::abs(b)});
}

bool approx_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (!approx(a[i], b[i])) return false;
    }
    return true;
}

bool approx_mat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (!approx(a.data()[i], b.data()[i])) return false;
    }
    return true;
}

}  // namespace

std::string to_string(Allocation a) { return a == Allocation::Era ? "era" : "ura"; }

Allocation allocation_from_string(const std::string& s) {
    if (s == "era") return Allocation::Era;
    if (s == "ura") return Allocation::Ura;
    throw std::invalid_argument("allocation must be 'era' or 'ura', got '" + s + "'");
}

void PlannerParams::validate(int state_dim, int input_dim) const {
    if (!(delta > 0.0 && delta <= 0.5))
        throw std::invalid_argument("Delta must lie in (0, 0.5]");
    if (total_horizon < 1) throw std::invalid_argument("T must be >= 1");
    if (steer_horizon < 1 || steer_horizon > total_horizon)
        throw std::invalid_argument("T_steer must lie in [1, T]");
    if (near_count < 1) throw std::invalid_argument("M must be >= 1");
    if (theta_J < 0.0 || theta_res < 0.0 || std::abs(theta_J + theta_res - 1.0) > 1e-12)
        throw std::invalid_argument("theta_J and theta_res must be in [0,1] and sum to 1");
    if (samples < 0) throw std::invalid_argument("samples must be >= 0");
    if (Q.rows() != state_dim || Q.cols() != state_dim)
        throw std::invalid_argument("Q must be n×n");
    if (R.rows() != input_dim || R.cols() != input_dim)
        throw std::invalid_argument("R must be m×m");
    if (!is_psd(Q)) throw std::invalid_argument("Q must be symmetric PSD");
    if (Eigen::LLT<Eigen::MatrixXd>(symmetrized(R)).info() != Eigen::Success)
        throw std::invalid_argument("R must be positive definite");
    if (inflation_radius < 0.0) throw std::invalid_argument("inflation_radius must be >= 0");
}

double candidate_score(double cost_to_come, double residual, const PlannerParams& params) {
    return params.theta_J / std::max(cost_to_come, kScoreCostFloor) + params.theta_res * residual;
}

double ura_cell_risk(const Environment& env, const PlannerParams& params) {
    const int rows =
        env.obstacle_count() + (env.env_probabilistic ? env.workspace_face_count() : 0);
    // With no risk-bearing rows URA degenerates to plain membership checks and
    // the cell value is never consulted.
    if (rows == 0) return 0.5;
    return uniform_risk_allocation(params.delta, params.total_horizon, rows);
}

Planner::Planner(Environment env, StochasticLinearSystem sys, PlannerParams params)
    : env_(std::move(env)), sys_(std::move(sys)), params_(std::move(params)) {
    sys_.validate();
    env_.validate();
    params_.validate(sys_.state_dim(), sys_.input_dim());
    if (env_.position_dim() > sys_.state_dim())
        throw std::invalid_argument("position dimension exceeds state dimension");
    budget_ = Budget(params_.delta, params_.total_horizon, params_.steer_horizon);
    riccati_ = solve_riccati(sys_, params_.steer_horizon, params_.Q, params_.R);
    delta_uni_ = ura_cell_risk(env_, params_);
    kappa_uni_ = delta_uni_;
}

TreeNode Planner::make_root() const {
    TreeNode root;
    root.id = 0;
    root.parent = -1;
    root.state = MomentState{sys_.x0_mean, sys_.sigma_x0, 0};
    root.cost_to_come = 0.0;
    root.residual = 0.0;
    root.k_abs = 0;
    return root;
}

std::vector<int> Planner::nearest_m_nodes(const std::vector<TreeNode>& tree,
                                          const Eigen::VectorXd& sample, int m) const {
    if (tree.empty()) throw std::invalid_argument("nearest_m_nodes requires a nonempty tree");
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(tree.size());
    for (const TreeNode& node : tree) {
        const Eigen::VectorXd e0 = node.state.mean - sample;
        ranked.emplace_back(e0.dot(riccati_.cost_matrix * e0), node.id);
    }
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(m), ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      ranked.end());
    std::vector<int> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(ranked[i].second);
    return out;
}

ExpandReport Planner::expand(std::vector<TreeNode>& tree, std::mt19937_64& sample_rng,
                             PlanMetrics& metrics) const {
    ExpandReport report;
    const int horizon = params_.steer_horizon;
    const Eigen::VectorXd sample = sample_free(env_, 0, sample_rng, sys_.state_dim());

    struct Candidate {
        int node_id = -1;
        SteeringResult steer;
        SegmentEvaluation eval;
        bool full_feasible = false;
        double full_cost = 0.0;
        double full_residual = 0.0;
        double full_score = 0.0;
        int best_prefix = 0;  // largest admissible k in [1, horizon-1]
        double prefix_score = 0.0;
    };

    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<std::size_t>(params_.near_count));

    for (int id : nearest_m_nodes(tree, sample, params_.near_count)) {
        const TreeNode& near_node = tree[static_cast<std::size_t>(id)];
        if (near_node.k_abs + horizon > params_.total_horizon) continue;  // horizon exhausted
        Candidate c;
        c.node_id = id;
        c.steer = lqr_steer(sys_, near_node.state, sample, riccati_, params_.Q, params_.R);
        c.eval = params_.allocation == Allocation::Era
                     ? evaluate_segment_era(env_, c.steer.mean_path, c.steer.cov_path, near_node.k_abs,
                                            params_.inflation_radius)
                     : evaluate_segment_ura(env_, c.steer.mean_path, c.steer.cov_path, near_node.k_abs,
                                            params_.inflation_radius, delta_uni_, kappa_uni_);
        ++report.candidates_evaluated;

        const auto admissible = [&](int k) {
            if (k > c.eval.valid_steps) return false;
            if (params_.allocation == Allocation::Ura) return true;
            return dr_feasible(c.eval.ledger.cumulative[static_cast<std::size_t>(k) - 1], k,
                               budget_, near_node.residual);
        };

        if (c.eval.full(horizon) && admissible(horizon)) {
            c.full_feasible = true;
            c.full_cost = near_node.cost_to_come + c.steer.cost;
            c.full_residual =
                params_.allocation == Allocation::Era
                    ? residual_update(c.eval.ledger.cumulative.back(), horizon, budget_, near_node.residual)
                    : 0.0;
            c.full_score = candidate_score(c.full_cost, c.full_residual, params_);
            ++report.full_horizon_feasible;
        } else {
            ++metrics.feasibility_rejections;
        }
        for (int k = std::min(c.eval.valid_steps, horizon - 1); k >= 1; --k) {
            if (admissible(k)) {
                c.best_prefix = k;
                const double j = near_node.cost_to_come + path_cost(c.steer, params_.Q, params_.R, k);
                const double res = params_.allocation == Allocation::Era
                                       ? residual_update(
                                             c.eval.ledger.cumulative[static_cast<std::size_t>(k) - 1],
                                             k, budget_, near_node.residual)
                                       : 0.0;
                c.prefix_score = candidate_score(j, res, params_);
                break;
            }
        }
        candidates.push_back(std::move(c));
    }

    // Selection: best score among full-horizon candidates; otherwise the
    // candidate with the longest admissible prefix (ties by prefix score,
    // then candidate order, which is already (metric, id) ranked).
    const Candidate* chosen = nullptr;
    bool chosen_full = false;
    for (const Candidate& c : candidates) {
        if (!c.full_feasible) continue;
        if (chosen == nullptr || c.full_score > chosen->full_score) {
            chosen = &c;
            chosen_full = true;
        }
    }
    if (chosen == nullptr) {
        for (const Candidate& c : candidates) {
            if (c.best_prefix == 0) continue;
            if (chosen == nullptr || c.best_prefix > chosen->best_prefix ||
                (c.best_prefix == chosen->best_prefix && c.prefix_score > chosen->prefix_score)) {
                chosen = &c;
            }
        }
    }
    if (chosen == nullptr) {
        ++metrics.empty_iterations;
        return report;
    }

    const TreeNode& parent = tree[static_cast<std::size_t>(chosen->node_id)];
    const int parent_id = parent.id;
    const double parent_cost = parent.cost_to_come;
    const double parent_residual = parent.residual;
    const int parent_k_abs = parent.k_abs;

    const auto add_node = [&](int k, double residual) {
        TreeNode node;
        node.id = static_cast<int>(tree.size());
        node.parent = parent_id;
        node.k_abs = parent_k_abs + k;
        node.state = MomentState{chosen->steer.mean_path[static_cast<std::size_t>(k)],
                                 chosen->steer.cov_path[static_cast<std::size_t>(k)], node.k_abs};
        node.cost_to_come = parent_cost + path_cost(chosen->steer, params_.Q, params_.R, k);
        node.residual = residual;
        EdgeData edge;
        edge.target = chosen->steer.target;
        edge.mean_path.assign(chosen->steer.mean_path.begin(),
                              chosen->steer.mean_path.begin() + k + 1);
        edge.cov_path.assign(chosen->steer.cov_path.begin(),
                             chosen->steer.cov_path.begin() + k + 1);
        edge.ledger = chosen->eval.ledger.prefix(k);
        node.edge = std::move(edge);
        tree.push_back(std::move(node));
        ++report.nodes_added;
        metrics.total_residual_issued += residual;
    };

    if (chosen_full) add_node(horizon, chosen->full_residual);
    // Feasible portions of the selected trajectory join the tree as siblings.
    for (int k = 1; k <= std::min(chosen->eval.valid_steps, horizon - 1); ++k) {
        bool ok;
        double residual = 0.0;
        if (params_.allocation == Allocation::Ura) {
            ok = true;
        } else {
            const double dtot = chosen->eval.ledger.cumulative[static_cast<std::size_t>(k) - 1];
            ok = dr_feasible(dtot, k, budget_, parent_residual);
            if (ok) residual = residual_update(dtot, k, budget_, parent_residual);
        }
        if (ok) add_node(k, residual);
    }

    if (report.nodes_added == 0) ++metrics.empty_iterations;
    metrics.nodes_added += report.nodes_added;
    metrics.candidates_evaluated += report.candidates_evaluated;
    return report;
}

PlanResult Planner::plan(std::uint64_t seed) const {
    PlanResult result;
    std::mt19937_64 sample_rng = make_stream(seed, 0);
    std::mt19937_64 reserved_rng = make_stream(seed, 1);  // future stochastic features
    (void)reserved_rng;

    result.nodes.push_back(make_root());
    const int d = env_.position_dim();

    const auto in_goal = [&](const TreeNode& node) {
        return env_.goal.contains(node.state.mean.head(d));
    };

    for (int iter = 0; iter < params_.samples; ++iter) {
        ++result.metrics.samples_attempted;
        const std::size_t before = result.nodes.size();
        expand(result.nodes, sample_rng, result.metrics);
        if (params_.early_stop) {
            bool reached = false;
            for (std::size_t i = before; i < result.nodes.size(); ++i) {
                if (in_goal(result.nodes[i])) {
                    reached = true;
                    break;
                }
            }
            if (reached) break;
        }
    }

    for (const TreeNode& node : result.nodes) {
        if (!in_goal(node)) continue;
        if (!result.goal_node || node.cost_to_come < result.best_cost) {
            result.goal_node = node.id;
            result.best_cost = node.cost_to_come;
        }
    }
    if (result.goal_node) {
        std::vector<int> path;
        for (int id = *result.goal_node; id >= 0; id = result.nodes[static_cast<std::size_t>(id)].parent)
            path.push_back(id);
        std::reverse(path.begin(), path.end());
        result.best_path = std::move(path);
    }
    return result;
}

PlanResult plan(const Environment& env, const StochasticLinearSystem& sys,
                const PlannerParams& params, std::uint64_t seed) {
    return Planner(env, sys, params).plan(seed);
}

AuditResult audit_tree(const std::vector<TreeNode>& nodes, const Environment& env,
                       const StochasticLinearSystem& sys, const PlannerParams& params) {
    const auto fail = [](int id, const std::string& what) {
        AuditResult r;
        r.ok = false;
        r.diagnostic = "node " + std::to_string(id) + ": " + what;
        return r;
    };

    sys.validate();
    env.validate();
    params.validate(sys.state_dim(), sys.input_dim());
    const Budget budget(params.delta, params.total_horizon, params.steer_horizon);
    const RiccatiSolution riccati = solve_riccati(sys, params.steer_horizon, params.Q, params.R);
    const double delta_uni = ura_cell_risk(env, params);

    if (nodes.empty()) return fail(-1, "tree is empty");
    const TreeNode& root = nodes[0];
    if (root.id != 0 || root.parent != -1 || root.edge.has_value())
        return fail(root.id, "malformed root record");
    if (root.cost_to_come != 0.0 || root.residual != 0.0 || root.k_abs != 0)
        return fail(root.id, "root must carry J = 0, residual = 0, k = 0");
    if (!approx_vec(root.state.mean, sys.x0_mean) || !approx_mat(root.state.cov, sys.sigma_x0))
        return fail(root.id, "root state does not match the system's initial moments");

    for (std::size_t idx = 1; idx < nodes.size(); ++idx) {
        const TreeNode& node = nodes[idx];
        if (node.id != static_cast<int>(idx)) return fail(node.id, "ids must be dense and ordered");
        if (node.parent < 0 || node.parent >= node.id)
            return fail(node.id, "parent must precede the node");
        if (!node.edge) return fail(node.id, "non-root node lacks an edge");
        const EdgeData& edge = *node.edge;
        const int steps = edge.steps();
        if (steps < 1 || steps > params.steer_horizon)
            return fail(node.id, "edge length outside [1, T_steer]");
        const TreeNode& parent = nodes[static_cast<std::size_t>(node.parent)];
        if (node.k_abs != parent.k_abs + steps)
            return fail(node.id, "absolute time does not add up along the edge");
        if (node.k_abs > params.total_horizon)
            return fail(node.id, "node lies beyond the planning horizon");
        if (!approx_vec(edge.mean_path.front(), parent.state.mean) ||
            !approx_mat(edge.cov_path.front(), parent.state.cov))
            return fail(node.id, "edge does not start at the parent state");

        // Replay the steering and moment propagation.
        const SteeringResult steer =
            lqr_steer(sys, parent.state, edge.target, riccati, params.Q, params.R);
        for (int k = 0; k <= steps; ++k) {
            if (!approx_vec(steer.mean_path[static_cast<std::size_t>(k)],
                            edge.mean_path[static_cast<std::size_t>(k)]))
                return fail(node.id, "stored mean path differs from replay at step " +
                                         std::to_string(k));
            if (!approx_mat(steer.cov_path[static_cast<std::size_t>(k)],
                            edge.cov_path[static_cast<std::size_t>(k)]))
                return fail(node.id, "stored covariance path differs from replay at step " +
                                         std::to_string(k));
        }
        if (!approx_vec(node.state.mean, edge.mean_path.back()) ||
            !approx_mat(node.state.cov, edge.cov_path.back()))
            return fail(node.id, "node state is not the edge endpoint");

        // Replay the risk allocation on the replayed trajectory.
        std::vector<Eigen::VectorXd> means(steer.mean_path.begin(),
                                           steer.mean_path.begin() + steps + 1);
        std::vector<Eigen::MatrixXd> covs(steer.cov_path.begin(),
                                          steer.cov_path.begin() + steps + 1);
        const SegmentEvaluation eval =
            params.allocation == Allocation::Era
                ? evaluate_segment_era(env, means, covs, parent.k_abs, params.inflation_radius)
                : evaluate_segment_ura(env, means, covs, parent.k_abs, params.inflation_radius,
                                       delta_uni, delta_uni);
        if (eval.valid_steps < steps)
            return fail(node.id, "replayed risk evaluation rejects the stored edge at step " +
                                     std::to_string(eval.valid_steps + 1));
        if (!approx_mat(eval.ledger.delta, edge.ledger.delta) ||
            !approx_mat(eval.ledger.kappa, edge.ledger.kappa))
            return fail(node.id, "stored risk matrices differ from replay");
        if (edge.ledger.cumulative.size() != static_cast<std::size_t>(steps))
            return fail(node.id, "cumulative risk vector has the wrong length");
        for (int k = 0; k < steps; ++k) {
            if (!approx(eval.ledger.cumulative[static_cast<std::size_t>(k)],
                        edge.ledger.cumulative[static_cast<std::size_t>(k)]))
                return fail(node.id, "stored cumulative risk differs from replay at step " +
                                         std::to_string(k + 1));
        }

        // Replay the admission decision and the stored bookkeeping.
        if (params.allocation == Allocation::Era) {
            const double dtot = eval.ledger.cumulative.back();
            if (!dr_feasible(dtot, steps, budget, parent.residual))
                return fail(node.id, "admission violates the relaxed risk budget");
            const double residual = residual_update(dtot, steps, budget, parent.residual);
            if (!approx(residual, node.residual))
                return fail(node.id, "stored residual differs from replay");
        } else {
            if (node.residual != 0.0)
                return fail(node.id, "uniform allocation nodes carry no residual");
        }
        const double cost = parent.cost_to_come + path_cost(steer, params.Q, params.R, steps);
        if (!approx(cost, node.cost_to_come))
            return fail(node.id, "stored cost-to-come differs from replay");
    }
    return AuditResult{};
}

}  // namespace drrt
