#include "drrt/risk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "drrt/numeric.hpp"

namespace drrt {

namespace {

void require_risk_open_interval(double r, const char* name) {
    if (!(r > 0.0 && r < 1.0)) {
        throw std::domain_error(std::string(name) + " must lie in (0, 1), got " +
                                std::to_string(r));
    }
}

// Largest normalized margin over the obstacle's faces, given a cached
// covariance factor. Zero-variance faces with positive raw margin are safe
// with certainty and dominate every finite margin.
std::optional<double> era_obstacle_risk_impl(const Eigen::VectorXd& pos, const Polytope& obstacle,
                                             const PsdSqrt& chol) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Halfspace& face : obstacle.halfspaces) {
        const double margin = face.a.dot(pos) - face.b;
        const double denom = chol.norm(face.a);
        if (denom == 0.0) {
            if (margin > 0.0) return 0.0;
            continue;
        }
        best = std::max(best, margin / denom);
    }
    if (!(best > 0.0)) return std::nullopt;
    return 1.0 / (1.0 + best * best);
}

std::optional<double> era_env_risk_impl(const Eigen::VectorXd& pos, const Halfspace& face,
                                        const PsdSqrt& chol) {
    const double slack = face.b - face.a.dot(pos);
    const double denom = chol.norm(face.a);
    if (denom == 0.0) return slack > 0.0 ? std::optional<double>(0.0) : std::nullopt;
    const double s = slack / denom;
    if (!(s > 0.0)) return std::nullopt;
    return 1.0 / (1.0 + s * s);
}

// Effective obstacle polytopes for one segment: static shapes are translated
// and inflated once, moving ones per step.
struct EffectiveObstacles {
    const Environment& env;
    double inflation;
    std::vector<Polytope> static_shape;

    EffectiveObstacles(const Environment& e, double radius) : env(e), inflation(radius) {
        static_shape.resize(env.obstacles.size());
        for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
            if (env.obstacles[i].is_static())
                static_shape[i] = env.obstacles[i].shape.inflated(inflation);
        }
    }

    Polytope at(std::size_t i, int k_abs) const {
        if (env.obstacles[i].is_static()) return static_shape[i];
        return obstacle_at(env.obstacles[i], k_abs).inflated(inflation);
    }
};

enum class Mode { Era, Ura };

SegmentEvaluation evaluate_segment(const Environment& env,
                                   const std::vector<Eigen::VectorXd>& mean_path,
                                   const std::vector<Eigen::MatrixXd>& cov_path, int k_start,
                                   double inflation_radius, Mode mode, double delta_uni,
                                   double kappa_uni) {
    if (mean_path.size() != cov_path.size() || mean_path.size() < 2)
        throw std::invalid_argument("segment paths must have matching length >= 2");
    const int horizon = static_cast<int>(mean_path.size()) - 1;
    const int d = env.position_dim();
    const int n_obs = env.obstacle_count();
    const int n_env = env.workspace_face_count();

    SegmentEvaluation out;
    out.ledger.delta = Eigen::MatrixXd::Zero(n_obs, horizon);
    out.ledger.kappa = Eigen::MatrixXd::Zero(n_env, horizon);

    const EffectiveObstacles shapes(env, inflation_radius);
    const double ura_factor_obs =
        mode == Mode::Ura ? std::sqrt((1.0 - delta_uni) / delta_uni) : 0.0;
    const double ura_factor_env =
        (mode == Mode::Ura && env.env_probabilistic) ? std::sqrt((1.0 - kappa_uni) / kappa_uni)
                                                     : 0.0;

    for (int k = 1; k <= horizon; ++k) {
        const Eigen::VectorXd pos = mean_path[k].head(d);
        const Eigen::MatrixXd sigma_pos = symmetrized(cov_path[k].topLeftCorner(d, d));
        const PsdSqrt base(sigma_pos);

        bool step_ok = true;
        for (int i = 0; i < n_obs && step_ok; ++i) {
            const Polytope poly = shapes.at(static_cast<std::size_t>(i), k_start + k);
            const bool extra_cov = env.obstacles[static_cast<std::size_t>(i)].has_location_uncertainty();
            const PsdSqrt with_loc =
                extra_cov ? PsdSqrt(sigma_pos + env.obstacles[static_cast<std::size_t>(i)].location_cov)
                          : base;
            const PsdSqrt& chol = extra_cov ? with_loc : base;
            if (mode == Mode::Era) {
                const auto risk = era_obstacle_risk_impl(pos, poly, chol);
                if (!risk) {
                    out.first_failure = CellRef{CellRef::Kind::Obstacle, i, k};
                    step_ok = false;
                    break;
                }
                out.ledger.delta(i, k - 1) = *risk;
            } else {
                // Uniform allocation: the h-predicate with δ_uni on every face.
                bool outside = false;
                for (const Halfspace& face : poly.halfspaces) {
                    if (face.a.dot(pos) - face.b >= ura_factor_obs * chol.norm(face.a)) {
                        outside = true;
                        break;
                    }
                }
                if (!outside) {
                    out.first_failure = CellRef{CellRef::Kind::Obstacle, i, k};
                    step_ok = false;
                    break;
                }
                out.ledger.delta(i, k - 1) = delta_uni;
            }
        }
        if (step_ok) {
            if (env.env_probabilistic) {
                for (int j = 0; j < n_env; ++j) {
                    const Halfspace& face = env.workspace.halfspaces[static_cast<std::size_t>(j)];
                    if (mode == Mode::Era) {
                        const auto risk = era_env_risk_impl(pos, face, base);
                        if (!risk) {
                            out.first_failure = CellRef{CellRef::Kind::Workspace, j, k};
                            step_ok = false;
                            break;
                        }
                        out.ledger.kappa(j, k - 1) = *risk;
                    } else {
                        if (!(face.a.dot(pos) <= face.b - ura_factor_env * base.norm(face.a))) {
                            out.first_failure = CellRef{CellRef::Kind::Workspace, j, k};
                            step_ok = false;
                            break;
                        }
                        out.ledger.kappa(j, k - 1) = kappa_uni;
                    }
                }
            } else {
                // Deterministic workspace treatment: plain membership.
                for (int j = 0; j < n_env; ++j) {
                    const Halfspace& face = env.workspace.halfspaces[static_cast<std::size_t>(j)];
                    if (face.a.dot(pos) > face.b) {
                        out.first_failure = CellRef{CellRef::Kind::Workspace, j, k};
                        step_ok = false;
                        break;
                    }
                }
            }
        }
        if (!step_ok) break;
        out.valid_steps = k;
    }

    // The ledger covers exactly the valid prefix.
    out.ledger.delta.conservativeResize(n_obs, out.valid_steps);
    out.ledger.kappa.conservativeResize(n_env, out.valid_steps);
    out.ledger.recompute_cumulative();
    return out;
}

}  // namespace

Budget::Budget(double delta_total, int total_horizon_steps, int steer_horizon_steps)
    : delta(delta_total), total_horizon(total_horizon_steps), steer_horizon(steer_horizon_steps) {
    if (!(delta > 0.0 && delta <= 0.5))
        throw std::invalid_argument("total risk budget must lie in (0, 0.5]");
    if (total_horizon < 1) throw std::invalid_argument("planning horizon must be >= 1");
    if (steer_horizon < 1 || steer_horizon > total_horizon)
        throw std::invalid_argument("steering horizon must lie in [1, T]");
    delta_steer = steering_budget(delta, total_horizon, steer_horizon);
}

double Budget::delta_k(int k) const {
    if (k < 0 || k > steer_horizon)
        throw std::invalid_argument("prefix step outside the steering horizon");
    if (k == steer_horizon) return delta_steer;
    return static_cast<double>(k) * delta_steer / static_cast<double>(steer_horizon);
}

void RiskLedger::recompute_cumulative() {
    const int horizon = steps();
    cumulative.assign(static_cast<std::size_t>(horizon), 0.0);
    double total = 0.0;
    for (int k = 0; k < horizon; ++k) {
        for (Eigen::Index i = 0; i < delta.rows(); ++i) total += delta(i, k);
        for (Eigen::Index j = 0; j < kappa.rows(); ++j) total += kappa(j, k);
        cumulative[static_cast<std::size_t>(k)] = total;
    }
}

RiskLedger RiskLedger::prefix(int k) const {
    if (k < 0 || k > steps()) throw std::invalid_argument("ledger prefix out of range");
    RiskLedger out;
    out.delta = delta.leftCols(k);
    out.kappa = kappa.leftCols(k);
    out.cumulative.assign(cumulative.begin(), cumulative.begin() + k);
    return out;
}

double tightening_obstacle(const Eigen::VectorXd& a, const Eigen::MatrixXd& sigma_x,
                           const Eigen::MatrixXd& sigma_c, double delta) {
    require_risk_open_interval(delta, "obstacle risk delta");
    const PsdSqrt chol(sigma_c.size() > 0 ? Eigen::MatrixXd(sigma_x + sigma_c) : sigma_x);
    return std::sqrt((1.0 - delta) / delta) * chol.norm(a);
}

double tightening_env(const Eigen::VectorXd& a, const Eigen::MatrixXd& sigma_x, double kappa) {
    require_risk_open_interval(kappa, "workspace risk kappa");
    return std::sqrt((1.0 - kappa) / kappa) * PsdSqrt(sigma_x).norm(a);
}

bool check_h(const Eigen::VectorXd& mean_pos, const Polytope& obstacle,
             const Eigen::MatrixXd& sigma_pos, const Eigen::MatrixXd& sigma_c, double delta) {
    require_risk_open_interval(delta, "obstacle risk delta");
    const PsdSqrt chol(sigma_c.size() > 0 ? Eigen::MatrixXd(sigma_pos + sigma_c) : sigma_pos);
    const double factor = std::sqrt((1.0 - delta) / delta);
    for (const Halfspace& face : obstacle.halfspaces) {
        if (face.a.dot(mean_pos) - face.b >= factor * chol.norm(face.a)) return true;
    }
    return false;
}

bool check_g(const Eigen::VectorXd& mean_pos, const Halfspace& face,
             const Eigen::MatrixXd& sigma_pos, double kappa) {
    require_risk_open_interval(kappa, "workspace risk kappa");
    const double eta = std::sqrt((1.0 - kappa) / kappa) * PsdSqrt(sigma_pos).norm(face.a);
    return face.a.dot(mean_pos) <= face.b - eta;
}

std::optional<double> era_obstacle_risk(const Eigen::VectorXd& mean_pos, const Polytope& obstacle,
                                        const Eigen::MatrixXd& sigma_pos,
                                        const Eigen::MatrixXd& sigma_c) {
    const PsdSqrt chol(sigma_c.size() > 0 ? Eigen::MatrixXd(sigma_pos + sigma_c) : sigma_pos);
    return era_obstacle_risk_impl(mean_pos, obstacle, chol);
}

std::optional<double> era_env_risk(const Eigen::VectorXd& mean_pos, const Halfspace& face,
                                   const Eigen::MatrixXd& sigma_pos) {
    return era_env_risk_impl(mean_pos, face, PsdSqrt(sigma_pos));
}

SegmentEvaluation evaluate_segment_era(const Environment& env,
                                       const std::vector<Eigen::VectorXd>& mean_path,
                                       const std::vector<Eigen::MatrixXd>& cov_path, int k_start,
                                       double inflation_radius) {
    return evaluate_segment(env, mean_path, cov_path, k_start, inflation_radius, Mode::Era, 0.0,
                            0.0);
}

SegmentEvaluation evaluate_segment_ura(const Environment& env,
                                       const std::vector<Eigen::VectorXd>& mean_path,
                                       const std::vector<Eigen::MatrixXd>& cov_path, int k_start,
                                       double inflation_radius, double delta_uni,
                                       double kappa_uni) {
    require_risk_open_interval(delta_uni, "uniform obstacle risk");
    if (env.env_probabilistic) require_risk_open_interval(kappa_uni, "uniform workspace risk");
    return evaluate_segment(env, mean_path, cov_path, k_start, inflation_radius, Mode::Ura,
                            delta_uni, kappa_uni);
}

AllocationResult exact_risk_allocation(const Environment& env,
                                       const std::vector<Eigen::VectorXd>& mean_path,
                                       const std::vector<Eigen::MatrixXd>& cov_path, int k_start,
                                       double inflation_radius) {
    SegmentEvaluation eval =
        evaluate_segment_era(env, mean_path, cov_path, k_start, inflation_radius);
    AllocationResult out;
    out.feasible = eval.full(static_cast<int>(mean_path.size()) - 1);
    if (out.feasible) {
        out.ledger = std::move(eval.ledger);
    } else {
        out.first_failure = *eval.first_failure;
    }
    return out;
}

double uniform_risk_allocation(double delta, int total_horizon, int rows_per_step) {
    if (total_horizon < 1 || rows_per_step < 1)
        throw std::invalid_argument("uniform allocation requires positive horizon and row count");
    return delta / (static_cast<double>(total_horizon) * static_cast<double>(rows_per_step));
}

double steering_budget(double delta, int total_horizon, int steer_horizon) {
    if (steer_horizon < 1 || steer_horizon > total_horizon)
        throw std::invalid_argument("steering horizon must lie in [1, T]");
    return delta * static_cast<double>(steer_horizon) / static_cast<double>(total_horizon);
}

bool dr_feasible(double delta_tot_k, int k, const Budget& budget, double residual_parent) {
    return delta_tot_k <= budget.delta_k(k) + residual_parent;
}

double residual_update(double delta_tot_k, int k, const Budget& budget, double residual_parent) {
    const double residual = budget.delta_k(k) + residual_parent - delta_tot_k;
    if (residual < 0.0)
        throw std::invalid_argument("residual_update called on an infeasible segment");
    return residual;
}

}  // namespace drrt
