#include "drrt/dynamics.hpp"

#include <stdexcept>

#include "drrt/numeric.hpp"

namespace drrt {

void StochasticLinearSystem::validate() const {
    const auto n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("A must be square");
    if (B.rows() != n) throw std::invalid_argument("B row count must match state dimension");
    if (B.cols() < 1) throw std::invalid_argument("B must have at least one input column");
    if (sigma_w.rows() != n || sigma_w.cols() != n)
        throw std::invalid_argument("Sigma_w must be n×n");
    if (sigma_x0.rows() != n || sigma_x0.cols() != n)
        throw std::invalid_argument("Sigma_x0 must be n×n");
    if (x0_mean.size() != n) throw std::invalid_argument("x0_mean must have length n");
    if (!is_psd(sigma_w)) throw std::invalid_argument("Sigma_w must be symmetric PSD");
    if (!is_psd(sigma_x0)) throw std::invalid_argument("Sigma_x0 must be symmetric PSD");
}

MomentState propagate_moments(const StochasticLinearSystem& sys, const Eigen::MatrixXd& K,
                              const Eigen::VectorXd& g, const MomentState& s) {
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    if (K.rows() != m || K.cols() != n || g.size() != m || s.mean.size() != n ||
        s.cov.rows() != n || s.cov.cols() != n) {
        throw std::invalid_argument("propagate_moments: inconsistent dimensions");
    }
    const Eigen::MatrixXd closed = sys.A + sys.B * K;
    MomentState out;
    out.mean = closed * s.mean + sys.B * g;
    out.cov = symmetrized(closed * s.cov * closed.transpose() + sys.sigma_w);
    out.k = s.k + 1;
    return out;
}

RiccatiSolution solve_riccati(const StochasticLinearSystem& sys, int horizon,
                              const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    if (horizon < 1) throw std::invalid_argument("steering horizon must be >= 1");
    if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("Q must be n×n");
    if (R.rows() != m || R.cols() != m) throw std::invalid_argument("R must be m×m");
    if (!is_psd(Q)) throw std::invalid_argument("Q must be symmetric PSD");
    Eigen::LLT<Eigen::MatrixXd> r_llt(symmetrized(R));
    if (r_llt.info() != Eigen::Success) throw std::invalid_argument("R must be positive definite");

    RiccatiSolution sol;
    sol.gains.resize(horizon);
    Eigen::MatrixXd P = Q;  // terminal weight
    for (int k = horizon - 1; k >= 0; --k) {
        const Eigen::MatrixXd BtP = sys.B.transpose() * P;
        const Eigen::MatrixXd gain_den = symmetrized(R + BtP * sys.B);
        const Eigen::MatrixXd K = -gain_den.llt().solve(BtP * sys.A);
        const Eigen::MatrixXd closed = sys.A + sys.B * K;
        P = symmetrized(Q + K.transpose() * R * K + closed.transpose() * P * closed);
        sol.gains[k] = K;
    }
    sol.cost_matrix = P;
    return sol;
}

SteeringResult lqr_steer(const StochasticLinearSystem& sys, const MomentState& source,
                         const Eigen::VectorXd& target, const RiccatiSolution& riccati,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
    if (target.size() != sys.state_dim())
        throw std::invalid_argument("steering target must have state dimension");
    const int horizon = static_cast<int>(riccati.gains.size());

    SteeringResult out;
    out.gains = riccati.gains;
    out.target = target;
    out.feedforward.resize(horizon);
    out.mean_path.reserve(horizon + 1);
    out.cov_path.reserve(horizon + 1);
    out.mean_path.push_back(source.mean);
    out.cov_path.push_back(source.cov);

    MomentState state = source;
    for (int k = 0; k < horizon; ++k) {
        out.feedforward[k] = -riccati.gains[k] * target;
        state = propagate_moments(sys, riccati.gains[k], out.feedforward[k], state);
        out.mean_path.push_back(state.mean);
        out.cov_path.push_back(state.cov);
    }
    out.cost = path_cost(out, Q, R, horizon);
    return out;
}

SteeringResult lqr_steer(const StochasticLinearSystem& sys, const MomentState& source,
                         const Eigen::VectorXd& target, int horizon, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& R) {
    return lqr_steer(sys, source, target, solve_riccati(sys, horizon, Q, R), Q, R);
}

double cost_to_go(const StochasticLinearSystem& sys, const MomentState& source,
                  const Eigen::VectorXd& target, int horizon, const Eigen::MatrixXd& Q,
                  const Eigen::MatrixXd& R) {
    const RiccatiSolution sol = solve_riccati(sys, horizon, Q, R);
    const Eigen::VectorXd e0 = source.mean - target;
    return e0.dot(sol.cost_matrix * e0);
}

double path_cost(const SteeringResult& result, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                 int steps) {
    if (steps < 0 || steps > result.steps())
        throw std::invalid_argument("path_cost: steps out of range");
    double cost = 0.0;
    for (int t = 0; t < steps; ++t) {
        const Eigen::VectorXd e = result.mean_path[t] - result.target;
        const Eigen::VectorXd u = result.gains[t] * e;
        cost += e.dot(Q * e) + u.dot(R * u);
    }
    const Eigen::VectorXd e_end = result.mean_path[steps] - result.target;
    cost += e_end.dot(Q * e_end);
    return cost;
}

}  // namespace drrt
