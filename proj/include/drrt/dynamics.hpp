#pragma once

#include <Eigen/Dense>
#include <vector>

namespace drrt {

// Discrete-time stochastic LTI model x_{k+1} = A x_k + B u_k + w_k, with the
// noise and initial state known only through their first two moments.
struct StochasticLinearSystem {
    Eigen::MatrixXd A;         // n×n
    Eigen::MatrixXd B;         // n×m
    Eigen::MatrixXd sigma_w;   // n×n noise covariance
    Eigen::VectorXd x0_mean;   // n
    Eigen::MatrixXd sigma_x0;  // n×n initial covariance
    double dt = 0.0;           // step duration in seconds, metadata only

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }

    // Throws std::invalid_argument on inconsistent dimensions or
    // non-PSD covariances.
    void validate() const;
};

// Mean and covariance of the state distribution at time index k. Covariances
// are explicitly symmetrized after every propagation step.
struct MomentState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    int k = 0;
};

// Affine steering policy u_k = K_k x_k + g_k over one horizon, together with
// the moment trajectory it induces and its quadratic cost on the mean path.
struct SteeringResult {
    std::vector<Eigen::MatrixXd> gains;        // K_0 .. K_{Ts-1}
    std::vector<Eigen::VectorXd> feedforward;  // g_k = -K_k * target
    std::vector<Eigen::VectorXd> mean_path;    // Ts+1 entries, [0] = source mean
    std::vector<Eigen::MatrixXd> cov_path;     // Ts+1 entries, [0] = source cov
    Eigen::VectorXd target;
    double cost = 0.0;

    int steps() const { return static_cast<int>(mean_path.size()) - 1; }
};

// One step of mean/covariance propagation under u = K x + g:
//   mean'  = (A + B K) mean + B g
//   cov'   = (A + B K) cov (A + B K)ᵀ + Σ_w   (symmetrized)
MomentState propagate_moments(const StochasticLinearSystem& sys, const Eigen::MatrixXd& K,
                              const Eigen::VectorXd& g, const MomentState& s);

// Backward Riccati pass for the finite-horizon tracking problem on the error
// e_k = x_k - target, terminal weight Q. The gains depend only on
// (A, B, Q, R, horizon), never on the boundary states, so one solve serves
// every steering call with the same horizon.
struct RiccatiSolution {
    std::vector<Eigen::MatrixXd> gains;  // K_0 .. K_{Ts-1}
    Eigen::MatrixXd cost_matrix;         // P_0; optimal cost is e_0ᵀ P_0 e_0
};

RiccatiSolution solve_riccati(const StochasticLinearSystem& sys, int horizon,
                              const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

// Steers toward a constant target over `horizon` steps with the affine LQR
// policy (g_k = -K_k * target). The trajectory never depends on any risk
// quantity.
SteeringResult lqr_steer(const StochasticLinearSystem& sys, const MomentState& source,
                         const Eigen::VectorXd& target, int horizon, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& R);

// Hot-path variant with a precomputed Riccati solution for the same horizon.
SteeringResult lqr_steer(const StochasticLinearSystem& sys, const MomentState& source,
                         const Eigen::VectorXd& target, const RiccatiSolution& riccati,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

// Optimal tracking cost e_0ᵀ P_0 e_0 from the same recursion; used as the
// tree's nearest-neighbor distance.
double cost_to_go(const StochasticLinearSystem& sys, const MomentState& source,
                  const Eigen::VectorXd& target, int horizon, const Eigen::MatrixXd& Q,
                  const Eigen::MatrixXd& R);

// Quadratic objective of a steering result evaluated on its mean path and
// truncated after `steps` steps: stage terms for t < steps plus the
// terminal-style Q term at `steps`. steps == result.steps() gives the full
// objective (== SteeringResult::cost).
double path_cost(const SteeringResult& result, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                 int steps);

}  // namespace drrt
