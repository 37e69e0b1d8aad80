#include "drrt/numeric.hpp"

#include <stdexcept>

namespace drrt {

namespace {

Eigen::VectorXd clamped_eigenvalues(const Eigen::VectorXd& evals) {
    Eigen::VectorXd out = evals;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (out[i] < -kPsdTol) {
            throw std::invalid_argument("matrix is not positive semidefinite (eigenvalue " +
                                        std::to_string(out[i]) + ")");
        }
        if (out[i] < 0.0) out[i] = 0.0;
    }
    return out;
}

}  // namespace

bool is_psd(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) return false;
    if (!m.isApprox(m.transpose(), 1e-9)) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m));
    return es.eigenvalues().minCoeff() >= -tol;
}

PsdSqrt::PsdSqrt(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(s));
    const Eigen::VectorXd evals = clamped_eigenvalues(es.eigenvalues());
    factor_ = evals.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(s));
    const Eigen::VectorXd evals = clamped_eigenvalues(es.eigenvalues());
    return es.eigenvectors() * evals.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace drrt
