#pragma once

#include <Eigen/Dense>

namespace drrt {

// Eigenvalues of a covariance in [-kPsdTol, 0) are treated as round-off and
// clamped to zero; anything more negative is rejected as genuinely indefinite.
inline constexpr double kPsdTol = 1e-9;

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

// Symmetric PSD check with the drift tolerance above.
bool is_psd(const Eigen::MatrixXd& m, double tol = kPsdTol);

// Factor F of a PSD matrix with Fᵀ F = S, computed by symmetric
// eigendecomposition with clamped eigenvalues. Cached by risk evaluation so
// the decomposition runs once per covariance, not once per hyperplane.
class PsdSqrt {
public:
    explicit PsdSqrt(const Eigen::MatrixXd& s);

    // ‖S^{1/2} a‖₂ = ‖F a‖₂
    double norm(const Eigen::VectorXd& a) const { return (factor_ * a).norm(); }

    const Eigen::MatrixXd& factor() const { return factor_; }

private:
    Eigen::MatrixXd factor_;  // Λ^{1/2} Vᵀ
};

// Symmetric PSD square root (S^{1/2} = V Λ^{1/2} Vᵀ).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s);

}  // namespace drrt
