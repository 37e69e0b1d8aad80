#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "drrt/dynamics.hpp"
#include "drrt/scenario.hpp"

namespace testutil {

inline double urand(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = urand(rng, lo, hi);
    return v;
}

// Random symmetric PSD matrix G Gᵀ scaled to roughly `scale` magnitude.
inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n, double scale) {
    Eigen::MatrixXd g(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) g(r, c) = urand(rng, -1.0, 1.0);
    }
    return scale * (g * g.transpose());
}

// The desk-scale double-integrator system used throughout (dt = 0.1).
inline drrt::StochasticLinearSystem desk_system() {
    return drrt::generate_scenario(0, 0).system;
}

// Naive O(n³) loops for (A+BK) S (A+BK)ᵀ + Σw; independent of the Eigen
// expression path used by the implementation.
inline Eigen::MatrixXd naive_cov_step(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      const Eigen::MatrixXd& K, const Eigen::MatrixXd& S,
                                      const Eigen::MatrixXd& Sw) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd closed(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double sum = A(r, c);
            for (int t = 0; t < B.cols(); ++t) sum += B(r, t) * K(t, c);
            closed(r, c) = sum;
        }
    }
    Eigen::MatrixXd tmp(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double sum = 0.0;
            for (int t = 0; t < n; ++t) sum += closed(r, t) * S(t, c);
            tmp(r, c) = sum;
        }
    }
    Eigen::MatrixXd out(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double sum = Sw(r, c);
            for (int t = 0; t < n; ++t) sum += tmp(r, t) * closed(c, t);
            out(r, c) = sum;
        }
    }
    return out;
}

// Minimal XML well-formedness scan: tag balance, attribute quoting, no stray
// '<' or '>'. Enough to catch structurally broken SVG output.
bool xml_well_formed(const std::string& text, std::string* why = nullptr);

}  // namespace testutil
