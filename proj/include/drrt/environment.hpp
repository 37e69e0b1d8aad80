#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "drrt/geometry.hpp"

namespace drrt {

// Polytopic obstacle with a known nominal translation schedule and an
// (optional) location covariance for its stochastic drift. Geometry lives in
// position coordinates.
struct Obstacle {
    Polytope shape;  // O_i^0

    // Nominal translation ĉ_{ik}. At most one of the two may be set:
    //   drift non-empty    -> ĉ_k = k · drift
    //   schedule non-empty -> ĉ_k = schedule[min(k, size-1)]
    // neither               -> static obstacle, ĉ_k = 0.
    Eigen::VectorXd drift;
    std::vector<Eigen::VectorXd> schedule;

    // Σ^c applied to every hyperplane of this obstacle; zero for
    // deterministic obstacles.
    Eigen::MatrixXd location_cov;

    Eigen::VectorXd translation_at(int k) const;
    bool is_static() const { return drift.size() == 0 && schedule.empty(); }
    bool has_location_uncertainty() const;

    void validate(int position_dim) const;
};

// World model: workspace X, input set U, obstacles, goal region. Workspace,
// goal and obstacles live in the position coordinates (the leading
// `position_dim()` entries of the state).
struct Environment {
    Polytope workspace;  // X
    Polytope input_set;  // U; empty halfspace list = unconstrained
    std::vector<Obstacle> obstacles;
    Polytope goal;  // X_goal
    bool env_probabilistic = false;

    // Axis-aligned sampling bounds covering the workspace, derived at load.
    Eigen::VectorXd sampling_lo;
    Eigen::VectorXd sampling_hi;

    // When true, sampled targets carry a uniform velocity drawn from
    // [velocity_lo, velocity_hi]; otherwise target velocities are zero.
    bool sample_velocity = false;
    Eigen::VectorXd velocity_lo;
    Eigen::VectorXd velocity_hi;

    int position_dim() const { return workspace.dim(); }
    int obstacle_count() const { return static_cast<int>(obstacles.size()); }
    int workspace_face_count() const { return static_cast<int>(workspace.halfspaces.size()); }

    // Fills sampling_lo/hi from the workspace polytope. Boxes are read off
    // the axis-aligned rows directly; other 2-D polytopes fall back to vertex
    // enumeration. Throws if the workspace is unbounded in some coordinate.
    void derive_sampling_bounds();

    void validate() const;
};

// Nominal obstacle polytope at time k: the base shape translated by ĉ_{ik}.
// The stochastic location term enters only through Σ^c in the tightening.
Polytope obstacle_at(const Obstacle& obs, int k);

// Rejection-samples a state whose position is uniform on the workspace and
// outside every nominal obstacle at time k. Velocities are zero unless the
// environment requests sampled velocities. Deterministic given the rng state.
// Throws std::runtime_error after `max_attempts` rejected draws.
Eigen::VectorXd sample_free(const Environment& env, int k, std::mt19937_64& rng, int state_dim,
                            int max_attempts = 10000);

// True iff the position block of x lies inside any nominal obstacle at time k
// or outside the workspace. Accepts a full state or a bare position vector.
bool mean_in_collision(const Environment& env, const Eigen::VectorXd& x, int k);

}  // namespace drrt
