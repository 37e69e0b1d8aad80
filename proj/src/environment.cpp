#include "drrt/environment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "drrt/numeric.hpp"
#include "drrt/rng.hpp"

namespace drrt {

Eigen::VectorXd Obstacle::translation_at(int k) const {
    if (k < 0) throw std::invalid_argument("time index must be nonnegative");
    if (drift.size() > 0) return static_cast<double>(k) * drift;
    if (!schedule.empty()) {
        const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(k), schedule.size() - 1);
        return schedule[idx];
    }
    return Eigen::VectorXd::Zero(shape.dim());
}

bool Obstacle::has_location_uncertainty() const {
    return location_cov.size() > 0 && !location_cov.isZero(0.0);
}

void Obstacle::validate(int position_dim) const {
    shape.validate();
    if (shape.dim() != position_dim)
        throw std::invalid_argument("obstacle dimension does not match the workspace");
    if (drift.size() > 0 && !schedule.empty())
        throw std::invalid_argument("obstacle may have a drift or a schedule, not both");
    if (drift.size() > 0 && drift.size() != position_dim)
        throw std::invalid_argument("obstacle drift has the wrong dimension");
    for (const auto& c : schedule) {
        if (c.size() != position_dim)
            throw std::invalid_argument("obstacle schedule entry has the wrong dimension");
    }
    if (location_cov.size() > 0) {
        if (location_cov.rows() != position_dim || location_cov.cols() != position_dim)
            throw std::invalid_argument("obstacle location covariance must be d×d");
        if (!is_psd(location_cov))
            throw std::invalid_argument("obstacle location covariance must be symmetric PSD");
    }
}

void Environment::derive_sampling_bounds() {
    const int d = position_dim();
    sampling_lo = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    sampling_hi = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    for (const Halfspace& h : workspace.halfspaces) {
        // Axis-aligned rows give bounds directly.
        int nz = -1;
        bool axis = true;
        for (int i = 0; i < d; ++i) {
            if (h.a[i] != 0.0) {
                if (nz >= 0) {
                    axis = false;
                    break;
                }
                nz = i;
            }
        }
        if (!axis || nz < 0) continue;
        const double bound = h.b / h.a[nz];
        if (h.a[nz] > 0.0) {
            sampling_hi[nz] = std::min(sampling_hi[nz], bound);
        } else {
            sampling_lo[nz] = std::max(sampling_lo[nz], bound);
        }
    }
    const bool bounded = sampling_lo.allFinite() && sampling_hi.allFinite();
    if (!bounded && d == 2) {
        const auto verts = polytope_vertices_2d(workspace);
        if (verts.size() >= 3) {
            for (int i = 0; i < 2; ++i) {
                sampling_lo[i] = verts[0][i];
                sampling_hi[i] = verts[0][i];
            }
            for (const auto& v : verts) {
                for (int i = 0; i < 2; ++i) {
                    sampling_lo[i] = std::min(sampling_lo[i], v[i]);
                    sampling_hi[i] = std::max(sampling_hi[i], v[i]);
                }
            }
            return;
        }
    }
    if (!bounded)
        throw std::invalid_argument("workspace is unbounded in a sampled coordinate");
}

void Environment::validate() const {
    workspace.validate();
    goal.validate();
    const int d = position_dim();
    if (goal.dim() != d) throw std::invalid_argument("goal dimension does not match workspace");
    if (!input_set.halfspaces.empty()) input_set.validate();
    for (const Obstacle& obs : obstacles) obs.validate(d);
    if (sampling_lo.size() != d || sampling_hi.size() != d)
        throw std::invalid_argument("sampling bounds not derived");
    if (sample_velocity) {
        if (velocity_lo.size() == 0 || velocity_lo.size() != velocity_hi.size())
            throw std::invalid_argument("sample_velocity requires a velocity box");
        for (Eigen::Index i = 0; i < velocity_lo.size(); ++i) {
            if (!(velocity_lo[i] < velocity_hi[i]))
                throw std::invalid_argument("velocity box requires lo < hi per coordinate");
        }
    }
}

Polytope obstacle_at(const Obstacle& obs, int k) {
    if (obs.is_static()) return obs.shape;
    return obs.shape.translated(obs.translation_at(k));
}

Eigen::VectorXd sample_free(const Environment& env, int k, std::mt19937_64& rng, int state_dim,
                            int max_attempts) {
    const int d = env.position_dim();
    if (state_dim < d) throw std::invalid_argument("state dimension smaller than position dimension");
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Eigen::VectorXd pos(d);
        for (int i = 0; i < d; ++i) pos[i] = uniform(rng, env.sampling_lo[i], env.sampling_hi[i]);
        if (!env.workspace.contains(pos)) continue;
        if (mean_in_collision(env, pos, k)) continue;
        Eigen::VectorXd state = Eigen::VectorXd::Zero(state_dim);
        state.head(d) = pos;
        if (env.sample_velocity) {
            const int vd = static_cast<int>(env.velocity_lo.size());
            if (d + vd > state_dim)
                throw std::invalid_argument("velocity box does not fit the state dimension");
            for (int i = 0; i < vd; ++i)
                state[d + i] = uniform(rng, env.velocity_lo[i], env.velocity_hi[i]);
        }
        return state;
    }
    throw std::runtime_error("sample_free: no free sample found after " +
                             std::to_string(max_attempts) + " attempts (scenario infeasible?)");
}

bool mean_in_collision(const Environment& env, const Eigen::VectorXd& x, int k) {
    const int d = env.position_dim();
    if (x.size() < d) throw std::invalid_argument("point has fewer coordinates than positions");
    const Eigen::VectorXd pos = x.head(d);
    if (!env.workspace.contains(pos)) return true;
    for (const Obstacle& obs : env.obstacles) {
        if (obstacle_at(obs, k).contains(pos)) return true;
    }
    return false;
}

}  // namespace drrt
