#include "drrt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drrt {

bool Polytope::contains(const Eigen::VectorXd& x) const {
    for (const Halfspace& h : halfspaces) {
        if (h.a.dot(x) > h.b) return false;
    }
    return true;
}

Polytope Polytope::translated(const Eigen::VectorXd& c) const {
    Polytope out = *this;
    for (Halfspace& h : out.halfspaces) h.b += h.a.dot(c);
    return out;
}

Polytope Polytope::inflated(double radius) const {
    if (radius == 0.0) return *this;
    Polytope out = *this;
    for (Halfspace& h : out.halfspaces) h.b += radius * h.a.norm();
    return out;
}

Polytope Polytope::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box bounds must match in size");
    Polytope p;
    const auto d = lo.size();
    p.halfspaces.reserve(2 * static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(lo[i] < hi[i])) throw std::invalid_argument("box requires lo < hi per coordinate");
        Halfspace upper;
        upper.a = Eigen::VectorXd::Zero(d);
        upper.a[i] = 1.0;
        upper.b = hi[i];
        Halfspace lower;
        lower.a = Eigen::VectorXd::Zero(d);
        lower.a[i] = -1.0;
        lower.b = -lo[i];
        p.halfspaces.push_back(std::move(lower));
        p.halfspaces.push_back(std::move(upper));
    }
    return p;
}

void Polytope::validate() const {
    if (halfspaces.empty()) throw std::invalid_argument("polytope has no halfspaces");
    const auto d = halfspaces[0].a.size();
    for (const Halfspace& h : halfspaces) {
        if (h.a.size() != d) throw std::invalid_argument("halfspace dimensions are inconsistent");
        if (h.a.norm() == 0.0) throw std::invalid_argument("halfspace has a zero normal vector");
    }
}

std::vector<Eigen::Vector2d> polytope_vertices_2d(const Polytope& p) {
    if (p.dim() != 2) throw std::invalid_argument("vertex enumeration requires a 2-D polytope");
    constexpr double kTol = 1e-9;
    std::vector<Eigen::Vector2d> verts;
    const auto& hs = p.halfspaces;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            Eigen::Matrix2d m;
            m.row(0) = hs[i].a.transpose();
            m.row(1) = hs[j].a.transpose();
            if (std::abs(m.determinant()) < 1e-12) continue;
            const Eigen::Vector2d v = m.inverse() * Eigen::Vector2d(hs[i].b, hs[j].b);
            bool inside = true;
            for (const Halfspace& h : hs) {
                if (h.a.dot(v) > h.b + kTol * (1.0 + std::abs(h.b))) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            bool duplicate = false;
            for (const auto& w : verts) {
                if ((w - v).norm() < 1e-7) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) verts.push_back(v);
        }
    }
    if (verts.size() < 3) return verts;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& v : verts) centroid += v;
    centroid /= static_cast<double>(verts.size());
    std::sort(verts.begin(), verts.end(), [&](const Eigen::Vector2d& u, const Eigen::Vector2d& w) {
        return std::atan2(u.y() - centroid.y(), u.x() - centroid.x()) <
               std::atan2(w.y() - centroid.y(), w.x() - centroid.x());
    });
    return verts;
}

}  // namespace drrt
