#pragma once

#include <Eigen/Dense>
#include <vector>

namespace drrt {

// Single linear constraint aᵀx <= b.
struct Halfspace {
    Eigen::VectorXd a;
    double b = 0.0;
};

// Intersection of halfspaces; membership is the conjunction of all rows.
// An empty halfspace list denotes the whole space (used for an unconstrained
// input set); scenario files may not declare empty polytopes.
struct Polytope {
    std::vector<Halfspace> halfspaces;

    bool contains(const Eigen::VectorXd& x) const;

    // Rigid translation by c: offsets become b + aᵀc, normals unchanged.
    Polytope translated(const Eigen::VectorXd& c) const;

    // Outward offset of every face by `radius` (b += radius·‖a‖); used to
    // grow obstacles by a robot radius.
    Polytope inflated(double radius) const;

    int dim() const { return halfspaces.empty() ? 0 : static_cast<int>(halfspaces[0].a.size()); }

    // Axis-aligned box lo <= x <= hi as 2·d halfspaces.
    static Polytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

    // Throws std::invalid_argument on zero normals, mixed dimensions, or an
    // empty halfspace list.
    void validate() const;
};

// Vertices of a bounded 2-D polytope in counter-clockwise order, obtained by
// intersecting face pairs and filtering. Rendering support only.
std::vector<Eigen::Vector2d> polytope_vertices_2d(const Polytope& p);

}  // namespace drrt
