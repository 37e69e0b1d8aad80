#include "drrt/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace drrt {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

struct WorldToSvg {
    double min_x, max_y, scale, pad;

    double x(double wx) const { return pad + (wx - min_x) * scale; }
    double y(double wy) const { return pad + (max_y - wy) * scale; }
};

void polygon_element(std::ostringstream& out, const std::vector<Eigen::Vector2d>& verts,
                     const WorldToSvg& map, const char* style) {
    out << "<polygon points=\"";
    for (std::size_t i = 0; i < verts.size(); ++i) {
        if (i > 0) out << ' ';
        out << fmt(map.x(verts[i].x())) << ',' << fmt(map.y(verts[i].y()));
    }
    out << "\" " << style << "/>\n";
}

}  // namespace

std::string render_tree_svg(const Environment& env, const std::vector<TreeNode>& nodes,
                            const std::optional<std::vector<int>>& best_path,
                            const SvgOptions& options) {
    if (env.position_dim() != 2)
        throw std::invalid_argument("SVG rendering supports 2-D position environments only");

    const double min_x = env.sampling_lo[0];
    const double min_y = env.sampling_lo[1];
    const double max_x = env.sampling_hi[0];
    const double max_y = env.sampling_hi[1];
    const double pad = 10.0;
    const double scale = (options.width_px - 2.0 * pad) / std::max(max_x - min_x, 1e-9);
    const double height_px = 2.0 * pad + (max_y - min_y) * scale;
    const WorldToSvg map{min_x, max_y, scale, pad};

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(options.width_px)
        << "\" height=\"" << fmt(height_px) << "\" viewBox=\"0 0 " << fmt(options.width_px) << ' '
        << fmt(height_px) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(options.width_px) << "\" height=\""
        << fmt(height_px) << "\" fill=\"white\"/>\n";

    // Workspace boundary.
    const auto workspace_verts = polytope_vertices_2d(env.workspace);
    if (workspace_verts.size() >= 3)
        polygon_element(out, workspace_verts, map,
                        "fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"");

    // Goal region.
    const auto goal_verts = polytope_vertices_2d(env.goal);
    if (goal_verts.size() >= 3)
        polygon_element(out, goal_verts, map,
                        "fill=\"#ccf2cc\" stroke=\"#2e7d32\" stroke-width=\"1\"");

    // Obstacles at their initial position.
    for (const Obstacle& obs : env.obstacles) {
        const auto verts = polytope_vertices_2d(obstacle_at(obs, 0));
        if (verts.size() >= 3)
            polygon_element(out, verts, map,
                            "fill=\"#c62828\" fill-opacity=\"0.75\" stroke=\"#7f1d1d\" "
                            "stroke-width=\"0.5\"");
    }

    // Edge mean trajectories, in node id order.
    out << "<g stroke=\"#1565c0\" stroke-width=\"0.8\" fill=\"none\">\n";
    for (const TreeNode& node : nodes) {
        if (!node.edge) continue;
        out << "<polyline points=\"";
        const auto& path = node.edge->mean_path;
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i > 0) out << ' ';
            out << fmt(map.x(path[i][0])) << ',' << fmt(map.y(path[i][1]));
        }
        out << "\"/>\n";
    }
    out << "</g>\n";

    // 1-σ ellipses from the position block of each node covariance.
    if (options.draw_ellipses) {
        out << "<g fill=\"none\" stroke=\"#6a1b9a\" stroke-width=\"0.6\">\n";
        for (const TreeNode& node : nodes) {
            const Eigen::Matrix2d p = node.state.cov.topLeftCorner(2, 2);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (p + p.transpose()));
            const double r_minor = std::sqrt(std::max(es.eigenvalues()[0], 0.0)) * scale;
            const double r_major = std::sqrt(std::max(es.eigenvalues()[1], 0.0)) * scale;
            const Eigen::Vector2d axis = es.eigenvectors().col(1);
            // World angle is CCW; the y-flip makes it CW in image coordinates.
            const double angle_deg = -std::atan2(axis.y(), axis.x()) * 180.0 / M_PI;
            const double cx = map.x(node.state.mean[0]);
            const double cy = map.y(node.state.mean[1]);
            out << "<ellipse cx=\"0\" cy=\"0\" rx=\"" << fmt(r_major) << "\" ry=\"" << fmt(r_minor)
                << "\" transform=\"translate(" << fmt(cx) << ' ' << fmt(cy) << ") rotate("
                << fmt(angle_deg) << ")\"/>\n";
        }
        out << "</g>\n";
    }

    // Best path to the goal, if one was found.
    if (best_path && best_path->size() >= 2) {
        out << "<polyline fill=\"none\" stroke=\"#ef6c00\" stroke-width=\"2.2\" points=\"";
        bool first = true;
        for (int id : *best_path) {
            const TreeNode& node = nodes[static_cast<std::size_t>(id)];
            if (!node.edge) {
                if (!first) out << ' ';
                out << fmt(map.x(node.state.mean[0])) << ',' << fmt(map.y(node.state.mean[1]));
                first = false;
                continue;
            }
            const auto& path = node.edge->mean_path;
            for (std::size_t i = 1; i < path.size(); ++i) {
                if (!first) out << ' ';
                out << fmt(map.x(path[i][0])) << ',' << fmt(map.y(path[i][1]));
                first = false;
            }
        }
        out << "\"/>\n";
    }

    // Root marker.
    if (!nodes.empty()) {
        out << "<circle cx=\"" << fmt(map.x(nodes[0].state.mean[0])) << "\" cy=\""
            << fmt(map.y(nodes[0].state.mean[1])) << "\" r=\"3\" fill=\"#000000\"/>\n";
    }

    out << "</svg>\n";
    return out.str();
}

}  // namespace drrt
