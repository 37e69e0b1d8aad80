#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drrt/environment.hpp"
#include "drrt/planner.hpp"

namespace drrt {

struct SvgOptions {
    double width_px = 800.0;
    bool draw_ellipses = true;  // 1-σ position ellipses at every node
};

// Deterministic SVG rendering of a planned tree: workspace boundary, goal
// region, obstacles at their initial position, edge mean trajectories as
// polylines, per-node 1-σ covariance ellipses and, when present, the best
// path to the goal. Element order and number formatting are fixed so
// identical runs produce byte-identical files.
std::string render_tree_svg(const Environment& env, const std::vector<TreeNode>& nodes,
                            const std::optional<std::vector<int>>& best_path = std::nullopt,
                            const SvgOptions& options = {});

}  // namespace drrt
