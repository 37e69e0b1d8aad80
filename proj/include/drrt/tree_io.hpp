#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drrt/planner.hpp"

namespace drrt {

// Line-delimited tree dump: one meta record followed by one record per node,
// in id order, with a fixed field ordering so identical runs produce
// byte-identical files. The meta record carries the effective planner
// configuration so an audit can replay the run from the dump plus the
// scenario file alone.
struct TreeDumpMeta {
    std::uint64_t seed = 0;
    PlannerParams params;
};

std::string dump_tree_jsonl(const TreeDumpMeta& meta, const std::vector<TreeNode>& nodes);

struct TreeDump {
    TreeDumpMeta meta;
    std::vector<TreeNode> nodes;
};

// Parses a dump produced by dump_tree_jsonl; Q and R dimensions are taken
// from the records themselves. Throws std::invalid_argument on malformed
// input (including truncation).
TreeDump parse_tree_jsonl(const std::string& text);
TreeDump parse_tree_jsonl_file(const std::string& path);

}  // namespace drrt
