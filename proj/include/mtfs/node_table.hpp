#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "mtfs/ops.hpp"

namespace mtfs {

// Extra state carried by trap nodes.
struct TrapInfo {
    std::uint32_t depth = 0;      // number of trap components below the anchor
    std::uint64_t anchor = 0;     // real directory hosting the trap
    std::string anchor_path;      // underlay-relative path of the anchor
};

struct Node {
    NodeRef ref;
    std::optional<TrapInfo> trap;
};

// Per-mount-session node registry. Ids are handed out from a monotonically
// increasing counter and are never persisted across remounts. Real underlay
// paths map to a stable id for the lifetime of the session.
class NodeTable {
public:
    NodeTable();

    std::uint64_t root() const { return kRootNodeId; }

    // Returns the existing id for a real path or registers a new node.
    std::uint64_t intern_real(const std::string& rel_path, NodeKind kind);

    std::uint64_t add_trap(std::uint32_t depth, std::uint64_t anchor,
                           const std::string& anchor_path);

    std::optional<Node> get(std::uint64_t id) const;

    // Drops a trap node id (real ids stay interned). No-op for unknown ids.
    void release_trap(std::uint64_t id);

    // Renames/unlinks invalidate the path cache for a subtree.
    void forget_path(const std::string& rel_path);

    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::uint64_t, Node> nodes_;
    std::unordered_map<std::string, std::uint64_t> by_path_;
    std::uint64_t next_id_;
};

} // namespace mtfs
