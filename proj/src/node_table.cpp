#include "mtfs/node_table.hpp"

namespace mtfs {

NodeTable::NodeTable() : next_id_(kRootNodeId + 1) {
    Node root;
    root.ref.id = kRootNodeId;
    root.ref.kind = NodeKind::RealDir;
    root.ref.underlay_path = "";
    nodes_.emplace(kRootNodeId, root);
    by_path_.emplace("", kRootNodeId);
}

std::uint64_t NodeTable::intern_real(const std::string& rel_path, NodeKind kind) {
    std::lock_guard lock(mu_);
    if (auto it = by_path_.find(rel_path); it != by_path_.end()) {
        nodes_[it->second].ref.kind = kind; // kind can change if path was recycled
        return it->second;
    }
    std::uint64_t id = next_id_++;
    Node n;
    n.ref.id = id;
    n.ref.kind = kind;
    n.ref.underlay_path = rel_path;
    nodes_.emplace(id, n);
    by_path_.emplace(rel_path, id);
    return id;
}

std::uint64_t NodeTable::add_trap(std::uint32_t depth, std::uint64_t anchor,
                                  const std::string& anchor_path) {
    std::lock_guard lock(mu_);
    std::uint64_t id = next_id_++;
    Node n;
    n.ref.id = id;
    n.ref.kind = NodeKind::TrapDir;
    n.trap = TrapInfo{depth, anchor, anchor_path};
    nodes_.emplace(id, n);
    return id;
}

std::optional<Node> NodeTable::get(std::uint64_t id) const {
    std::lock_guard lock(mu_);
    if (auto it = nodes_.find(id); it != nodes_.end()) return it->second;
    return std::nullopt;
}

void NodeTable::release_trap(std::uint64_t id) {
    std::lock_guard lock(mu_);
    auto it = nodes_.find(id);
    if (it != nodes_.end() && it->second.ref.kind == NodeKind::TrapDir) {
        nodes_.erase(it);
    }
}

void NodeTable::forget_path(const std::string& rel_path) {
    std::lock_guard lock(mu_);
    auto it = by_path_.find(rel_path);
    if (it == by_path_.end()) return;
    nodes_.erase(it->second);
    by_path_.erase(it);
}

std::size_t NodeTable::size() const {
    std::lock_guard lock(mu_);
    return nodes_.size();
}

} // namespace mtfs
