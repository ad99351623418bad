#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mtfs {

enum class OpKind {
    Lookup,
    GetAttr,
    ReadDir,
    Open,
    Read,
    Write,
    Create,
    Unlink,
    Rename,
    Release,
};

enum class NodeKind {
    RealFile,
    RealDir,
    TrapDir,
    Virtual,
};

enum class Status {
    Ok,
    NotFound,
    NotPermitted,
    IOFailure,
    PathTooLong,
};

const char* to_string(OpKind op);
const char* to_string(NodeKind kind);
const char* to_string(Status st);

// Reserved id of the mount root node.
inline constexpr std::uint64_t kRootNodeId = 1;

struct NodeRef {
    std::uint64_t id = 0;
    NodeKind kind = NodeKind::Virtual;
    // Relative to the underlay root; empty string means the root itself.
    // Absent for trap and virtual nodes.
    std::optional<std::string> underlay_path;
};

// Normalized file-operation envelope. One request per syscall-level operation.
struct OpRequest {
    OpKind op = OpKind::GetAttr;
    std::uint64_t node = kRootNodeId;
    std::optional<std::string> name;        // Lookup/Create/Unlink/Rename source
    std::optional<std::string> target_name; // Rename destination
    std::optional<std::uint64_t> target_node; // Rename destination dir (same dir if absent)
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    std::optional<std::string> payload; // Write data
    std::uint32_t pid = 0;              // 0 when unknown
};

struct Attrs {
    std::uint64_t size = 0;
    NodeKind kind = NodeKind::RealFile;
    std::int64_t mtime_ns = 0;
};

struct DirEntry {
    std::string name;
    NodeKind kind = NodeKind::RealFile;

    bool operator==(const DirEntry&) const = default;
};

struct OpResult {
    Status status = Status::Ok;
    std::optional<Attrs> attrs;
    std::optional<std::vector<DirEntry>> entries;
    std::optional<std::string> data;
    std::uint64_t written = 0;
    // Node resolved by Lookup/Create.
    std::optional<std::uint64_t> node_id;

    bool ok() const { return status == Status::Ok; }
};

OpResult error_result(Status st);

} // namespace mtfs
