#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtfs/node_table.hpp"
#include "mtfs/ops.hpp"
#include "mtfs/technique.hpp"

namespace mtfs {

// One observation handed to detectors per dispatched request.
struct SyscallEvent {
    OpKind op = OpKind::GetAttr;
    std::string path;       // virtual path as seen through the mount
    std::uint32_t pid = 0;
    std::int64_t timestamp_ns = 0;
    std::uint64_t bytes = 0; // data moved by Read/Write
};

using EventSink = std::function<void(const SyscallEvent&)>;

struct MountConfig {
    std::string underlay_root;   // absolute
    std::string mountpoint;      // absolute
    std::string control_endpoint; // local socket path; empty disables the control plane
    bool readonly = false;
    std::vector<TechniqueConfig> techniques;
};

enum class MountErrorCode {
    MountpointBusy,
    UnderlayMissing,
    PermissionDenied,
    InvalidConfig,
};

class MountError : public std::runtime_error {
public:
    MountError(MountErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    MountErrorCode code() const { return code_; }

private:
    MountErrorCode code_;
};

// Returns an error message when the config violates its invariants.
std::optional<std::string> validate_mount_config(const MountConfig& cfg);

// The overlay core: a passthrough to the underlay directory tree with the
// technique pipeline wrapped around every operation.
class Overlay {
public:
    explicit Overlay(MountConfig cfg); // throws MountError

    OpResult dispatch(const OpRequest& request);
    OpResult passthrough(const OpRequest& request);

    TechniquePipeline& pipeline() { return pipeline_; }
    NodeTable& nodes() { return nodes_; }
    const MountConfig& config() const { return cfg_; }
    std::uint64_t root() const { return nodes_.root(); }
    std::uint64_t dispatched() const { return dispatched_.load(); }

    // Sinks must be registered before concurrent dispatch starts.
    void add_event_sink(EventSink sink);

private:
    std::string virtual_path(std::uint64_t node) const;

    MountConfig cfg_;
    NodeTable nodes_;
    TechniquePipeline pipeline_;
    std::vector<EventSink> sinks_;
    std::atomic<std::uint64_t> dispatched_{0};
};

class MountHandle {
public:
    MountHandle() = default;
    MountHandle(MountHandle&&) = default;
    MountHandle& operator=(MountHandle&&) = default;
    ~MountHandle();

    Overlay& overlay() { return *overlay_; }
    bool mounted() const { return overlay_ != nullptr; }

    // Waits for in-flight operations and releases the mountpoint.
    void unmount();

private:
    friend MountHandle mount(const MountConfig&);

    std::unique_ptr<Overlay> overlay_;
    std::string lock_path_;
};

// Claims the mountpoint and starts servicing operations. Throws MountError.
MountHandle mount(const MountConfig& config);

} // namespace mtfs
