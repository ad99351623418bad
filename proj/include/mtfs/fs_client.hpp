#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtfs/overlay.hpp"

namespace mtfs {

// Path-based file access used by the attacker, the benchmark workloads and
// the snapshot walker, so all of them can target either a raw directory or
// an overlay mount through the same interface. Paths are relative to the
// client's root; "" is the root itself.
class FsClient {
public:
    virtual ~FsClient() = default;

    struct ListResult {
        Status status = Status::Ok;
        std::vector<DirEntry> entries;
    };
    struct ReadResult {
        Status status = Status::Ok;
        std::string data;
    };
    struct StatResult {
        Status status = Status::Ok;
        Attrs attrs;
    };

    virtual ListResult list_dir(const std::string& path) = 0;
    virtual StatResult stat(const std::string& path) = 0;
    virtual ReadResult read(const std::string& path, std::uint64_t offset, std::uint64_t len) = 0;
    virtual Status write(const std::string& path, std::uint64_t offset, const std::string& data) = 0;
    virtual Status create(const std::string& path) = 0;
    virtual Status unlink(const std::string& path) = 0;
    virtual Status rename(const std::string& from, const std::string& to) = 0;
    virtual Status open(const std::string& path) = 0;
};

// Direct POSIX access to a directory tree; the undefended baseline.
class DirectFs : public FsClient {
public:
    explicit DirectFs(std::string root) : root_(std::move(root)) {}

    ListResult list_dir(const std::string& path) override;
    StatResult stat(const std::string& path) override;
    ReadResult read(const std::string& path, std::uint64_t offset, std::uint64_t len) override;
    Status write(const std::string& path, std::uint64_t offset, const std::string& data) override;
    Status create(const std::string& path) override;
    Status unlink(const std::string& path) override;
    Status rename(const std::string& from, const std::string& to) override;
    Status open(const std::string& path) override;

private:
    std::string abs(const std::string& path) const;
    std::string root_;
};

// Routes every operation through Overlay::dispatch, resolving paths
// component by component the way a kernel would, with a node cache.
class OverlayClient : public FsClient {
public:
    explicit OverlayClient(Overlay& overlay, std::uint32_t pid = 0)
        : overlay_(overlay), pid_(pid) {}

    ListResult list_dir(const std::string& path) override;
    StatResult stat(const std::string& path) override;
    ReadResult read(const std::string& path, std::uint64_t offset, std::uint64_t len) override;
    Status write(const std::string& path, std::uint64_t offset, const std::string& data) override;
    Status create(const std::string& path) override;
    Status unlink(const std::string& path) override;
    Status rename(const std::string& from, const std::string& to) override;
    Status open(const std::string& path) override;

private:
    struct Resolved {
        Status status = Status::Ok;
        std::uint64_t node = 0;
    };
    Resolved resolve(const std::string& path);
    Resolved resolve_parent(const std::string& path, std::string& leaf);
    void invalidate(const std::string& path);

    Overlay& overlay_;
    std::uint32_t pid_;
    std::mutex mu_;
    std::unordered_map<std::string, std::uint64_t> cache_;
};

// Splits "a/b/c" into components; rejects absolute paths and dot segments.
std::vector<std::string> split_path(const std::string& path);

} // namespace mtfs
