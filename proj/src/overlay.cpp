#include "mtfs/overlay.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <thread>

#include "mtfs/techniques.hpp"

namespace fs = std::filesystem;

namespace mtfs {

const char* to_string(OpKind op) {
    switch (op) {
    case OpKind::Lookup: return "LOOKUP";
    case OpKind::GetAttr: return "GETATTR";
    case OpKind::ReadDir: return "READDIR";
    case OpKind::Open: return "OPEN";
    case OpKind::Read: return "READ";
    case OpKind::Write: return "WRITE";
    case OpKind::Create: return "CREATE";
    case OpKind::Unlink: return "UNLINK";
    case OpKind::Rename: return "RENAME";
    case OpKind::Release: return "RELEASE";
    }
    return "?";
}

const char* to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::RealFile: return "File";
    case NodeKind::RealDir: return "Dir";
    case NodeKind::TrapDir: return "TrapDir";
    case NodeKind::Virtual: return "Virtual";
    }
    return "?";
}

const char* to_string(Status st) {
    switch (st) {
    case Status::Ok: return "Ok";
    case Status::NotFound: return "NotFound";
    case Status::NotPermitted: return "NotPermitted";
    case Status::IOFailure: return "IOFailure";
    case Status::PathTooLong: return "PathTooLong";
    }
    return "?";
}

OpResult error_result(Status st) {
    OpResult r;
    r.status = st;
    return r;
}

namespace {

bool valid_name(const std::string& name) {
    return !name.empty() && name != "." && name != ".." &&
           name.find('/') == std::string::npos;
}

std::string join_rel(const std::string& parent, const std::string& name) {
    return parent.empty() ? name : parent + "/" + name;
}

Attrs attrs_from_stat(const struct stat& st) {
    Attrs a;
    a.size = static_cast<std::uint64_t>(st.st_size);
    a.kind = S_ISDIR(st.st_mode) ? NodeKind::RealDir : NodeKind::RealFile;
    a.mtime_ns = static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1000000000 + st.st_mtim.tv_nsec;
    return a;
}

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

std::optional<std::string> validate_mount_config(const MountConfig& cfg) {
    if (cfg.underlay_root.empty() || cfg.underlay_root.front() != '/')
        return "underlay_root must be an absolute path";
    if (cfg.mountpoint.empty() || cfg.mountpoint.front() != '/')
        return "mountpoint must be an absolute path";
    fs::path under = fs::path(cfg.underlay_root).lexically_normal();
    fs::path mnt = fs::path(cfg.mountpoint).lexically_normal();
    if (mnt == under) return "mountpoint must differ from underlay_root";
    auto rel = mnt.lexically_relative(under);
    if (!rel.empty() && rel.native() != "." && *rel.begin() != "..")
        return "mountpoint must not be nested inside underlay_root";
    for (const auto& t : cfg.techniques) {
        if (auto err = validate_technique_config(t)) return err;
    }
    return std::nullopt;
}

Overlay::Overlay(MountConfig cfg) : cfg_(std::move(cfg)) {
    if (auto err = validate_mount_config(cfg_)) {
        throw MountError(MountErrorCode::InvalidConfig, *err);
    }
    if (!fs::is_directory(cfg_.underlay_root)) {
        throw MountError(MountErrorCode::UnderlayMissing,
                         "underlay_root does not exist: " + cfg_.underlay_root);
    }
    for (const auto& t : cfg_.techniques) {
        pipeline_.add(make_technique(t));
    }
}

void Overlay::add_event_sink(EventSink sink) {
    sinks_.push_back(std::move(sink));
}

std::string Overlay::virtual_path(std::uint64_t id) const {
    auto node = nodes_.get(id);
    if (!node) return "<unknown>";
    if (node->trap) {
        std::string p = "/" + node->trap->anchor_path;
        for (std::uint32_t i = 0; i < node->trap->depth; ++i) p += "/!";
        return p;
    }
    return "/" + node->ref.underlay_path.value_or("");
}

OpResult Overlay::dispatch(const OpRequest& request) {
    DispatchContext ctx{nodes_, cfg_.underlay_root};
    OpRequest req = request;

    std::vector<Technique*> active;
    for (const auto& t : pipeline_.techniques()) {
        if (t->active()) active.push_back(t.get());
    }

    std::optional<OpResult> result;
    for (Technique* t : active) {
        try {
            auto out = t->pre(req, ctx);
            if (out.synthesized) {
                result = std::move(out.synthesized);
                break;
            }
        } catch (const std::exception&) {
            // crash isolation: a failing technique degrades to passthrough
        }
    }
    if (!result) result = passthrough(req);

    for (auto it = active.rbegin(); it != active.rend(); ++it) {
        OpResult before = *result;
        try {
            (*it)->post(req, *result, ctx);
        } catch (const std::exception&) {
            *result = std::move(before);
        }
    }

    dispatched_.fetch_add(1, std::memory_order_relaxed);
    if (!sinks_.empty()) {
        SyscallEvent ev;
        ev.op = request.op;
        ev.path = virtual_path(request.node);
        if (request.name) ev.path = join_rel(ev.path, *request.name);
        ev.pid = request.pid;
        ev.timestamp_ns = now_ns();
        if (result->data) ev.bytes = result->data->size();
        ev.bytes = std::max<std::uint64_t>(ev.bytes, result->written);
        for (const auto& sink : sinks_) sink(ev);
    }
    return *result;
}

OpResult Overlay::passthrough(const OpRequest& request) {
    auto node = nodes_.get(request.node);
    if (!node || !node->ref.underlay_path) return error_result(Status::NotFound);
    const std::string& rel = *node->ref.underlay_path;
    fs::path abs = fs::path(cfg_.underlay_root) / rel;

    switch (request.op) {
    case OpKind::Lookup: {
        if (!request.name || !valid_name(*request.name)) return error_result(Status::NotFound);
        std::string child_rel = join_rel(rel, *request.name);
        struct stat st{};
        if (::lstat((fs::path(cfg_.underlay_root) / child_rel).c_str(), &st) != 0) {
            return error_result(Status::NotFound);
        }
        OpResult res;
        res.attrs = attrs_from_stat(st);
        res.node_id = nodes_.intern_real(child_rel, res.attrs->kind);
        return res;
    }
    case OpKind::GetAttr: {
        struct stat st{};
        if (::lstat(abs.c_str(), &st) != 0) return error_result(Status::NotFound);
        OpResult res;
        res.attrs = attrs_from_stat(st);
        return res;
    }
    case OpKind::ReadDir: {
        std::error_code ec;
        if (!fs::is_directory(abs, ec)) return error_result(Status::NotFound);
        std::vector<DirEntry> entries;
        for (const auto& de : fs::directory_iterator(abs, ec)) {
            NodeKind kind = de.is_directory() ? NodeKind::RealDir : NodeKind::RealFile;
            entries.push_back({de.path().filename().string(), kind});
        }
        if (ec) return error_result(Status::IOFailure);
        std::sort(entries.begin(), entries.end(),
                  [](const DirEntry& a, const DirEntry& b) { return a.name < b.name; });
        OpResult res;
        res.entries = std::move(entries);
        return res;
    }
    case OpKind::Open: {
        std::error_code ec;
        if (!fs::exists(abs, ec)) return error_result(Status::NotFound);
        return OpResult{};
    }
    case OpKind::Read: {
        int fd = ::open(abs.c_str(), O_RDONLY);
        if (fd < 0) {
            return error_result(errno == ENOENT ? Status::NotFound : Status::IOFailure);
        }
        std::string buf(request.length, '\0');
        ssize_t n = ::pread(fd, buf.data(), buf.size(), static_cast<off_t>(request.offset));
        ::close(fd);
        if (n < 0) return error_result(Status::IOFailure);
        buf.resize(static_cast<std::size_t>(n));
        OpResult res;
        res.data = std::move(buf);
        return res;
    }
    case OpKind::Write: {
        if (cfg_.readonly) return error_result(Status::NotPermitted);
        if (!request.payload) return error_result(Status::IOFailure);
        int fd = ::open(abs.c_str(), O_WRONLY);
        if (fd < 0) {
            return error_result(errno == ENOENT ? Status::NotFound : Status::IOFailure);
        }
        ssize_t n = ::pwrite(fd, request.payload->data(), request.payload->size(),
                             static_cast<off_t>(request.offset));
        ::close(fd);
        if (n < 0) return error_result(Status::IOFailure);
        OpResult res;
        res.written = static_cast<std::uint64_t>(n);
        return res;
    }
    case OpKind::Create: {
        if (cfg_.readonly) return error_result(Status::NotPermitted);
        if (!request.name || !valid_name(*request.name)) return error_result(Status::IOFailure);
        std::string child_rel = join_rel(rel, *request.name);
        fs::path child_abs = fs::path(cfg_.underlay_root) / child_rel;
        int fd = ::open(child_abs.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd < 0) {
            return error_result(errno == EACCES ? Status::NotPermitted : Status::IOFailure);
        }
        ::close(fd);
        OpResult res;
        res.node_id = nodes_.intern_real(child_rel, NodeKind::RealFile);
        res.attrs = Attrs{0, NodeKind::RealFile, now_ns()};
        return res;
    }
    case OpKind::Unlink: {
        if (cfg_.readonly) return error_result(Status::NotPermitted);
        if (!request.name || !valid_name(*request.name)) return error_result(Status::NotFound);
        std::string child_rel = join_rel(rel, *request.name);
        fs::path child_abs = fs::path(cfg_.underlay_root) / child_rel;
        std::error_code ec;
        if (!fs::exists(child_abs, ec)) return error_result(Status::NotFound);
        if (!fs::remove(child_abs, ec) || ec) return error_result(Status::IOFailure);
        nodes_.forget_path(child_rel);
        return OpResult{};
    }
    case OpKind::Rename: {
        if (cfg_.readonly) return error_result(Status::NotPermitted);
        if (!request.name || !request.target_name || !valid_name(*request.name) ||
            !valid_name(*request.target_name)) {
            return error_result(Status::IOFailure);
        }
        std::string dst_parent = rel;
        if (request.target_node) {
            auto dst = nodes_.get(*request.target_node);
            if (!dst || !dst->ref.underlay_path) return error_result(Status::NotFound);
            dst_parent = *dst->ref.underlay_path;
        }
        std::string src_rel = join_rel(rel, *request.name);
        std::string dst_rel = join_rel(dst_parent, *request.target_name);
        fs::path src_abs = fs::path(cfg_.underlay_root) / src_rel;
        fs::path dst_abs = fs::path(cfg_.underlay_root) / dst_rel;
        std::error_code ec;
        if (!fs::exists(src_abs, ec)) return error_result(Status::NotFound);
        fs::rename(src_abs, dst_abs, ec);
        if (ec) return error_result(Status::IOFailure);
        nodes_.forget_path(src_rel);
        nodes_.forget_path(dst_rel);
        return OpResult{};
    }
    case OpKind::Release:
        return OpResult{};
    }
    return error_result(Status::IOFailure);
}

// --- mount lifecycle ---

namespace {
constexpr const char* kLockName = ".mtfs.lock";
} // namespace

MountHandle mount(const MountConfig& config) {
    if (auto err = validate_mount_config(config)) {
        throw MountError(MountErrorCode::InvalidConfig, *err);
    }
    if (!fs::is_directory(config.underlay_root)) {
        throw MountError(MountErrorCode::UnderlayMissing,
                         "underlay_root does not exist: " + config.underlay_root);
    }
    std::error_code ec;
    if (!fs::is_directory(config.mountpoint, ec)) {
        throw MountError(MountErrorCode::InvalidConfig,
                         "mountpoint is not a directory: " + config.mountpoint);
    }
    for (const auto& de : fs::directory_iterator(config.mountpoint, ec)) {
        (void)de;
        throw MountError(MountErrorCode::MountpointBusy,
                         "mountpoint is not empty: " + config.mountpoint);
    }
    fs::path lock = fs::path(config.mountpoint) / kLockName;
    int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            throw MountError(MountErrorCode::MountpointBusy,
                             "mountpoint already claimed: " + config.mountpoint);
        }
        throw MountError(MountErrorCode::PermissionDenied,
                         "cannot claim mountpoint: " + config.mountpoint);
    }
    ::close(fd);

    MountHandle handle;
    try {
        handle.overlay_ = std::make_unique<Overlay>(config);
    } catch (...) {
        fs::remove(lock, ec);
        throw;
    }
    handle.lock_path_ = lock.string();
    return handle;
}

void MountHandle::unmount() {
    overlay_.reset();
    if (!lock_path_.empty()) {
        std::error_code ec;
        fs::remove(lock_path_, ec);
        lock_path_.clear();
    }
}

MountHandle::~MountHandle() {
    unmount();
}

} // namespace mtfs
