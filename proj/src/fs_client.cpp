#include "mtfs/fs_client.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>

namespace fs = std::filesystem;

namespace mtfs {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start < path.size()) {
        std::size_t slash = path.find('/', start);
        if (slash == std::string::npos) slash = path.size();
        std::string part = path.substr(start, slash - start);
        if (!part.empty() && part != ".") parts.push_back(part);
        start = slash + 1;
    }
    return parts;
}

// --- DirectFs ---

std::string DirectFs::abs(const std::string& path) const {
    return path.empty() ? root_ : root_ + "/" + path;
}

FsClient::ListResult DirectFs::list_dir(const std::string& path) {
    ListResult out;
    std::error_code ec;
    fs::path dir = abs(path);
    if (!fs::is_directory(dir, ec)) {
        out.status = Status::NotFound;
        return out;
    }
    for (const auto& de : fs::directory_iterator(dir, ec)) {
        NodeKind kind = de.is_directory() ? NodeKind::RealDir : NodeKind::RealFile;
        out.entries.push_back({de.path().filename().string(), kind});
    }
    if (ec) out.status = Status::IOFailure;
    std::sort(out.entries.begin(), out.entries.end(),
              [](const DirEntry& a, const DirEntry& b) { return a.name < b.name; });
    return out;
}

FsClient::StatResult DirectFs::stat(const std::string& path) {
    StatResult out;
    struct stat st{};
    if (::lstat(abs(path).c_str(), &st) != 0) {
        out.status = errno == ENAMETOOLONG ? Status::PathTooLong : Status::NotFound;
        return out;
    }
    out.attrs.size = static_cast<std::uint64_t>(st.st_size);
    out.attrs.kind = S_ISDIR(st.st_mode) ? NodeKind::RealDir : NodeKind::RealFile;
    out.attrs.mtime_ns =
        static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1000000000 + st.st_mtim.tv_nsec;
    return out;
}

FsClient::ReadResult DirectFs::read(const std::string& path, std::uint64_t offset,
                                    std::uint64_t len) {
    ReadResult out;
    int fd = ::open(abs(path).c_str(), O_RDONLY);
    if (fd < 0) {
        out.status = errno == ENOENT ? Status::NotFound : Status::IOFailure;
        return out;
    }
    out.data.resize(len);
    ssize_t n = ::pread(fd, out.data.data(), len, static_cast<off_t>(offset));
    ::close(fd);
    if (n < 0) {
        out.status = Status::IOFailure;
        out.data.clear();
        return out;
    }
    out.data.resize(static_cast<std::size_t>(n));
    return out;
}

Status DirectFs::write(const std::string& path, std::uint64_t offset, const std::string& data) {
    int fd = ::open(abs(path).c_str(), O_WRONLY);
    if (fd < 0) return errno == ENOENT ? Status::NotFound : Status::IOFailure;
    ssize_t n = ::pwrite(fd, data.data(), data.size(), static_cast<off_t>(offset));
    ::close(fd);
    return n == static_cast<ssize_t>(data.size()) ? Status::Ok : Status::IOFailure;
}

Status DirectFs::create(const std::string& path) {
    int fd = ::open(abs(path).c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) return Status::IOFailure;
    ::close(fd);
    return Status::Ok;
}

Status DirectFs::unlink(const std::string& path) {
    std::error_code ec;
    fs::path p = abs(path);
    if (!fs::exists(p, ec)) return Status::NotFound;
    return fs::remove(p, ec) && !ec ? Status::Ok : Status::IOFailure;
}

Status DirectFs::rename(const std::string& from, const std::string& to) {
    std::error_code ec;
    if (!fs::exists(abs(from), ec)) return Status::NotFound;
    fs::rename(abs(from), abs(to), ec);
    return ec ? Status::IOFailure : Status::Ok;
}

Status DirectFs::open(const std::string& path) {
    std::error_code ec;
    return fs::exists(abs(path), ec) ? Status::Ok : Status::NotFound;
}

// --- OverlayClient ---

OverlayClient::Resolved OverlayClient::resolve(const std::string& path) {
    if (path.empty()) return {Status::Ok, overlay_.root()};
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(path); it != cache_.end()) return {Status::Ok, it->second};
    }
    auto parts = split_path(path);
    std::uint64_t node = overlay_.root();
    std::string prefix;
    for (const auto& part : parts) {
        prefix = prefix.empty() ? part : prefix + "/" + part;
        bool cached = false;
        {
            std::lock_guard lock(mu_);
            if (auto it = cache_.find(prefix); it != cache_.end()) {
                node = it->second;
                cached = true;
            }
        }
        if (cached) continue;
        OpRequest req;
        req.op = OpKind::Lookup;
        req.node = node;
        req.name = part;
        req.pid = pid_;
        OpResult res = overlay_.dispatch(req);
        if (!res.ok() || !res.node_id) {
            return {res.ok() ? Status::NotFound : res.status, 0};
        }
        node = *res.node_id;
        std::lock_guard lock(mu_);
        cache_[prefix] = node;
    }
    return {Status::Ok, node};
}

OverlayClient::Resolved OverlayClient::resolve_parent(const std::string& path, std::string& leaf) {
    auto slash = path.rfind('/');
    if (slash == std::string::npos) {
        leaf = path;
        return {Status::Ok, overlay_.root()};
    }
    leaf = path.substr(slash + 1);
    return resolve(path.substr(0, slash));
}

void OverlayClient::invalidate(const std::string& path) {
    std::lock_guard lock(mu_);
    for (auto it = cache_.begin(); it != cache_.end();) {
        const std::string& key = it->first;
        bool under = key == path || (key.size() > path.size() && key.compare(0, path.size(), path) == 0 &&
                                     key[path.size()] == '/');
        it = under ? cache_.erase(it) : std::next(it);
    }
}

FsClient::ListResult OverlayClient::list_dir(const std::string& path) {
    ListResult out;
    auto r = resolve(path);
    if (r.status != Status::Ok) {
        out.status = r.status;
        return out;
    }
    OpRequest req;
    req.op = OpKind::ReadDir;
    req.node = r.node;
    req.pid = pid_;
    OpResult res = overlay_.dispatch(req);
    out.status = res.status;
    if (res.ok() && res.entries) out.entries = *res.entries;
    return out;
}

FsClient::StatResult OverlayClient::stat(const std::string& path) {
    StatResult out;
    auto r = resolve(path);
    if (r.status != Status::Ok) {
        out.status = r.status;
        return out;
    }
    OpRequest req;
    req.op = OpKind::GetAttr;
    req.node = r.node;
    req.pid = pid_;
    OpResult res = overlay_.dispatch(req);
    out.status = res.status;
    if (res.ok() && res.attrs) out.attrs = *res.attrs;
    return out;
}

FsClient::ReadResult OverlayClient::read(const std::string& path, std::uint64_t offset,
                                         std::uint64_t len) {
    ReadResult out;
    auto r = resolve(path);
    if (r.status != Status::Ok) {
        out.status = r.status;
        return out;
    }
    OpRequest req;
    req.op = OpKind::Read;
    req.node = r.node;
    req.offset = offset;
    req.length = len;
    req.pid = pid_;
    OpResult res = overlay_.dispatch(req);
    out.status = res.status;
    if (res.ok() && res.data) out.data = std::move(*res.data);
    return out;
}

Status OverlayClient::write(const std::string& path, std::uint64_t offset, const std::string& data) {
    auto r = resolve(path);
    if (r.status != Status::Ok) return r.status;
    OpRequest req;
    req.op = OpKind::Write;
    req.node = r.node;
    req.offset = offset;
    req.payload = data;
    req.length = data.size();
    req.pid = pid_;
    return overlay_.dispatch(req).status;
}

Status OverlayClient::create(const std::string& path) {
    std::string leaf;
    auto r = resolve_parent(path, leaf);
    if (r.status != Status::Ok) return r.status;
    OpRequest req;
    req.op = OpKind::Create;
    req.node = r.node;
    req.name = leaf;
    req.pid = pid_;
    OpResult res = overlay_.dispatch(req);
    if (res.ok() && res.node_id) {
        std::lock_guard lock(mu_);
        cache_[path] = *res.node_id;
    }
    return res.status;
}

Status OverlayClient::unlink(const std::string& path) {
    std::string leaf;
    auto r = resolve_parent(path, leaf);
    if (r.status != Status::Ok) return r.status;
    OpRequest req;
    req.op = OpKind::Unlink;
    req.node = r.node;
    req.name = leaf;
    req.pid = pid_;
    Status st = overlay_.dispatch(req).status;
    if (st == Status::Ok) invalidate(path);
    return st;
}

Status OverlayClient::rename(const std::string& from, const std::string& to) {
    std::string from_leaf, to_leaf;
    auto rf = resolve_parent(from, from_leaf);
    if (rf.status != Status::Ok) return rf.status;
    auto rt = resolve_parent(to, to_leaf);
    if (rt.status != Status::Ok) return rt.status;
    OpRequest req;
    req.op = OpKind::Rename;
    req.node = rf.node;
    req.name = from_leaf;
    req.target_name = to_leaf;
    if (rt.node != rf.node) req.target_node = rt.node;
    req.pid = pid_;
    Status st = overlay_.dispatch(req).status;
    if (st == Status::Ok) {
        invalidate(from);
        invalidate(to);
    }
    return st;
}

Status OverlayClient::open(const std::string& path) {
    auto r = resolve(path);
    if (r.status != Status::Ok) return r.status;
    OpRequest req;
    req.op = OpKind::Open;
    req.node = r.node;
    req.pid = pid_;
    return overlay_.dispatch(req).status;
}

} // namespace mtfs
