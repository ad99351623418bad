#include "mtfs/techniques.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <thread>

namespace fs = std::filesystem;

namespace mtfs {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint8_t obfuscation_byte(std::uint64_t seed, std::uint64_t file_id, std::uint64_t off) {
    return static_cast<std::uint8_t>(mix64(seed ^ mix64(file_id ^ mix64(off))) & 0xff);
}

std::string magic_obfuscate(std::string data, std::uint64_t file_id, std::uint64_t offset,
                            std::uint64_t seed, std::uint32_t magic_len) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint64_t abs = offset + i;
        if (abs >= magic_len) break;
        data[i] = static_cast<char>(obfuscation_byte(seed, file_id, abs));
    }
    return data;
}

std::vector<DirEntry> trap_list(const std::vector<DirEntry>& real_entries,
                                const TechniqueConfig& cfg, std::mt19937_64& rng) {
    std::vector<DirEntry> out;
    const std::size_t n = real_entries.size();
    std::size_t k = static_cast<std::size_t>(
        std::ceil(cfg.listing_subset_fraction * static_cast<double>(n)));
    k = std::min(k, n);

    out.push_back({cfg.trap_name, NodeKind::RealDir});
    if (k == n) {
        out.insert(out.end(), real_entries.begin(), real_entries.end());
        return out;
    }

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end()); // keep the underlay's relative order
    for (std::size_t i : idx) out.push_back(real_entries[i]);
    return out;
}

namespace {

constexpr char kTokenAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::size_t kTokenLen = 4;

std::uint64_t name_hash(const std::string& name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::string obfuscate_name(const std::string& name, std::uint64_t seed) {
    auto dot = name.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == name.size()) return name;
    std::uint64_t h = mix64(seed ^ name_hash(name));
    std::string token;
    for (std::size_t i = 0; i < kTokenLen; ++i) {
        token += kTokenAlphabet[h % (sizeof(kTokenAlphabet) - 1)];
        h /= sizeof(kTokenAlphabet) - 1;
    }
    return name.substr(0, dot + 1) + token;
}

std::vector<DirEntry> obfuscate_listing(const std::vector<DirEntry>& entries, std::uint64_t seed) {
    std::vector<DirEntry> out = entries;
    for (auto& e : out) {
        if (e.kind == NodeKind::RealFile) e.name = obfuscate_name(e.name, seed);
    }
    // Colliding pairs revert to their real names.
    for (int pass = 0; pass < 2; ++pass) {
        bool reverted = false;
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                if (i != j && out[i].name == out[j].name) {
                    out[i].name = entries[i].name;
                    out[j].name = entries[j].name;
                    reverted = true;
                }
            }
        }
        if (!reverted) break;
    }
    return out;
}

std::optional<std::string> resolve_presented_name(const std::string& presented,
                                                  const std::vector<DirEntry>& real_entries,
                                                  std::uint64_t seed) {
    auto presented_entries = obfuscate_listing(real_entries, seed);
    for (std::size_t i = 0; i < presented_entries.size(); ++i) {
        if (presented_entries[i].name == presented) return real_entries[i].name;
    }
    return std::nullopt;
}

// --- Delay ---

PrePhaseOutcome DelayTechnique::pre(OpRequest& req, DispatchContext&) {
    if (cfg_.delayed_ops.count(req.op)) {
        delayed_.fetch_add(1, std::memory_order_relaxed);
        if (cfg_.delay_per_op.count() > 0) {
            std::this_thread::sleep_for(cfg_.delay_per_op);
        }
    }
    return {};
}

// --- InfiniteDir ---

namespace {

Attrs trap_attrs() {
    Attrs a;
    a.size = 0;
    a.kind = NodeKind::RealDir; // presented as an ordinary directory
    a.mtime_ns = 0;
    return a;
}

bool trap_path_fits(const TrapInfo& trap, const std::string& trap_name, std::uint32_t new_depth) {
    std::size_t len = trap.anchor_path.size() +
                      static_cast<std::size_t>(new_depth) * (trap_name.size() + 1);
    return len <= kMaxPathLen;
}

} // namespace

void InfiniteDirTechnique::reseed(std::uint64_t seed) {
    std::lock_guard lock(rng_mu_);
    rng_.seed(seed);
}

OpResult InfiniteDirTechnique::handle_trap_node(const OpRequest& req, const Node& node,
                                                DispatchContext& ctx) {
    const TrapInfo& trap = *node.trap;
    OpResult res;
    switch (req.op) {
    case OpKind::Lookup:
        if (req.name == cfg_.trap_name) {
            if (!trap_path_fits(trap, cfg_.trap_name, trap.depth + 1)) {
                return error_result(Status::PathTooLong);
            }
            descents_.fetch_add(1, std::memory_order_relaxed);
            res.node_id = ctx.nodes.add_trap(trap.depth + 1, trap.anchor, trap.anchor_path);
            res.attrs = trap_attrs();
            return res;
        }
        return error_result(Status::NotFound);
    case OpKind::GetAttr:
        res.attrs = trap_attrs();
        return res;
    case OpKind::ReadDir:
        res.entries = std::vector<DirEntry>{{cfg_.trap_name, NodeKind::RealDir}};
        return res;
    case OpKind::Open:
        return res;
    case OpKind::Release:
        ctx.nodes.release_trap(req.node);
        return res;
    default:
        return error_result(Status::NotPermitted);
    }
}

PrePhaseOutcome InfiniteDirTechnique::pre(OpRequest& req, DispatchContext& ctx) {
    auto node = ctx.nodes.get(req.node);
    if (!node) return {};

    if (node->ref.kind == NodeKind::TrapDir) {
        return {handle_trap_node(req, *node, ctx)};
    }

    if (req.op == OpKind::Lookup && node->ref.kind == NodeKind::RealDir &&
        req.name == cfg_.trap_name) {
        TrapInfo anchor{0, node->ref.id, node->ref.underlay_path.value_or("")};
        if (!trap_path_fits(anchor, cfg_.trap_name, 1)) {
            return {error_result(Status::PathTooLong)};
        }
        OpResult res;
        res.node_id = ctx.nodes.add_trap(1, node->ref.id, anchor.anchor_path);
        res.attrs = trap_attrs();
        return {res};
    }
    return {};
}

void InfiniteDirTechnique::post(const OpRequest& req, OpResult& res, DispatchContext& ctx) {
    if (req.op != OpKind::ReadDir || !res.ok() || !res.entries) return;
    auto node = ctx.nodes.get(req.node);
    if (!node || node->ref.kind != NodeKind::RealDir) return;
    std::lock_guard lock(rng_mu_);
    res.entries = trap_list(*res.entries, cfg_, rng_);
}

// --- Suffix ---

void SuffixTechnique::rotate_seed() {
    seed_.store(mix64(seed_.load() ^ 0xa5a5a5a5deadbeefULL), std::memory_order_release);
}

std::vector<DirEntry> SuffixTechnique::real_listing(std::uint64_t dir_node,
                                                    DispatchContext& ctx) const {
    std::vector<DirEntry> out;
    auto node = ctx.nodes.get(dir_node);
    if (!node || !node->ref.underlay_path) return out;
    fs::path dir = fs::path(ctx.underlay_root) / *node->ref.underlay_path;
    std::error_code ec;
    for (const auto& de : fs::directory_iterator(dir, ec)) {
        NodeKind kind = de.is_directory() ? NodeKind::RealDir : NodeKind::RealFile;
        out.push_back({de.path().filename().string(), kind});
    }
    std::sort(out.begin(), out.end(),
              [](const DirEntry& a, const DirEntry& b) { return a.name < b.name; });
    return out;
}

PrePhaseOutcome SuffixTechnique::pre(OpRequest& req, DispatchContext& ctx) {
    if (!cfg_.obfuscate_names || !req.name) return {};
    if (req.op != OpKind::Lookup && req.op != OpKind::Open && req.op != OpKind::Unlink &&
        req.op != OpKind::Rename) {
        return {};
    }
    auto entries = real_listing(req.node, ctx);
    if (auto real = resolve_presented_name(*req.name, entries, epoch_seed())) {
        req.name = *real;
    }
    return {};
}

void SuffixTechnique::post(const OpRequest& req, OpResult& res, DispatchContext& ctx) {
    if (!res.ok()) return;
    if (req.op == OpKind::Read && res.data) {
        auto node = ctx.nodes.get(req.node);
        if (!node || node->ref.kind != NodeKind::RealFile) return;
        if (req.offset < cfg_.magic_len) {
            reads_.fetch_add(1, std::memory_order_relaxed);
        }
        res.data = magic_obfuscate(std::move(*res.data), req.node, req.offset, epoch_seed(),
                                   cfg_.magic_len);
    } else if (req.op == OpKind::ReadDir && res.entries && cfg_.obfuscate_names) {
        auto node = ctx.nodes.get(req.node);
        if (!node || node->ref.kind != NodeKind::RealDir) return;
        res.entries = obfuscate_listing(*res.entries, epoch_seed());
    }
}

} // namespace mtfs
