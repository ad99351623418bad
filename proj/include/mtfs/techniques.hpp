#pragma once

#include <random>

#include "mtfs/technique.hpp"

namespace mtfs {

// Maximum virtual path length; descending a trap past this bound yields
// PathTooLong, which is the natural termination of a hostile DFS.
inline constexpr std::size_t kMaxPathLen = 4096;

// splitmix64 step; used as the keyed byte source for magic obfuscation and
// name tokens. Not cryptographic, deterministic across platforms.
std::uint64_t mix64(std::uint64_t x);

// Pseudorandom byte for absolute file offset `off` (< magic_len) of `file_id`
// under `seed`. Depends on nothing else, so reads of any alignment agree.
std::uint8_t obfuscation_byte(std::uint64_t seed, std::uint64_t file_id, std::uint64_t off);

// Replaces the portion of `data` (a Read result starting at file offset
// `offset`) that falls below `magic_len` with deterministic pseudorandom
// bytes. Bytes at or past magic_len are untouched.
std::string magic_obfuscate(std::string data, std::uint64_t file_id, std::uint64_t offset,
                            std::uint64_t seed, std::uint32_t magic_len);

// Uniformly samples ceil(f*n) of the real entries (fresh per call) and
// prepends the trap entry.
std::vector<DirEntry> trap_list(const std::vector<DirEntry>& real_entries,
                                const TechniqueConfig& cfg, std::mt19937_64& rng);

// Keyed extension rewrite: "report.pdf" -> "report.x7k2". Names without an
// extension are returned unchanged.
std::string obfuscate_name(const std::string& name, std::uint64_t seed);

// Applies obfuscate_name to a directory listing; pairs whose tokens collide
// fall back to their real names so the mapping stays bijective.
std::vector<DirEntry> obfuscate_listing(const std::vector<DirEntry>& entries, std::uint64_t seed);

// Inverts obfuscate_listing for one presented name; nullopt when the name
// does not correspond to any real entry.
std::optional<std::string> resolve_presented_name(const std::string& presented,
                                                  const std::vector<DirEntry>& real_entries,
                                                  std::uint64_t seed);

class DelayTechnique : public Technique {
public:
    explicit DelayTechnique(TechniqueConfig cfg) : Technique(std::move(cfg)) {}
    PrePhaseOutcome pre(OpRequest& req, DispatchContext& ctx) override;
    void post(const OpRequest&, OpResult&, DispatchContext&) override {}

    std::uint64_t delayed_ops_count() const { return delayed_.load(); }

private:
    std::atomic<std::uint64_t> delayed_{0};
};

class InfiniteDirTechnique : public Technique {
public:
    explicit InfiniteDirTechnique(TechniqueConfig cfg)
        : Technique(std::move(cfg)), rng_(std::random_device{}()) {}

    PrePhaseOutcome pre(OpRequest& req, DispatchContext& ctx) override;
    void post(const OpRequest& req, OpResult& res, DispatchContext& ctx) override;

    void reseed(std::uint64_t seed); // deterministic listings for tests
    std::uint64_t trap_descents() const { return descents_.load(); }

private:
    OpResult handle_trap_node(const OpRequest& req, const Node& node, DispatchContext& ctx);

    std::mutex rng_mu_;
    std::mt19937_64 rng_;
    std::atomic<std::uint64_t> descents_{0};
};

class SuffixTechnique : public Technique {
public:
    explicit SuffixTechnique(TechniqueConfig cfg)
        : Technique(std::move(cfg)), seed_(cfg_.epoch_seed) {}

    PrePhaseOutcome pre(OpRequest& req, DispatchContext& ctx) override;
    void post(const OpRequest& req, OpResult& res, DispatchContext& ctx) override;

    void rotate_seed();
    std::uint64_t epoch_seed() const { return seed_.load(std::memory_order_acquire); }
    std::uint64_t obfuscated_reads() const { return reads_.load(); }

private:
    std::vector<DirEntry> real_listing(std::uint64_t dir_node, DispatchContext& ctx) const;

    std::atomic<std::uint64_t> seed_;
    std::atomic<std::uint64_t> reads_{0};
};

} // namespace mtfs
