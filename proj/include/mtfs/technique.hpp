#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtfs/node_table.hpp"
#include "mtfs/ops.hpp"

namespace mtfs {

enum class TechniqueKind {
    Delay,
    InfiniteDir,
    Suffix,
};

const char* to_string(TechniqueKind kind);
std::optional<TechniqueKind> technique_from_string(const std::string& name);

struct TechniqueConfig {
    TechniqueKind kind = TechniqueKind::Delay;
    bool active = false;

    // Delay
    std::chrono::milliseconds delay_per_op{0};
    std::set<OpKind> delayed_ops{OpKind::ReadDir, OpKind::Open, OpKind::Read, OpKind::Write};

    // InfiniteDir
    std::string trap_name = "!";
    double listing_subset_fraction = 1.0;

    // Suffix
    std::uint32_t magic_len = 8;
    std::uint64_t epoch_seed = 0;
    bool obfuscate_names = false;
};

// Validates the cross-field invariants; returns an error message on failure.
std::optional<std::string> validate_technique_config(const TechniqueConfig& cfg);

// What the dispatch loop hands to a technique.
struct DispatchContext {
    NodeTable& nodes;
    std::string underlay_root; // absolute
};

struct PrePhaseOutcome {
    // Set to short-circuit the underlay; the result is returned as-is
    // (after the remaining post phases).
    std::optional<OpResult> synthesized;
};

class Technique {
public:
    explicit Technique(TechniqueConfig cfg) : cfg_(std::move(cfg)), active_(cfg_.active) {}
    virtual ~Technique() = default;

    TechniqueKind kind() const { return cfg_.kind; }
    const TechniqueConfig& config() const { return cfg_; }
    bool active() const { return active_.load(std::memory_order_acquire); }
    void set_active(bool on) { active_.store(on, std::memory_order_release); }

    // Pre phase runs before the underlay; may rewrite the request in place
    // or synthesize a result. Post phase sees the result (underlay or
    // synthesized) and may transform it.
    virtual PrePhaseOutcome pre(OpRequest& req, DispatchContext& ctx) = 0;
    virtual void post(const OpRequest& req, OpResult& res, DispatchContext& ctx) = 0;

protected:
    TechniqueConfig cfg_;

private:
    std::atomic<bool> active_;
};

struct TechniqueStatus {
    TechniqueKind kind;
    bool active = false;
    std::uint64_t counter = 0; // technique-specific (delayed ops, trap descents, obfuscated reads)
};

struct PipelineStatus {
    std::vector<TechniqueStatus> techniques;
};

class UnknownTechniqueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Ordered set of technique instances; the order is configuration order and
// is fixed after mount. Activation flags are atomic so the control plane
// can flip them concurrently with dispatch.
class TechniquePipeline {
public:
    TechniquePipeline() = default;

    void add(std::unique_ptr<Technique> t);

    // Throws UnknownTechniqueError when no technique of this kind is configured.
    PipelineStatus controller_set(TechniqueKind kind, bool active);
    PipelineStatus status() const;

    Technique* find(TechniqueKind kind) const;
    const std::vector<std::unique_ptr<Technique>>& techniques() const { return order_; }

    bool any_active() const;

    // Forwarded to the suffix technique when present; starts a new epoch.
    void rotate_seed();

private:
    std::vector<std::unique_ptr<Technique>> order_;
};

std::unique_ptr<Technique> make_technique(const TechniqueConfig& cfg);

} // namespace mtfs
