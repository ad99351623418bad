#include "mtfs/technique.hpp"

#include <algorithm>

#include "mtfs/techniques.hpp"

namespace mtfs {

const char* to_string(TechniqueKind kind) {
    switch (kind) {
    case TechniqueKind::Delay: return "DELAY";
    case TechniqueKind::InfiniteDir: return "INF";
    case TechniqueKind::Suffix: return "SUFFIX";
    }
    return "?";
}

std::optional<TechniqueKind> technique_from_string(const std::string& name) {
    std::string up = name;
    std::transform(up.begin(), up.end(), up.begin(), ::toupper);
    if (up == "DELAY") return TechniqueKind::Delay;
    if (up == "INF") return TechniqueKind::InfiniteDir;
    if (up == "SUFFIX") return TechniqueKind::Suffix;
    return std::nullopt;
}

std::optional<std::string> validate_technique_config(const TechniqueConfig& cfg) {
    switch (cfg.kind) {
    case TechniqueKind::Delay:
        if (cfg.delay_per_op.count() < 0) return "delay_per_op must be >= 0";
        break;
    case TechniqueKind::InfiniteDir:
        if (cfg.trap_name.empty()) return "trap_name must be nonempty";
        if (cfg.trap_name.find('/') != std::string::npos || cfg.trap_name == "." ||
            cfg.trap_name == "..") {
            return "trap_name must be a single path component";
        }
        // The trap must sort before every ordinary corpus name so a sorted
        // DFS enters it first.
        if (cfg.trap_name >= "0") return "trap_name must sort before \"0\"";
        if (!(cfg.listing_subset_fraction > 0.0 && cfg.listing_subset_fraction <= 1.0)) {
            return "listing_subset_fraction must be in (0, 1]";
        }
        break;
    case TechniqueKind::Suffix:
        if (cfg.magic_len < 1) return "magic_len must be >= 1";
        break;
    }
    return std::nullopt;
}

std::unique_ptr<Technique> make_technique(const TechniqueConfig& cfg) {
    switch (cfg.kind) {
    case TechniqueKind::Delay: return std::make_unique<DelayTechnique>(cfg);
    case TechniqueKind::InfiniteDir: return std::make_unique<InfiniteDirTechnique>(cfg);
    case TechniqueKind::Suffix: return std::make_unique<SuffixTechnique>(cfg);
    }
    return nullptr;
}

void TechniquePipeline::add(std::unique_ptr<Technique> t) {
    order_.push_back(std::move(t));
}

Technique* TechniquePipeline::find(TechniqueKind kind) const {
    for (const auto& t : order_) {
        if (t->kind() == kind) return t.get();
    }
    return nullptr;
}

PipelineStatus TechniquePipeline::controller_set(TechniqueKind kind, bool active) {
    Technique* t = find(kind);
    if (!t) throw UnknownTechniqueError(std::string("technique not configured: ") + to_string(kind));
    t->set_active(active);
    return status();
}

PipelineStatus TechniquePipeline::status() const {
    PipelineStatus st;
    for (const auto& t : order_) {
        TechniqueStatus ts;
        ts.kind = t->kind();
        ts.active = t->active();
        if (auto* d = dynamic_cast<const DelayTechnique*>(t.get())) {
            ts.counter = d->delayed_ops_count();
        } else if (auto* i = dynamic_cast<const InfiniteDirTechnique*>(t.get())) {
            ts.counter = i->trap_descents();
        } else if (auto* s = dynamic_cast<const SuffixTechnique*>(t.get())) {
            ts.counter = s->obfuscated_reads();
        }
        st.techniques.push_back(ts);
    }
    return st;
}

bool TechniquePipeline::any_active() const {
    return std::any_of(order_.begin(), order_.end(),
                       [](const auto& t) { return t->active(); });
}

void TechniquePipeline::rotate_seed() {
    if (auto* s = dynamic_cast<SuffixTechnique*>(find(TechniqueKind::Suffix))) {
        s->rotate_seed();
    }
}

} // namespace mtfs
