#pragma once

#include <set>
#include <vector>

#include "mtfs/attack.hpp"
#include "mtfs/corpus.hpp"
#include "mtfs/snapshot.hpp"

namespace mtfs {

// One baseline-vs-defended comparison: the same attack runs against a raw
// copy of the corpus and against an overlay mount on a fresh copy.
struct ExperimentSpec {
    CorpusSpec corpus;
    std::vector<AttackProfile> profiles; // each gets its own pair of runs
    std::set<TechniqueKind> activate;
    std::vector<TechniqueConfig> techniques; // defaults applied when empty
    std::uint32_t repetitions = 1;
    std::uint64_t corpus_cap_bytes = 256ull << 20;
    std::string work_dir; // scratch space; contents are replaced per run
};

struct ExperimentRun {
    std::string profile_name;
    AttackReport baseline_attack;
    AttackReport defended_attack;
    DiffReport baseline_diff;
    DiffReport defended_diff;
    double bytes_saved_pct = 0.0;
};

struct ExperimentReport {
    std::vector<ExperimentRun> runs;
    double aggregate_bytes_saved = 0.0; // over summed bytes_changed
    std::uint64_t baseline_bytes_changed = 0;
    std::uint64_t defended_bytes_changed = 0;
};

// Six profiles spanning the observed behavior matrix: each traversal kind
// twice, each modification mode twice, type filter on half of them.
std::vector<AttackProfile> default_attack_matrix(std::chrono::milliseconds budget);

// Provisions the corpus, runs every profile in both configurations and
// aggregates. Throws std::runtime_error on setup failure or a corpus
// exceeding the cap.
ExperimentReport run_experiment(const ExperimentSpec& spec);

std::string experiment_to_json(const ExperimentReport& report);
std::string experiment_to_table(const ExperimentReport& report);

} // namespace mtfs
