#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mtfs/magic.hpp"

namespace mtfs {

// Deterministic synthetic corpus: seeded content with realistic magic bytes
// per extension. Files are spread across `dirs` top-level directories when
// dirs > 0 (dir000 ... dirNNN), otherwise placed flat in the root.
struct CorpusSpec {
    std::uint64_t file_count = 100;
    std::uint64_t seed = 1;
    std::uint64_t min_size = 512;
    std::uint64_t max_size = 16 * 1024;
    std::uint32_t dirs = 0;
    // extension -> weight; normalized internally
    std::map<FileType, double> type_mix = {
        {FileType::Pdf, 0.3}, {FileType::Png, 0.2}, {FileType::Jpeg, 0.2},
        {FileType::Zip, 0.15}, {FileType::Text, 0.15},
    };
};

struct CorpusSummary {
    std::uint64_t files = 0;
    std::uint64_t total_bytes = 0;
    std::map<FileType, std::uint64_t> per_type;
};

// Generates the corpus under `out_dir` (created if missing; must be empty).
// Throws std::runtime_error on IO failure or a non-empty target.
CorpusSummary generate_corpus(const CorpusSpec& spec, const std::string& out_dir);

} // namespace mtfs
