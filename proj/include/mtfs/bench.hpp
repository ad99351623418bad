#pragma once

#include <string>
#include <vector>

#include "mtfs/fs_client.hpp"

namespace mtfs {

enum class Workload {
    SequentialStream, // one large file written in chunks, read back
    SmallFiles,       // many small create/write/read cycles
    PeriodicAppend,   // sensor-log style appends to a single file
};

const char* to_string(Workload w);

struct BenchParams {
    std::uint64_t stream_bytes = 4ull << 20;
    std::uint64_t stream_chunk = 64 * 1024;
    std::uint64_t small_file_count = 200;
    std::uint64_t small_file_size = 1024;
    std::uint64_t append_iterations = 300;
    std::uint64_t append_chunk = 128;
};

struct BenchResult {
    Workload workload = Workload::SequentialStream;
    double direct_ms = 0;
    double overlay_ms = 0;
    std::uint64_t failed_ops = 0; // across both executions
    bool trees_identical = false;
    double slowdown() const { return direct_ms > 0 ? overlay_ms / direct_ms : 0; }
};

// Runs the workload twice under `work_dir`: directly against a scratch
// directory and through an inactive-pipeline overlay mount, then compares
// the resulting trees.
BenchResult run_bench(Workload workload, const std::string& work_dir,
                      const BenchParams& params = {});

std::string bench_to_json(const std::vector<BenchResult>& results);

} // namespace mtfs
