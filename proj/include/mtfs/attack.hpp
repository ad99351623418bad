#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <set>
#include <string>

#include "mtfs/fs_client.hpp"
#include "mtfs/magic.hpp"

namespace mtfs {

enum class Traversal {
    SortedDFS,
    UnsortedDFS,
    BFS,
    PreListThenEncrypt,
};

enum class EncryptionMode {
    InPlaceOverwrite,
    OverwriteThenRename,
    CreateNewDeleteOld,
};

enum class AttackTermination {
    Completed,
    BudgetExhausted,
    PathTooLong,
    Crashed,
};

const char* to_string(Traversal t);
const char* to_string(EncryptionMode m);
const char* to_string(AttackTermination t);

// Parameterized simulated ransomware. Spans the observed behavior matrix:
// exploration strategy, in-place vs rename vs create+delete modification,
// and optional file-type filtering via magic-byte sniffing. Deliberately
// naive about traversal cycles.
struct AttackProfile {
    Traversal traversal = Traversal::SortedDFS;
    EncryptionMode encryption_mode = EncryptionMode::InPlaceOverwrite;
    std::optional<std::set<FileType>> type_filter;
    std::chrono::milliseconds budget{30000};
    std::string rename_suffix = ".GNNCRY";
    std::optional<std::uint32_t> max_depth;
    std::uint64_t key = 0x6b6579;
};

struct AttackReport {
    std::uint64_t files_visited = 0;
    std::uint64_t files_encrypted = 0;
    std::uint64_t bytes_written = 0;
    std::chrono::milliseconds elapsed{0};
    AttackTermination terminated_by = AttackTermination::Completed;
};

// Live counters for mid-attack observation (control-plane experiments).
struct AttackProgress {
    std::atomic<std::uint64_t> files_encrypted{0};
    std::atomic<std::uint64_t> files_visited{0};
};

// Keyed byte-wise stream transform; cryptographic strength is irrelevant to
// the experiments, it only needs to change every byte deterministically.
std::string keystream_transform(const std::string& data, std::uint64_t key);

// Applies the encryption mode to one file through the client. Returns bytes
// written, or nullopt when the file could not be modified.
std::optional<std::uint64_t> encrypt_file(FsClient& client, const std::string& path,
                                          EncryptionMode mode, const std::string& rename_suffix,
                                          std::uint64_t key);

AttackReport run_attack(const AttackProfile& profile, FsClient& client,
                        AttackProgress* progress = nullptr);

// Convenience wrapper over a raw directory.
AttackReport run_attack(const AttackProfile& profile, const std::string& root);

std::string profile_to_json(const AttackProfile& profile);
AttackProfile profile_from_json(const std::string& text); // throws std::invalid_argument
std::string report_to_json(const AttackReport& report);

} // namespace mtfs
