#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtfs/fs_client.hpp"

namespace mtfs {

std::string sha256_hex(const std::string& data);

enum class RecordKind {
    File,
    Dir,
    Symlink,
};

struct FileRecord {
    std::string path; // normalized, relative
    std::uint64_t size = 0;
    std::string content_hash; // hex digest; files only
    RecordKind kind = RecordKind::File;
    bool unreadable = false;
};

struct Snapshot {
    std::string root_identity;
    std::int64_t captured_ns = 0;
    std::map<std::string, FileRecord> records;
};

enum class Change {
    Unmodified,
    Modified,
    Moved,
    Deleted,
    Created,
};

const char* to_string(Change c);

struct DiffEntry {
    std::string path; // before-path for Moved/Deleted, after-path otherwise
    Change change = Change::Unmodified;
    std::optional<std::string> moved_to;
};

struct DiffReport {
    std::vector<DiffEntry> entries;
    std::uint64_t bytes_changed = 0; // whole-file sizes of Modified + Deleted
    std::uint64_t bytes_total = 0;   // corpus size before
    std::uint64_t count(Change c) const;
};

// Walks a real directory tree, hashing every regular file. Symlinks are
// recorded but never followed. Entry names in `exclude` are skipped at any
// depth (used for the virtual trap name and the mount lock file).
Snapshot snapshot(const std::string& root, const std::set<std::string>& exclude = {});

// Same walk through an FsClient (lets a snapshot see the obfuscated view of
// a mount). `identity` labels the snapshot for diffing.
Snapshot snapshot_via(FsClient& client, const std::string& identity,
                      const std::set<std::string>& exclude = {});

// Per-file classification; throws std::invalid_argument when the snapshots
// have different root identities.
DiffReport diff(const Snapshot& before, const Snapshot& after);

// 100 * (1 - defended/baseline), clamped to [0, 100]; 100 when the baseline
// lost nothing.
double bytes_saved(const DiffReport& baseline, const DiffReport& defended);
double bytes_saved(double baseline_bytes, double defended_bytes);

// Line format: path TAB size TAB hex-digest TAB kind.
std::string serialize_snapshot(const Snapshot& snap);
Snapshot parse_snapshot(const std::string& text);

std::string diff_to_json(const DiffReport& report);
std::string diff_to_table(const DiffReport& report);

} // namespace mtfs
