#include "mtfs/snapshot.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace fs = std::filesystem;

namespace mtfs {

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

const char* to_string(Change c) {
    switch (c) {
    case Change::Unmodified: return "Unmodified";
    case Change::Modified: return "Modified";
    case Change::Moved: return "Moved";
    case Change::Deleted: return "Deleted";
    case Change::Created: return "Created";
    }
    return "?";
}

std::uint64_t DiffReport::count(Change c) const {
    return static_cast<std::uint64_t>(
        std::count_if(entries.begin(), entries.end(),
                      [c](const DiffEntry& e) { return e.change == c; }));
}

namespace {

std::int64_t wall_now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string hash_file(const fs::path& p, bool& ok) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        ok = false;
        return {};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    ok = in.good() || in.eof();
    return sha256_hex(ss.str());
}

void walk(const fs::path& root, const fs::path& dir, const std::set<std::string>& exclude,
          Snapshot& snap) {
    std::error_code ec;
    for (const auto& de : fs::directory_iterator(dir, ec)) {
        std::string name = de.path().filename().string();
        if (exclude.count(name)) continue;
        std::string rel = fs::relative(de.path(), root, ec).generic_string();
        FileRecord rec;
        rec.path = rel;
        if (de.is_symlink()) {
            rec.kind = RecordKind::Symlink;
        } else if (de.is_directory()) {
            rec.kind = RecordKind::Dir;
            snap.records[rel] = rec;
            walk(root, de.path(), exclude, snap);
            continue;
        } else {
            rec.kind = RecordKind::File;
            rec.size = de.file_size(ec);
            bool ok = true;
            rec.content_hash = hash_file(de.path(), ok);
            if (!ok) {
                rec.unreadable = true;
                rec.content_hash.clear();
            }
        }
        snap.records[rel] = rec;
    }
}

} // namespace

Snapshot snapshot(const std::string& root, const std::set<std::string>& exclude) {
    Snapshot snap;
    snap.root_identity = root;
    snap.captured_ns = wall_now_ns();
    walk(root, root, exclude, snap);
    return snap;
}

namespace {

void walk_client(FsClient& client, const std::string& dir, const std::set<std::string>& exclude,
                 Snapshot& snap) {
    auto listing = client.list_dir(dir);
    if (listing.status != Status::Ok) return;
    for (const auto& e : listing.entries) {
        if (exclude.count(e.name)) continue;
        std::string rel = dir.empty() ? e.name : dir + "/" + e.name;
        FileRecord rec;
        rec.path = rel;
        if (e.kind == NodeKind::RealDir || e.kind == NodeKind::TrapDir) {
            rec.kind = RecordKind::Dir;
            snap.records[rel] = rec;
            walk_client(client, rel, exclude, snap);
            continue;
        }
        rec.kind = RecordKind::File;
        std::string content;
        for (;;) {
            auto chunk = client.read(rel, content.size(), 1 << 16);
            if (chunk.status != Status::Ok) {
                rec.unreadable = true;
                break;
            }
            content += chunk.data;
            if (chunk.data.size() < (1 << 16)) break;
        }
        if (!rec.unreadable) {
            rec.size = content.size();
            rec.content_hash = sha256_hex(content);
        }
        snap.records[rel] = rec;
    }
}

} // namespace

Snapshot snapshot_via(FsClient& client, const std::string& identity,
                      const std::set<std::string>& exclude) {
    Snapshot snap;
    snap.root_identity = identity;
    snap.captured_ns = wall_now_ns();
    walk_client(client, "", exclude, snap);
    return snap;
}

DiffReport diff(const Snapshot& before, const Snapshot& after) {
    if (before.root_identity != after.root_identity) {
        throw std::invalid_argument("diff: snapshots have different root identities");
    }
    DiffReport report;

    // content hash -> after-only paths; the move criterion
    std::unordered_map<std::string, std::vector<std::string>> new_by_hash;
    for (const auto& [path, rec] : after.records) {
        if (rec.kind == RecordKind::File && !rec.unreadable && !before.records.count(path)) {
            new_by_hash[rec.content_hash].push_back(path);
        }
    }

    std::set<std::string> claimed; // after paths consumed as move targets

    for (const auto& [path, rec] : before.records) {
        if (rec.kind == RecordKind::File && !rec.unreadable) {
            report.bytes_total += rec.size;
        }
        auto it = after.records.find(path);
        if (it != after.records.end()) {
            const FileRecord& now = it->second;
            if (rec.kind != RecordKind::File || now.kind != RecordKind::File) {
                report.entries.push_back({path, rec.kind == now.kind ? Change::Unmodified
                                                                     : Change::Modified});
                if (rec.kind == RecordKind::File && rec.kind != now.kind) {
                    report.bytes_changed += rec.size;
                }
                continue;
            }
            if (now.content_hash == rec.content_hash && now.size == rec.size) {
                report.entries.push_back({path, Change::Unmodified});
            } else {
                report.entries.push_back({path, Change::Modified});
                report.bytes_changed += rec.size;
            }
            continue;
        }
        // gone from its old path
        if (rec.kind == RecordKind::File && !rec.unreadable) {
            auto cand = new_by_hash.find(rec.content_hash);
            if (cand != new_by_hash.end()) {
                auto& paths = cand->second;
                auto free_it = std::find_if(paths.begin(), paths.end(), [&](const std::string& p) {
                    return !claimed.count(p);
                });
                if (free_it != paths.end()) {
                    claimed.insert(*free_it);
                    report.entries.push_back({path, Change::Moved, *free_it});
                    continue;
                }
            }
            report.bytes_changed += rec.size;
        }
        report.entries.push_back({path, Change::Deleted});
    }

    for (const auto& [path, rec] : after.records) {
        (void)rec;
        if (!before.records.count(path) && !claimed.count(path)) {
            report.entries.push_back({path, Change::Created});
        }
    }
    return report;
}

double bytes_saved(double baseline_bytes, double defended_bytes) {
    if (baseline_bytes <= 0) return 100.0;
    double pct = 100.0 * (1.0 - defended_bytes / baseline_bytes);
    return std::clamp(pct, 0.0, 100.0);
}

double bytes_saved(const DiffReport& baseline, const DiffReport& defended) {
    return bytes_saved(static_cast<double>(baseline.bytes_changed),
                       static_cast<double>(defended.bytes_changed));
}

namespace {

const char* kind_str(RecordKind k) {
    switch (k) {
    case RecordKind::File: return "File";
    case RecordKind::Dir: return "Dir";
    case RecordKind::Symlink: return "Symlink";
    }
    return "?";
}

} // namespace

std::string serialize_snapshot(const Snapshot& snap) {
    std::ostringstream out;
    out << "# mtfs-snapshot 1\t" << snap.root_identity << "\t" << snap.captured_ns << "\n";
    for (const auto& [path, rec] : snap.records) {
        out << path << "\t" << rec.size << "\t"
            << (rec.kind == RecordKind::File && !rec.unreadable ? rec.content_hash : "-") << "\t"
            << kind_str(rec.kind);
        if (rec.unreadable) out << "\tunreadable";
        out << "\n";
    }
    return out.str();
}

Snapshot parse_snapshot(const std::string& text) {
    Snapshot snap;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) tab = line.size();
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (first && cols.size() >= 3 && cols[0] == "# mtfs-snapshot 1") {
            snap.root_identity = cols[1];
            snap.captured_ns = std::stoll(cols[2]);
            first = false;
            continue;
        }
        first = false;
        if (cols.size() < 4) throw std::invalid_argument("bad snapshot line: " + line);
        FileRecord rec;
        rec.path = cols[0];
        rec.size = std::stoull(cols[1]);
        if (cols[2] != "-") rec.content_hash = cols[2];
        if (cols[3] == "File") rec.kind = RecordKind::File;
        else if (cols[3] == "Dir") rec.kind = RecordKind::Dir;
        else if (cols[3] == "Symlink") rec.kind = RecordKind::Symlink;
        else throw std::invalid_argument("bad record kind: " + cols[3]);
        if (cols.size() > 4 && cols[4] == "unreadable") rec.unreadable = true;
        snap.records[rec.path] = rec;
    }
    return snap;
}

std::string diff_to_json(const DiffReport& report) {
    nlohmann::json j;
    j["bytes_changed"] = report.bytes_changed;
    j["bytes_total"] = report.bytes_total;
    nlohmann::json counts;
    for (Change c : {Change::Unmodified, Change::Modified, Change::Moved, Change::Deleted,
                     Change::Created}) {
        counts[to_string(c)] = report.count(c);
    }
    j["counts"] = counts;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json je{{"path", e.path}, {"change", to_string(e.change)}};
        if (e.moved_to) je["moved_to"] = *e.moved_to;
        j["entries"].push_back(je);
    }
    return j.dump(2);
}

std::string diff_to_table(const DiffReport& report) {
    std::ostringstream out;
    std::size_t width = 10;
    for (const auto& e : report.entries) width = std::max(width, e.path.size());
    for (const auto& e : report.entries) {
        out << e.path << std::string(width - e.path.size() + 2, ' ') << to_string(e.change);
        if (e.moved_to) out << " -> " << *e.moved_to;
        out << "\n";
    }
    out << "bytes_changed=" << report.bytes_changed << " bytes_total=" << report.bytes_total
        << "\n";
    return out.str();
}

} // namespace mtfs
