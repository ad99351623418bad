#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "mtfs/fs_client.hpp"

namespace testutil {

// Replays a seeded random operation sequence against two FsClients and
// checks that every result is identical. Used to pin the overlay (with an
// inactive pipeline) against direct underlay access.
struct ReplayResult {
    std::size_t executed = 0;
    std::size_t mismatches = 0;
    std::string first_mismatch;
};

inline ReplayResult replay_random_ops(mtfs::FsClient& a, mtfs::FsClient& b, std::uint64_t seed,
                                      std::size_t op_count) {
    using namespace mtfs;
    std::mt19937_64 rng(seed);
    ReplayResult result;

    std::vector<std::string> dirs{""};
    std::vector<std::string> files;
    {
        // discover the initial tree through client a
        std::vector<std::string> stack{""};
        while (!stack.empty()) {
            std::string dir = stack.back();
            stack.pop_back();
            auto listing = a.list_dir(dir);
            for (const auto& e : listing.entries) {
                std::string path = dir.empty() ? e.name : dir + "/" + e.name;
                if (e.kind == NodeKind::RealDir) {
                    dirs.push_back(path);
                    stack.push_back(path);
                } else {
                    files.push_back(path);
                }
            }
        }
    }

    auto pick = [&rng](const std::vector<std::string>& v) -> std::string {
        if (v.empty()) return "<none>";
        std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
        return v[d(rng)];
    };
    auto note = [&result](const std::string& what) {
        ++result.mismatches;
        if (result.first_mismatch.empty()) result.first_mismatch = what;
    };
    std::uint64_t name_counter = 0;

    for (std::size_t i = 0; i < op_count; ++i) {
        ++result.executed;
        std::uniform_int_distribution<int> op_pick(0, 8);
        switch (op_pick(rng)) {
        case 0: { // list
            std::string dir = pick(dirs);
            auto ra = a.list_dir(dir);
            auto rb = b.list_dir(dir);
            if (ra.status != rb.status || ra.entries != rb.entries) note("list " + dir);
            break;
        }
        case 1: { // stat (sometimes bogus)
            std::string p = rng() % 4 == 0 ? "no/such/path" : pick(files);
            auto ra = a.stat(p);
            auto rb = b.stat(p);
            if (ra.status != rb.status) note("stat " + p);
            if (ra.status == Status::Ok &&
                (ra.attrs.size != rb.attrs.size || ra.attrs.kind != rb.attrs.kind)) {
                note("stat attrs " + p);
            }
            break;
        }
        case 2:
        case 3: { // read
            std::string f = pick(files);
            std::uint64_t off = rng() % 4096;
            std::uint64_t len = 1 + rng() % 2048;
            auto ra = a.read(f, off, len);
            auto rb = b.read(f, off, len);
            if (ra.status != rb.status || ra.data != rb.data) note("read " + f);
            break;
        }
        case 4: { // write
            if (files.empty()) break;
            std::string f = pick(files);
            std::uint64_t off = rng() % 2048;
            std::string payload(1 + rng() % 512, static_cast<char>('a' + rng() % 26));
            auto sa = a.write(f, off, payload);
            auto sb = b.write(f, off, payload);
            if (sa != sb) note("write " + f);
            break;
        }
        case 5: { // create
            std::string dir = pick(dirs);
            std::string name = "gen" + std::to_string(name_counter++) + ".dat";
            std::string path = dir.empty() ? name : dir + "/" + name;
            auto sa = a.create(path);
            auto sb = b.create(path);
            if (sa != sb) note("create " + path);
            if (sa == Status::Ok) files.push_back(path);
            break;
        }
        case 6: { // unlink (sometimes bogus)
            std::string f = rng() % 5 == 0 ? "missing.dat" : pick(files);
            auto sa = a.unlink(f);
            auto sb = b.unlink(f);
            if (sa != sb) note("unlink " + f);
            if (sa == Status::Ok) std::erase(files, f);
            break;
        }
        case 7: { // rename within the same directory
            if (files.empty()) break;
            std::string f = pick(files);
            std::string to = f + ".r" + std::to_string(name_counter++);
            auto sa = a.rename(f, to);
            auto sb = b.rename(f, to);
            if (sa != sb) note("rename " + f);
            if (sa == Status::Ok) {
                std::erase(files, f);
                files.push_back(to);
            }
            break;
        }
        case 8: { // open
            std::string f = rng() % 4 == 0 ? "absent.bin" : pick(files);
            if (a.open(f) != b.open(f)) note("open " + f);
            break;
        }
        }
    }
    return result;
}

} // namespace testutil
