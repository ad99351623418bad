#include "mtfs/bench.hpp"

#include <chrono>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "mtfs/config.hpp"
#include "mtfs/overlay.hpp"
#include "mtfs/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mtfs {

const char* to_string(Workload w) {
    switch (w) {
    case Workload::SequentialStream: return "sequential_stream";
    case Workload::SmallFiles: return "small_files";
    case Workload::PeriodicAppend: return "periodic_append";
    }
    return "?";
}

namespace {

std::string payload_block(std::uint64_t size, std::uint64_t salt) {
    std::string out(size, '\0');
    std::mt19937_64 rng(0xbe6c << 8 | salt);
    for (auto& c : out) c = static_cast<char>(rng() & 0xff);
    return out;
}

std::uint64_t run_workload(Workload w, FsClient& client, const BenchParams& p) {
    std::uint64_t failed = 0;
    auto check = [&failed](Status st) {
        if (st != Status::Ok) ++failed;
    };

    switch (w) {
    case Workload::SequentialStream: {
        check(client.create("stream.bin"));
        std::uint64_t off = 0, chunk_no = 0;
        while (off < p.stream_bytes) {
            std::string chunk = payload_block(p.stream_chunk, chunk_no++);
            check(client.write("stream.bin", off, chunk));
            off += chunk.size();
        }
        // read-back pass
        off = 0;
        chunk_no = 0;
        while (off < p.stream_bytes) {
            auto r = client.read("stream.bin", off, p.stream_chunk);
            check(r.status);
            if (r.data != payload_block(p.stream_chunk, chunk_no++)) ++failed;
            off += p.stream_chunk;
        }
        break;
    }
    case Workload::SmallFiles: {
        for (std::uint64_t i = 0; i < p.small_file_count; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "small%04llu.dat",
                          static_cast<unsigned long long>(i));
            std::string content = payload_block(p.small_file_size, i);
            check(client.create(name));
            check(client.write(name, 0, content));
            auto r = client.read(name, 0, p.small_file_size);
            check(r.status);
            if (r.data != content) ++failed;
        }
        break;
    }
    case Workload::PeriodicAppend: {
        check(client.create("sensor.log"));
        std::uint64_t off = 0;
        for (std::uint64_t i = 0; i < p.append_iterations; ++i) {
            std::string line = payload_block(p.append_chunk, i);
            check(client.write("sensor.log", off, line));
            off += line.size();
        }
        break;
    }
    }
    return failed;
}

double time_ms(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

BenchResult run_bench(Workload workload, const std::string& work_dir, const BenchParams& params) {
    fs::path work(work_dir);
    std::error_code ec;
    fs::remove_all(work, ec);
    fs::path direct_dir = work / "direct";
    fs::path under = work / "underlay";
    fs::path mnt = work / "mnt";
    fs::create_directories(direct_dir);
    fs::create_directories(under);
    fs::create_directories(mnt);

    BenchResult result;
    result.workload = workload;

    {
        DirectFs client(direct_dir.string());
        result.direct_ms = time_ms([&] { result.failed_ops += run_workload(workload, client, params); });
    }
    {
        MountConfig cfg;
        cfg.underlay_root = fs::absolute(under).string();
        cfg.mountpoint = fs::absolute(mnt).string();
        cfg.techniques = default_techniques(); // configured, all inactive
        MountHandle handle = mount(cfg);
        OverlayClient client(handle.overlay());
        result.overlay_ms =
            time_ms([&] { result.failed_ops += run_workload(workload, client, params); });
        handle.unmount();
    }

    Snapshot a = snapshot(direct_dir.string());
    Snapshot b = snapshot(under.string());
    a.root_identity = b.root_identity = "bench";
    DiffReport d = diff(a, b);
    result.trees_identical =
        d.bytes_changed == 0 && d.count(Change::Created) == 0 && d.count(Change::Deleted) == 0 &&
        d.count(Change::Modified) == 0 && d.count(Change::Moved) == 0;
    return result;
}

std::string bench_to_json(const std::vector<BenchResult>& results) {
    json j = json::array();
    for (const auto& r : results) {
        j.push_back({
            {"workload", to_string(r.workload)},
            {"direct_ms", r.direct_ms},
            {"overlay_ms", r.overlay_ms},
            {"slowdown", r.slowdown()},
            {"failed_ops", r.failed_ops},
            {"trees_identical", r.trees_identical},
        });
    }
    return j.dump(2);
}

} // namespace mtfs
