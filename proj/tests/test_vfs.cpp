#include <doctest.h>

#include <atomic>
#include <thread>

#include "mtfs/config.hpp"
#include "mtfs/fs_client.hpp"
#include "mtfs/overlay.hpp"
#include "mtfs/snapshot.hpp"
#include "replay_oracle.hpp"
#include "test_util.hpp"

using namespace mtfs;
using testutil::TempDir;
using testutil::write_file;

namespace {

MountConfig basic_config(TempDir& tmp, std::vector<TechniqueConfig> techniques = {}) {
    MountConfig cfg;
    cfg.underlay_root = tmp.mkdir("under");
    cfg.mountpoint = tmp.mkdir("mnt");
    cfg.techniques = std::move(techniques);
    return cfg;
}

} // namespace

TEST_CASE("empty pipeline mount lists the underlay") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    write_file(tmp / "under/a.txt", "hello");
    write_file(tmp / "under/b.txt", "world");

    auto handle = mount(cfg);
    OpRequest req;
    req.op = OpKind::ReadDir;
    req.node = handle.overlay().root();
    auto res = handle.overlay().dispatch(req);
    REQUIRE(res.ok());
    REQUIRE(res.entries->size() == 2);
    CHECK((*res.entries)[0].name == "a.txt");
    CHECK((*res.entries)[1].name == "b.txt");
}

TEST_CASE("mount rejects a missing underlay") {
    TempDir tmp;
    MountConfig cfg;
    cfg.underlay_root = (tmp / "nope").string();
    cfg.mountpoint = tmp.mkdir("mnt");
    try {
        mount(cfg);
        FAIL("expected MountError");
    } catch (const MountError& e) {
        CHECK(e.code() == MountErrorCode::UnderlayMissing);
    }
}

TEST_CASE("mountpoint nested in the underlay is rejected at validation") {
    TempDir tmp;
    MountConfig cfg;
    cfg.underlay_root = tmp.mkdir("under");
    cfg.mountpoint = tmp.mkdir("under/mnt");
    auto err = validate_mount_config(cfg);
    REQUIRE(err.has_value());
    CHECK(err->find("nested") != std::string::npos);
    CHECK_THROWS_AS(mount(cfg), MountError);
}

TEST_CASE("second mount on the same mountpoint is busy") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    auto first = mount(cfg);
    try {
        mount(cfg);
        FAIL("expected MountError");
    } catch (const MountError& e) {
        CHECK(e.code() == MountErrorCode::MountpointBusy);
    }
    first.unmount();
    auto again = mount(cfg); // released after unmount
    CHECK(again.mounted());
}

TEST_CASE("passthrough read returns the file prefix") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    write_file(tmp / "under/f.bin", "0123456789abcdef");
    auto handle = mount(cfg);
    OverlayClient client(handle.overlay());

    auto r = client.read("f.bin", 0, 16);
    CHECK(r.status == Status::Ok);
    CHECK(r.data == "0123456789abcdef");

    // reads past EOF clamp
    auto r2 = client.read("f.bin", 10, 100);
    CHECK(r2.data == "abcdef");
}

TEST_CASE("unlink of a nonexistent name is NotFound") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    auto handle = mount(cfg);
    OverlayClient client(handle.overlay());
    CHECK(client.unlink("ghost.txt") == Status::NotFound);
}

TEST_CASE("readonly mount rejects writes") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    cfg.readonly = true;
    write_file(tmp / "under/f.txt", "data");
    auto handle = mount(cfg);
    OverlayClient client(handle.overlay());
    CHECK(client.write("f.txt", 0, "XXXX") == Status::NotPermitted);
    CHECK(client.read("f.txt", 0, 4).data == "data");
}

TEST_CASE("randomized op replay matches direct access") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    std::string direct = tmp.mkdir("direct");
    for (int i = 0; i < 8; ++i) {
        std::string rel = (i % 2 ? "sub/" : "") + std::string("seed") + std::to_string(i) + ".txt";
        std::string content(100 + i * 37, static_cast<char>('A' + i));
        write_file(tmp / ("under/" + rel), content);
        write_file(tmp / ("direct/" + rel), content);
    }

    auto handle = mount(cfg);
    OverlayClient overlay_client(handle.overlay());
    DirectFs direct_client(direct);

    auto result = testutil::replay_random_ops(overlay_client, direct_client, 42, 300);
    CHECK(result.mismatches == 0);
    INFO(result.first_mismatch);

    handle.unmount();
    Snapshot a = snapshot((tmp / "under").string());
    Snapshot b = snapshot(direct);
    a.root_identity = b.root_identity = "replay";
    auto d = diff(a, b);
    CHECK(d.bytes_changed == 0);
    CHECK(d.count(Change::Unmodified) == d.entries.size());
}

TEST_CASE("dispatch totality and event completeness") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    write_file(tmp / "under/x.txt", "x");
    auto handle = mount(cfg);
    std::uint64_t events = 0;
    handle.overlay().add_event_sink([&events](const SyscallEvent&) { ++events; });

    OverlayClient client(handle.overlay());
    client.list_dir("");
    client.read("x.txt", 0, 1);
    client.stat("x.txt");
    client.open("missing");
    CHECK(events == handle.overlay().dispatched());
    CHECK(events > 0);
}

namespace {

// Technique that always throws; dispatch must fall back to passthrough.
class FaultyTechnique : public Technique {
public:
    FaultyTechnique() : Technique([] {
        TechniqueConfig cfg;
        cfg.kind = TechniqueKind::Delay;
        cfg.active = true;
        return cfg;
    }()) {
        set_active(true);
    }
    PrePhaseOutcome pre(OpRequest&, DispatchContext&) override {
        throw std::runtime_error("pre blew up");
    }
    void post(const OpRequest&, OpResult& res, DispatchContext&) override {
        res.data = "corrupted";
        throw std::runtime_error("post blew up");
    }
};

} // namespace

TEST_CASE("crash isolation: a faulty technique degrades to passthrough") {
    TempDir tmp;
    auto cfg = basic_config(tmp);
    write_file(tmp / "under/f.txt", "intact");
    auto handle = mount(cfg);
    handle.overlay().pipeline().add(std::make_unique<FaultyTechnique>());

    OverlayClient client(handle.overlay());
    auto r = client.read("f.txt", 0, 6);
    CHECK(r.status == Status::Ok);
    CHECK(r.data == "intact");
}

TEST_CASE("concurrent dispatch is safe and accounted") {
    TempDir tmp;
    auto cfg = basic_config(tmp, default_techniques());
    for (int i = 0; i < 10; ++i) {
        write_file(tmp / ("under/f" + std::to_string(i) + ".txt"), std::string(256, 'z'));
    }
    auto handle = mount(cfg);
    std::atomic<std::uint64_t> events{0};
    handle.overlay().add_event_sink([&events](const SyscallEvent&) { ++events; });

    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&handle, t] {
            OverlayClient client(handle.overlay());
            for (int i = 0; i < 50; ++i) {
                client.list_dir("");
                client.read("f" + std::to_string(i % 10) + ".txt", 0, 64);
                if (i % 10 == 0) {
                    handle.overlay().pipeline().controller_set(TechniqueKind::InfiniteDir,
                                                               t % 2 == 0);
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(events.load() == handle.overlay().dispatched());
}
