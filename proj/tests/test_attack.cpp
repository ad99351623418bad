#include <doctest.h>

#include <filesystem>

#include "mtfs/attack.hpp"
#include "mtfs/config.hpp"
#include "mtfs/corpus.hpp"
#include "mtfs/overlay.hpp"
#include "mtfs/snapshot.hpp"
#include "test_util.hpp"

using namespace mtfs;
using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

namespace {

std::string make_corpus(TempDir& tmp, const std::string& sub, std::uint64_t count,
                        std::uint64_t seed = 1, std::uint32_t dirs = 0) {
    CorpusSpec spec;
    spec.file_count = count;
    spec.seed = seed;
    spec.dirs = dirs;
    spec.min_size = 256;
    spec.max_size = 2048;
    std::string out = (tmp / sub).string();
    generate_corpus(spec, out);
    return out;
}

} // namespace

TEST_CASE("keystream transform changes every byte and round-trips") {
    std::string data = "The quick brown fox jumps over the lazy dog\0\x01\x02";
    std::string enc = keystream_transform(data, 42);
    REQUIRE(enc.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) CHECK(enc[i] != data[i]);
    CHECK(keystream_transform(enc, 42) == data);
}

TEST_CASE("encrypt_file modes") {
    TempDir tmp;
    DirectFs client(tmp.str());

    SUBCASE("in-place overwrite preserves size, changes content") {
        std::string content(1024, 'q');
        write_file(tmp / "a.bin", content);
        auto written = encrypt_file(client, "a.bin", EncryptionMode::InPlaceOverwrite, "", 7);
        REQUIRE(written.has_value());
        CHECK(*written == 1024);
        std::string after = read_file(tmp / "a.bin");
        CHECK(after.size() == 1024);
        CHECK(sha256_hex(after) != sha256_hex(content));
    }

    SUBCASE("overwrite-then-rename leaves only the suffixed file") {
        write_file(tmp / "a.txt", "hello");
        auto written =
            encrypt_file(client, "a.txt", EncryptionMode::OverwriteThenRename, ".GNNCRY", 7);
        REQUIRE(written.has_value());
        CHECK(std::filesystem::exists(tmp / "a.txt.GNNCRY"));
        CHECK(!std::filesystem::exists(tmp / "a.txt"));
    }

    SUBCASE("create-new-delete-old writes a sibling") {
        write_file(tmp / "a.txt", "hello");
        auto written =
            encrypt_file(client, "a.txt", EncryptionMode::CreateNewDeleteOld, ".enc", 7);
        REQUIRE(written.has_value());
        CHECK(std::filesystem::exists(tmp / "a.txt.enc"));
        CHECK(!std::filesystem::exists(tmp / "a.txt"));
        CHECK(read_file(tmp / "a.txt.enc") == keystream_transform("hello", 7));
    }

    SUBCASE("zero-byte file still completes") {
        write_file(tmp / "empty.txt", "");
        auto written = encrypt_file(client, "empty.txt", EncryptionMode::InPlaceOverwrite, "", 7);
        REQUIRE(written.has_value());
        CHECK(*written == 0);
    }
}

TEST_CASE("undefended attack encrypts the whole corpus") {
    TempDir tmp;
    std::string root = make_corpus(tmp, "corpus", 50, 1, 3);
    AttackProfile profile;
    profile.budget = std::chrono::seconds(30);
    auto report = run_attack(profile, root);
    CHECK(report.files_encrypted == 50);
    CHECK(report.files_visited == 50);
    CHECK(report.terminated_by == AttackTermination::Completed);
    CHECK(report.bytes_written > 0);
}

TEST_CASE("attack reports are deterministic under a fixed seed (timing aside)") {
    TempDir tmp;
    AttackProfile profile;
    profile.traversal = Traversal::PreListThenEncrypt;
    profile.encryption_mode = EncryptionMode::OverwriteThenRename;
    profile.budget = std::chrono::seconds(30);

    std::string a = make_corpus(tmp, "a", 30, 9);
    std::string b = make_corpus(tmp, "b", 30, 9);
    auto ra = run_attack(profile, a);
    auto rb = run_attack(profile, b);
    CHECK(ra.files_encrypted == rb.files_encrypted);
    CHECK(ra.files_visited == rb.files_visited);
    CHECK(ra.bytes_written == rb.bytes_written);
    CHECK(ra.terminated_by == rb.terminated_by);
}

TEST_CASE("budget is respected within the grace period") {
    TempDir tmp;
    std::string root = make_corpus(tmp, "corpus", 200);
    AttackProfile profile;
    profile.budget = std::chrono::milliseconds(50);
    auto t0 = std::chrono::steady_clock::now();
    auto report = run_attack(profile, root);
    auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(elapsed <= profile.budget + std::chrono::seconds(1));
    CHECK(report.elapsed <= profile.budget + std::chrono::seconds(1));
}

TEST_CASE("unreadable root crashes with zero counters") {
    AttackProfile profile;
    DirectFs client("/no/such/root");
    auto report = run_attack(profile, client);
    CHECK(report.terminated_by == AttackTermination::Crashed);
    CHECK(report.files_visited == 0);
    CHECK(report.files_encrypted == 0);
}

TEST_CASE("sorted DFS attacker dies in the trap") {
    TempDir tmp;
    make_corpus(tmp, "under", 40);
    MountConfig cfg;
    cfg.underlay_root = (tmp / "under").string();
    cfg.mountpoint = tmp.mkdir("mnt");
    cfg.techniques = default_techniques();
    for (auto& t : cfg.techniques) t.active = t.kind == TechniqueKind::InfiniteDir;
    auto handle = mount(cfg);
    OverlayClient client(handle.overlay());

    AttackProfile profile;
    profile.budget = std::chrono::seconds(20);
    auto report = run_attack(profile, client);
    CHECK(report.files_encrypted == 0);
    CHECK((report.terminated_by == AttackTermination::PathTooLong ||
           report.terminated_by == AttackTermination::BudgetExhausted));
}

TEST_CASE("hardened attacker with max_depth escapes the trap") {
    TempDir tmp;
    make_corpus(tmp, "under", 10);
    MountConfig cfg;
    cfg.underlay_root = (tmp / "under").string();
    cfg.mountpoint = tmp.mkdir("mnt");
    cfg.techniques = default_techniques();
    for (auto& t : cfg.techniques) t.active = t.kind == TechniqueKind::InfiniteDir;
    auto handle = mount(cfg);
    OverlayClient client(handle.overlay());

    AttackProfile profile;
    profile.max_depth = 3;
    profile.budget = std::chrono::seconds(20);
    auto report = run_attack(profile, client);
    CHECK(report.files_encrypted == 10); // sensitivity knob: trap defeated
}

TEST_CASE("type-filtering attacker is blinded by magic obfuscation") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 30;
    spec.seed = 3;
    spec.type_mix = {{FileType::Pdf, 0.5}, {FileType::Png, 0.5}};
    generate_corpus(spec, (tmp / "under").string());

    AttackProfile profile;
    profile.type_filter = std::set<FileType>{FileType::Pdf, FileType::Png};
    profile.budget = std::chrono::seconds(20);

    // undefended: every file passes the filter
    std::string copy = (tmp / "copy").string();
    std::filesystem::copy(tmp / "under", copy, std::filesystem::copy_options::recursive);
    auto baseline = run_attack(profile, copy);
    CHECK(baseline.files_encrypted == 30);

    MountConfig cfg;
    cfg.underlay_root = (tmp / "under").string();
    cfg.mountpoint = tmp.mkdir("mnt");
    cfg.techniques = default_techniques();
    for (auto& t : cfg.techniques) t.active = t.kind == TechniqueKind::Suffix;
    auto handle = mount(cfg);
    OverlayClient client(handle.overlay());
    auto defended = run_attack(profile, client);
    CHECK(defended.files_encrypted == 0);
    CHECK(defended.files_visited == 30);
}

TEST_CASE("profile json round-trip and validation") {
    AttackProfile p;
    p.traversal = Traversal::BFS;
    p.encryption_mode = EncryptionMode::CreateNewDeleteOld;
    p.type_filter = std::set<FileType>{FileType::Pdf};
    p.budget = std::chrono::milliseconds(1234);
    p.max_depth = 9;
    AttackProfile back = profile_from_json(profile_to_json(p));
    CHECK(back.traversal == p.traversal);
    CHECK(back.encryption_mode == p.encryption_mode);
    CHECK(back.type_filter == p.type_filter);
    CHECK(back.budget == p.budget);
    CHECK(back.max_depth == p.max_depth);

    CHECK_THROWS_AS(profile_from_json(R"({"traversal": "sideways"})"), std::invalid_argument);
    CHECK_THROWS_AS(profile_from_json(R"({"budget_ms": 0})"), std::invalid_argument);
    CHECK_THROWS_AS(profile_from_json(R"({"mode": "overwrite_rename", "rename_suffix": ""})"),
                    std::invalid_argument);
}
