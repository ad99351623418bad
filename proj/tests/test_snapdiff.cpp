#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>

#include "mtfs/config.hpp"
#include "mtfs/corpus.hpp"
#include "mtfs/overlay.hpp"
#include "mtfs/snapshot.hpp"
#include "test_util.hpp"

using namespace mtfs;
using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

TEST_CASE("sha256 matches the published test vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("snapshot records files, dirs and skips excluded names") {
    TempDir tmp;
    write_file(tmp / "root/a.txt", "abc");
    write_file(tmp / "root/sub/b.txt", "xyz");
    write_file(tmp / "root/.mtfs.lock", "");
    std::filesystem::create_directories(tmp / "root/empty");

    Snapshot snap = snapshot((tmp / "root").string(), {".mtfs.lock"});
    REQUIRE(snap.records.count("a.txt") == 1);
    REQUIRE(snap.records.count("sub/b.txt") == 1);
    CHECK(snap.records.count("sub") == 1);
    CHECK(snap.records.count("empty") == 1);
    CHECK(snap.records.count(".mtfs.lock") == 0);
    CHECK(snap.records.at("a.txt").size == 3);
    CHECK(snap.records.at("a.txt").content_hash == sha256_hex("abc"));
    CHECK(snap.records.at("sub").kind == RecordKind::Dir);
}

TEST_CASE("snapshot_via agrees with the direct walk") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 20;
    spec.seed = 5;
    spec.dirs = 2;
    generate_corpus(spec, (tmp / "root").string());

    Snapshot direct = snapshot((tmp / "root").string());
    DirectFs client((tmp / "root").string());
    Snapshot via = snapshot_via(client, direct.root_identity);
    REQUIRE(via.records.size() == direct.records.size());
    for (const auto& [path, rec] : direct.records) {
        REQUIRE(via.records.count(path) == 1);
        CHECK(via.records.at(path).size == rec.size);
        CHECK(via.records.at(path).content_hash == rec.content_hash);
    }
}

TEST_CASE("diff classification") {
    TempDir tmp;
    write_file(tmp / "a/keep.txt", "same");
    write_file(tmp / "a/edit.txt", "before-content");
    write_file(tmp / "a/gone.txt", "deleted-content");
    write_file(tmp / "a/move.txt", "moved-content");
    Snapshot before = snapshot((tmp / "a").string());

    write_file(tmp / "a/edit.txt", "after-content!");
    std::filesystem::remove(tmp / "a/gone.txt");
    std::filesystem::rename(tmp / "a/move.txt", tmp / "a/move.txt.GNNCRY");
    write_file(tmp / "a/new.txt", "created-content");
    Snapshot after = snapshot((tmp / "a").string());

    auto report = diff(before, after);
    std::map<std::string, Change> by_path;
    for (const auto& e : report.entries) by_path[e.path] = e.change;
    CHECK(by_path.at("keep.txt") == Change::Unmodified);
    CHECK(by_path.at("edit.txt") == Change::Modified);
    CHECK(by_path.at("gone.txt") == Change::Deleted);
    CHECK(by_path.at("move.txt") == Change::Moved);
    CHECK(by_path.at("new.txt") == Change::Created);

    // whole-file sizes of Modified + Deleted, measured before
    CHECK(report.bytes_changed == std::string("before-content").size() +
                                      std::string("deleted-content").size());

    SUBCASE("identity diff is all Unmodified") {
        auto self = diff(before, before);
        CHECK(self.bytes_changed == 0);
        CHECK(self.count(Change::Unmodified) == self.entries.size());
    }

    SUBCASE("identity mismatch throws") {
        Snapshot other = after;
        other.root_identity = "elsewhere";
        CHECK_THROWS_AS(diff(before, other), std::invalid_argument);
    }
}

TEST_CASE("rename plus re-encrypt is Deleted + Created, not Moved") {
    TempDir tmp;
    write_file(tmp / "a/doc.pdf", "original bytes");
    Snapshot before = snapshot((tmp / "a").string());
    std::filesystem::remove(tmp / "a/doc.pdf");
    write_file(tmp / "a/doc.pdf.GNNCRY", "scrambled bytes!!");
    Snapshot after = snapshot((tmp / "a").string());

    auto report = diff(before, after);
    CHECK(report.count(Change::Moved) == 0);
    CHECK(report.count(Change::Deleted) == 1);
    CHECK(report.count(Change::Created) == 1);
    CHECK(report.bytes_changed == std::string("original bytes").size());
}

TEST_CASE("randomized mutations match the scripted expectation") {
    // unique per-file contents keep every classification unambiguous, so the
    // expected outcome can be recorded while mutating
    std::mt19937_64 rng(7);
    for (int round = 0; round < 50; ++round) {
        TempDir tmp;
        std::uniform_int_distribution<int> count_d(1, 20);
        int n = count_d(rng);
        std::vector<std::string> paths;
        for (int i = 0; i < n; ++i) {
            std::string p = "f" + std::to_string(i) + ".dat";
            if (i % 3 == 0) p = "sub/" + p;
            paths.push_back(p);
            write_file(tmp / ("r/" + p),
                       "round" + std::to_string(round) + "-file" + std::to_string(i));
        }
        Snapshot before = snapshot((tmp / "r").string());

        std::map<std::string, Change> expected;
        std::uint64_t expected_bytes = 0;
        int new_id = 0;
        for (const auto& p : paths) {
            std::uniform_int_distribution<int> act_d(0, 4);
            std::uint64_t size = std::filesystem::file_size(tmp / ("r/" + p));
            switch (act_d(rng)) {
            case 0:
                expected[p] = Change::Unmodified;
                break;
            case 1:
                write_file(tmp / ("r/" + p), "mutated-" + p + std::to_string(round));
                expected[p] = Change::Modified;
                expected_bytes += size;
                break;
            case 2:
                std::filesystem::remove(tmp / ("r/" + p));
                expected[p] = Change::Deleted;
                expected_bytes += size;
                break;
            case 3:
                std::filesystem::rename(tmp / ("r/" + p), tmp / ("r/" + p + ".mv"));
                expected[p] = Change::Moved;
                break;
            case 4: {
                std::string np = "created" + std::to_string(new_id++) + ".dat";
                write_file(tmp / ("r/" + np), "fresh-" + np + std::to_string(round));
                expected[p] = Change::Unmodified;
                expected[np] = Change::Created;
                break;
            }
            }
        }
        Snapshot after = snapshot((tmp / "r").string());
        auto report = diff(before, after);

        std::map<std::string, Change> got;
        for (const auto& e : report.entries) {
            if (before.records.count(e.path) &&
                before.records.at(e.path).kind == RecordKind::Dir) {
                continue; // directory records are not part of the expectation
            }
            got[e.path] = e.change;
        }
        for (const auto& [p, c] : expected) {
            REQUIRE_MESSAGE(got.count(p) == 1, "missing entry for " << p);
            CHECK_MESSAGE(got.at(p) == c, p << ": expected " << to_string(c) << " got "
                                            << to_string(got.at(p)));
        }
        CHECK(report.bytes_changed == expected_bytes);
    }
}

TEST_CASE("every before and after path appears exactly once in the diff") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 15;
    spec.seed = 11;
    spec.dirs = 2;
    generate_corpus(spec, (tmp / "r").string());
    Snapshot before = snapshot((tmp / "r").string());

    int i = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(tmp / "r")) {
        if (!entry.is_regular_file()) continue;
        if (++i % 2 == 0) write_file(entry.path(), "rewritten " + std::to_string(i));
    }
    Snapshot after = snapshot((tmp / "r").string());
    auto report = diff(before, after);

    std::set<std::string> befores, afters;
    for (const auto& e : report.entries) {
        switch (e.change) {
        case Change::Unmodified:
        case Change::Modified:
            CHECK(befores.insert(e.path).second);
            CHECK(afters.insert(e.path).second);
            break;
        case Change::Moved:
            CHECK(befores.insert(e.path).second);
            REQUIRE(e.moved_to.has_value());
            CHECK(afters.insert(*e.moved_to).second);
            break;
        case Change::Deleted:
            CHECK(befores.insert(e.path).second);
            break;
        case Change::Created:
            CHECK(afters.insert(e.path).second);
            break;
        }
    }
    std::set<std::string> expect_before, expect_after;
    for (const auto& [p, r] : before.records) expect_before.insert(p);
    for (const auto& [p, r] : after.records) expect_after.insert(p);
    CHECK(befores == expect_before);
    CHECK(afters == expect_after);
}

TEST_CASE("bytes_saved spot values") {
    CHECK(bytes_saved(10406, 0) == doctest::Approx(100.0));
    CHECK(bytes_saved(2304, 481) == doctest::Approx(79.1232638889));
    CHECK(bytes_saved(106, 106) == doctest::Approx(0.0));
    CHECK(bytes_saved(0, 0) == doctest::Approx(100.0));
    CHECK(bytes_saved(100, 250) == doctest::Approx(0.0)); // clamped
}

TEST_CASE("snapshot serialization round-trips") {
    TempDir tmp;
    write_file(tmp / "r/a.txt", "alpha");
    write_file(tmp / "r/sub/b.bin", std::string(300, '\x7f'));
    Snapshot snap = snapshot((tmp / "r").string());
    Snapshot back = parse_snapshot(serialize_snapshot(snap));
    REQUIRE(back.records.size() == snap.records.size());
    for (const auto& [p, r] : snap.records) {
        REQUIRE(back.records.count(p) == 1);
        CHECK(back.records.at(p).size == r.size);
        CHECK(back.records.at(p).content_hash == r.content_hash);
        CHECK(back.records.at(p).kind == r.kind);
    }
    CHECK_THROWS_AS(parse_snapshot("not a snapshot"), std::invalid_argument);
}

TEST_CASE("suffix-active mount presents different hashes but equal sizes") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 12;
    spec.seed = 21;
    generate_corpus(spec, (tmp / "under").string());
    Snapshot direct = snapshot((tmp / "under").string());

    MountConfig cfg;
    cfg.underlay_root = (tmp / "under").string();
    cfg.mountpoint = tmp.mkdir("mnt");
    cfg.techniques = default_techniques();
    for (auto& t : cfg.techniques) t.active = t.kind == TechniqueKind::Suffix;
    auto handle = mount(cfg);
    OverlayClient client(handle.overlay());
    Snapshot via = snapshot_via(client, direct.root_identity);

    REQUIRE(via.records.size() == direct.records.size());
    for (const auto& [path, rec] : direct.records) {
        REQUIRE(via.records.count(path) == 1);
        CHECK(via.records.at(path).size == rec.size);
        if (rec.kind == RecordKind::File && rec.size > 0) {
            CHECK(via.records.at(path).content_hash != rec.content_hash);
        }
    }
    // the disk content itself is untouched
    Snapshot again = snapshot((tmp / "under").string(), {".mtfs.lock"});
    auto report = diff(direct, again);
    CHECK(report.bytes_changed == 0);
}
