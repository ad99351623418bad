#include <doctest.h>

#include <filesystem>

#include "mtfs/corpus.hpp"
#include "mtfs/snapshot.hpp"
#include "test_util.hpp"

using namespace mtfs;
using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

TEST_CASE("same seed produces byte-identical corpora") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 40;
    spec.seed = 99;
    spec.dirs = 4;
    auto s1 = generate_corpus(spec, (tmp / "a").string());
    auto s2 = generate_corpus(spec, (tmp / "b").string());
    CHECK(s1.files == 40);
    CHECK(s1.total_bytes == s2.total_bytes);

    Snapshot a = snapshot((tmp / "a").string());
    Snapshot b = snapshot((tmp / "b").string());
    b.root_identity = a.root_identity;
    auto d = diff(a, b);
    CHECK(d.count(Change::Unmodified) == d.entries.size());
}

TEST_CASE("different seeds differ") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 10;
    spec.seed = 1;
    generate_corpus(spec, (tmp / "a").string());
    spec.seed = 2;
    generate_corpus(spec, (tmp / "b").string());
    Snapshot a = snapshot((tmp / "a").string());
    Snapshot b = snapshot((tmp / "b").string());
    b.root_identity = a.root_identity;
    CHECK(diff(a, b).count(Change::Modified) > 0);
}

TEST_CASE("every generated file carries its type's magic bytes") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 60;
    spec.seed = 12;
    generate_corpus(spec, (tmp / "c").string());
    std::uint64_t checked = 0;
    for (const auto& de : std::filesystem::recursive_directory_iterator(tmp / "c")) {
        if (!de.is_regular_file()) continue;
        std::string ext = de.path().extension().string();
        if (!ext.empty()) ext.erase(0, 1);
        auto type = type_for_extension(ext);
        REQUIRE_MESSAGE(type.has_value(), "unknown extension: " << ext);
        std::string head = read_file(de.path()).substr(0, magic_prefix(*type).size());
        CHECK(head == magic_prefix(*type));
        auto sniffed = detect_type(read_file(de.path()).substr(0, 8));
        CHECK(sniffed == *type);
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("type mix frequencies land near their weights") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 500;
    spec.seed = 77;
    spec.min_size = 64;
    spec.max_size = 128;
    spec.type_mix = {{FileType::Pdf, 0.5}, {FileType::Text, 0.5}};
    auto summary = generate_corpus(spec, (tmp / "c").string());
    CHECK(summary.per_type[FileType::Pdf] > 200);
    CHECK(summary.per_type[FileType::Pdf] < 300);
    CHECK(summary.per_type[FileType::Pdf] + summary.per_type[FileType::Text] == 500);
}

TEST_CASE("sizes respect the configured bounds") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 50;
    spec.seed = 5;
    spec.min_size = 700;
    spec.max_size = 900;
    generate_corpus(spec, (tmp / "c").string());
    for (const auto& de : std::filesystem::directory_iterator(tmp / "c")) {
        auto size = std::filesystem::file_size(de.path());
        CHECK(size >= 700);
        CHECK(size <= 900);
    }
}

TEST_CASE("dir layout spreads files round-robin") {
    TempDir tmp;
    CorpusSpec spec;
    spec.file_count = 9;
    spec.seed = 5;
    spec.dirs = 3;
    generate_corpus(spec, (tmp / "c").string());
    for (int d = 0; d < 3; ++d) {
        char name[16];
        std::snprintf(name, sizeof(name), "dir%03d", d);
        std::uint64_t count = 0;
        for (const auto& de : std::filesystem::directory_iterator(tmp / "c" / name)) {
            (void)de;
            ++count;
        }
        CHECK(count == 3);
    }
}

TEST_CASE("non-empty target is rejected") {
    TempDir tmp;
    write_file(tmp / "c/existing.txt", "x");
    CorpusSpec spec;
    CHECK_THROWS_AS(generate_corpus(spec, (tmp / "c").string()), std::runtime_error);
}
