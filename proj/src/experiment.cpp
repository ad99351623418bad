#include "mtfs/experiment.hpp"

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "mtfs/config.hpp"
#include "mtfs/overlay.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mtfs {

namespace {

void reset_dir(const fs::path& p) {
    std::error_code ec;
    fs::remove_all(p, ec);
    fs::create_directories(p);
}

void copy_tree(const fs::path& from, const fs::path& to) {
    reset_dir(to);
    fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::copy_symlinks);
}

std::string trap_name_of(const std::vector<TechniqueConfig>& techniques) {
    for (const auto& t : techniques) {
        if (t.kind == TechniqueKind::InfiniteDir) return t.trap_name;
    }
    return "!";
}

} // namespace

std::vector<AttackProfile> default_attack_matrix(std::chrono::milliseconds budget) {
    const std::set<FileType> known{FileType::Pdf, FileType::Png, FileType::Jpeg, FileType::Zip};
    std::vector<AttackProfile> matrix(6);
    matrix[0].traversal = Traversal::SortedDFS;
    matrix[0].encryption_mode = EncryptionMode::InPlaceOverwrite;
    matrix[1].traversal = Traversal::SortedDFS;
    matrix[1].encryption_mode = EncryptionMode::OverwriteThenRename;
    matrix[1].type_filter = known;
    matrix[2].traversal = Traversal::BFS;
    matrix[2].encryption_mode = EncryptionMode::InPlaceOverwrite;
    matrix[2].type_filter = known;
    matrix[3].traversal = Traversal::BFS;
    matrix[3].encryption_mode = EncryptionMode::CreateNewDeleteOld;
    matrix[4].traversal = Traversal::PreListThenEncrypt;
    matrix[4].encryption_mode = EncryptionMode::OverwriteThenRename;
    matrix[5].traversal = Traversal::PreListThenEncrypt;
    matrix[5].encryption_mode = EncryptionMode::CreateNewDeleteOld;
    matrix[5].type_filter = known;
    for (auto& p : matrix) p.budget = budget;
    return matrix;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    if (spec.profiles.empty()) throw std::runtime_error("experiment needs at least one profile");
    if (spec.repetitions < 1) throw std::runtime_error("repetitions must be >= 1");
    if (spec.work_dir.empty()) throw std::runtime_error("work_dir must be set");

    fs::path work(spec.work_dir);
    reset_dir(work);

    fs::path master = work / "corpus";
    CorpusSummary summary = generate_corpus(spec.corpus, master.string());
    if (summary.total_bytes > spec.corpus_cap_bytes) {
        throw std::runtime_error("corpus exceeds configured size cap");
    }

    auto techniques = spec.techniques.empty() ? default_techniques() : spec.techniques;
    for (auto& t : techniques) t.active = spec.activate.count(t.kind) > 0;
    std::string trap = trap_name_of(techniques);

    Snapshot before = snapshot(master.string());
    before.root_identity = "corpus";

    ExperimentReport report;
    for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
        for (std::size_t pi = 0; pi < spec.profiles.size(); ++pi) {
            const AttackProfile& profile = spec.profiles[pi];
            ExperimentRun run;
            std::ostringstream name;
            name << to_string(profile.traversal) << "/" << to_string(profile.encryption_mode)
                 << (profile.type_filter ? "/filtered" : "") << "#" << rep;
            run.profile_name = name.str();

            // baseline: raw copy, no defense
            fs::path base = work / "baseline";
            copy_tree(master, base);
            run.baseline_attack = run_attack(profile, base.string());
            Snapshot base_after = snapshot(base.string());
            base_after.root_identity = "corpus";
            run.baseline_diff = diff(before, base_after);

            // defended: fresh copy under an overlay mount
            fs::path under = work / "underlay";
            fs::path mnt = work / "mnt";
            copy_tree(master, under);
            reset_dir(mnt);
            MountConfig mcfg;
            mcfg.underlay_root = fs::absolute(under).string();
            mcfg.mountpoint = fs::absolute(mnt).string();
            mcfg.techniques = techniques;
            {
                MountHandle handle = mount(mcfg);
                OverlayClient client(handle.overlay());
                run.defended_attack = run_attack(profile, client);
                handle.unmount();
            }
            Snapshot def_after = snapshot(under.string(), {trap});
            def_after.root_identity = "corpus";
            run.defended_diff = diff(before, def_after);

            run.bytes_saved_pct = bytes_saved(run.baseline_diff, run.defended_diff);
            report.baseline_bytes_changed += run.baseline_diff.bytes_changed;
            report.defended_bytes_changed += run.defended_diff.bytes_changed;
            report.runs.push_back(std::move(run));
        }
    }
    report.aggregate_bytes_saved =
        bytes_saved(static_cast<double>(report.baseline_bytes_changed),
                    static_cast<double>(report.defended_bytes_changed));
    return report;
}

std::string experiment_to_json(const ExperimentReport& report) {
    json j;
    j["aggregate_bytes_saved_pct"] = report.aggregate_bytes_saved;
    j["baseline_bytes_changed"] = report.baseline_bytes_changed;
    j["defended_bytes_changed"] = report.defended_bytes_changed;
    j["runs"] = json::array();
    for (const auto& run : report.runs) {
        json jr;
        jr["profile"] = run.profile_name;
        jr["baseline"] = json::parse(report_to_json(run.baseline_attack));
        jr["defended"] = json::parse(report_to_json(run.defended_attack));
        jr["baseline_bytes_changed"] = run.baseline_diff.bytes_changed;
        jr["defended_bytes_changed"] = run.defended_diff.bytes_changed;
        jr["bytes_saved_pct"] = run.bytes_saved_pct;
        j["runs"].push_back(jr);
    }
    return j.dump(2);
}

std::string experiment_to_table(const ExperimentReport& report) {
    std::ostringstream out;
    std::size_t width = 20;
    for (const auto& r : report.runs) width = std::max(width, r.profile_name.size());
    out << "profile" << std::string(width - 7 + 2, ' ')
        << "base_lost  def_lost   base_MB    def_MB     saved%\n";
    char line[256];
    for (const auto& r : report.runs) {
        std::snprintf(line, sizeof(line), "%-*s  %-9llu  %-9llu  %-9.2f  %-9.2f  %6.2f\n",
                      static_cast<int>(width), r.profile_name.c_str(),
                      static_cast<unsigned long long>(r.baseline_attack.files_encrypted),
                      static_cast<unsigned long long>(r.defended_attack.files_encrypted),
                      r.baseline_diff.bytes_changed / 1048576.0,
                      r.defended_diff.bytes_changed / 1048576.0, r.bytes_saved_pct);
        out << line;
    }
    std::snprintf(line, sizeof(line), "aggregate bytes saved: %.2f%%\n",
                  report.aggregate_bytes_saved);
    out << line;
    return out.str();
}

} // namespace mtfs
