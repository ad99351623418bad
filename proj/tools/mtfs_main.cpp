#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "mtfs/attack.hpp"
#include "mtfs/bench.hpp"
#include "mtfs/config.hpp"
#include "mtfs/control.hpp"
#include "mtfs/corpus.hpp"
#include "mtfs/experiment.hpp"
#include "mtfs/overlay.hpp"
#include "mtfs/snapshot.hpp"

namespace fs = std::filesystem;
using namespace mtfs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::set<TechniqueKind> parse_activation(const std::string& csv) {
    std::set<TechniqueKind> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) comma = csv.size();
        std::string item = csv.substr(start, comma - start);
        if (!item.empty()) {
            auto kind = technique_from_string(item);
            if (!kind) throw std::runtime_error("unknown technique: " + item);
            out.insert(*kind);
        }
        start = comma + 1;
    }
    return out;
}

MountConfig build_mount_config(const std::string& config_path, const std::string& underlay,
                               const std::string& mountpoint, const std::string& control_socket,
                               const std::string& activate, bool readonly) {
    MountConfig cfg;
    if (!config_path.empty()) {
        cfg = load_config(config_path);
    } else {
        cfg.techniques = default_techniques();
    }
    if (!underlay.empty()) cfg.underlay_root = fs::absolute(underlay).string();
    if (!mountpoint.empty()) cfg.mountpoint = fs::absolute(mountpoint).string();
    if (!control_socket.empty()) cfg.control_endpoint = control_socket;
    cfg.readonly = cfg.readonly || readonly;
    if (!activate.empty()) {
        auto on = parse_activation(activate);
        for (auto& t : cfg.techniques) {
            if (on.count(t.kind)) t.active = true;
        }
    }
    return cfg;
}

int cmd_mount(const std::string& config_path, const std::string& underlay,
              const std::string& mountpoint, const std::string& control_socket,
              const std::string& activate, bool readonly, bool foreground, bool unmount_flag) {
    if (unmount_flag) {
        fs::path lock = fs::path(mountpoint.empty() ? "." : mountpoint) / ".mtfs.lock";
        std::error_code ec;
        if (!fs::remove(lock, ec)) {
            std::cerr << "not mounted: " << mountpoint << "\n";
            return kExitRuntime;
        }
        return kExitOk;
    }
    try {
        MountConfig cfg = build_mount_config(config_path, underlay, mountpoint, control_socket,
                                             activate, readonly);
        MountHandle handle = mount(cfg);
        std::unique_ptr<ControlServer> server;
        if (!cfg.control_endpoint.empty()) {
            server = std::make_unique<ControlServer>(cfg.control_endpoint,
                                                     handle.overlay().pipeline());
            server->start();
        }
        std::cout << "mounted " << cfg.underlay_root << " -> " << cfg.mountpoint << "\n";
        if (server) std::cout << "control socket: " << cfg.control_endpoint << "\n";
        if (foreground) {
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        if (server) server->stop();
        handle.unmount();
        return kExitOk;
    } catch (const MountError& e) {
        std::cerr << "mount failed: " << e.what() << "\n";
        return e.code() == MountErrorCode::InvalidConfig ? kExitValidation : kExitRuntime;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mtfs: moving-target-defense overlay file system and its testbed"};
    app.require_subcommand(1);

    // mount
    std::string config_path, underlay, mountpoint, control_socket, activate;
    bool readonly = false, foreground = false, unmount_flag = false;
    auto* mnt = app.add_subcommand("mount", "mount the overlay defense");
    mnt->add_option("--config", config_path, "JSON config file");
    mnt->add_option("--underlay", underlay, "underlay directory");
    mnt->add_option("--mountpoint", mountpoint, "mountpoint directory");
    mnt->add_option("--control-socket", control_socket, "control socket path");
    mnt->add_option("--activate", activate, "comma list: delay,inf,suffix");
    mnt->add_flag("--readonly", readonly);
    mnt->add_flag("--foreground", foreground, "serve until SIGINT");
    mnt->add_flag("--unmount", unmount_flag, "release a mountpoint");

    // gencorpus
    CorpusSpec cspec;
    std::string corpus_out, mix_str;
    auto* gen = app.add_subcommand("gencorpus", "generate a deterministic test corpus");
    gen->add_option("--count", cspec.file_count);
    gen->add_option("--seed", cspec.seed);
    gen->add_option("--min-size", cspec.min_size);
    gen->add_option("--max-size", cspec.max_size);
    gen->add_option("--dirs", cspec.dirs, "spread files over N subdirectories");
    gen->add_option("--mix", mix_str, "e.g. pdf=0.5,txt=0.5");
    gen->add_option("--out", corpus_out)->required();

    // attack
    std::string profile_path, attack_root, defend_config, attack_activate, attack_out;
    auto* atk = app.add_subcommand("attack", "run a simulated ransomware profile");
    atk->add_option("--profile", profile_path, "attack profile JSON")->required();
    atk->add_option("--root", attack_root, "target directory")->required();
    atk->add_option("--defend", defend_config,
                    "mount config JSON; wraps --root in an in-process overlay");
    atk->add_option("--activate", attack_activate, "techniques to activate when defending");
    atk->add_option("--out", attack_out, "write the report JSON here");

    // experiment
    std::string exp_work, exp_activate, exp_out;
    std::vector<std::string> exp_profiles;
    bool exp_matrix = false;
    std::uint64_t exp_count = 100, exp_seed = 1;
    std::uint32_t exp_reps = 1, exp_dirs = 0;
    std::int64_t exp_budget_ms = 15000, exp_delay_ms = 250;
    double exp_fraction = 0.5;
    auto* exp = app.add_subcommand("experiment", "baseline vs defended attack runs");
    exp->add_option("--work-dir", exp_work)->required();
    exp->add_option("--profile", exp_profiles, "attack profile JSON (repeatable)");
    exp->add_flag("--matrix", exp_matrix, "use the built-in 6-profile matrix");
    exp->add_option("--activate", exp_activate, "techniques to activate (default all)");
    exp->add_option("--count", exp_count, "corpus file count");
    exp->add_option("--seed", exp_seed);
    exp->add_option("--dirs", exp_dirs);
    exp->add_option("--repetitions", exp_reps);
    exp->add_option("--budget-ms", exp_budget_ms);
    exp->add_option("--delay-ms", exp_delay_ms);
    exp->add_option("--listing-fraction", exp_fraction);
    exp->add_option("--out", exp_out, "write the report JSON here");

    // bench
    std::string bench_work, bench_workload = "all", bench_out;
    auto* ben = app.add_subcommand("bench", "benign workload overhead");
    ben->add_option("--work-dir", bench_work)->required();
    ben->add_option("--workload", bench_workload, "seq|small|append|all");
    ben->add_option("--out", bench_out);

    // control
    std::string ctl_socket;
    std::vector<std::string> ctl_words;
    auto* ctl = app.add_subcommand("control", "send one control command");
    ctl->add_option("--socket", ctl_socket)->required();
    ctl->add_option("command", ctl_words, "e.g. ACTIVATE INF")->required();

    // snapshot / diff helpers
    std::string snap_root, snap_out;
    auto* snp = app.add_subcommand("snapshot", "record a corpus snapshot");
    snp->add_option("--root", snap_root)->required();
    snp->add_option("--out", snap_out, "snapshot file (default stdout)");

    std::string diff_before, diff_after;
    bool diff_json = false;
    auto* dif = app.add_subcommand("diff", "classify changes between two snapshots");
    dif->add_option("before", diff_before)->required();
    dif->add_option("after", diff_after)->required();
    dif->add_flag("--json", diff_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mnt) {
            return cmd_mount(config_path, underlay, mountpoint, control_socket, activate,
                             readonly, foreground, unmount_flag);
        }
        if (*gen) {
            if (!mix_str.empty()) {
                cspec.type_mix.clear();
                std::size_t start = 0;
                while (start <= mix_str.size()) {
                    std::size_t comma = mix_str.find(',', start);
                    if (comma == std::string::npos) comma = mix_str.size();
                    std::string item = mix_str.substr(start, comma - start);
                    start = comma + 1;
                    if (item.empty()) continue;
                    auto eq = item.find('=');
                    if (eq == std::string::npos) throw std::runtime_error("bad mix item: " + item);
                    auto type = file_type_from_string(item.substr(0, eq));
                    if (!type) throw std::runtime_error("unknown type in mix: " + item);
                    cspec.type_mix[*type] = std::stod(item.substr(eq + 1));
                }
            }
            auto summary = generate_corpus(cspec, corpus_out);
            std::cout << "generated " << summary.files << " files, " << summary.total_bytes
                      << " bytes\n";
            return kExitOk;
        }
        if (*atk) {
            AttackProfile profile = profile_from_json(read_file(profile_path));
            AttackReport report;
            if (defend_config.empty()) {
                report = run_attack(profile, fs::absolute(attack_root).string());
            } else {
                MountConfig cfg = load_config(defend_config);
                cfg.underlay_root = fs::absolute(attack_root).string();
                fs::path mnt_dir = fs::path(cfg.mountpoint);
                std::error_code ec;
                fs::create_directories(mnt_dir, ec);
                if (!attack_activate.empty()) {
                    auto on = parse_activation(attack_activate);
                    for (auto& t : cfg.techniques) {
                        if (on.count(t.kind)) t.active = true;
                    }
                }
                MountHandle handle = mount(cfg);
                OverlayClient client(handle.overlay());
                report = run_attack(profile, client);
                handle.unmount();
            }
            std::string j = report_to_json(report);
            if (!attack_out.empty()) std::ofstream(attack_out) << j << "\n";
            std::cout << j << "\n";
            return kExitOk;
        }
        if (*exp) {
            ExperimentSpec spec;
            spec.work_dir = fs::absolute(exp_work).string();
            spec.corpus.file_count = exp_count;
            spec.corpus.seed = exp_seed;
            spec.corpus.dirs = exp_dirs;
            spec.repetitions = exp_reps;
            spec.activate = exp_activate.empty()
                                ? std::set<TechniqueKind>{TechniqueKind::Delay,
                                                          TechniqueKind::InfiniteDir,
                                                          TechniqueKind::Suffix}
                                : parse_activation(exp_activate);
            spec.techniques = default_techniques();
            for (auto& t : spec.techniques) {
                if (t.kind == TechniqueKind::Delay) {
                    t.delay_per_op = std::chrono::milliseconds(exp_delay_ms);
                }
                if (t.kind == TechniqueKind::InfiniteDir) {
                    t.listing_subset_fraction = exp_fraction;
                }
            }
            for (const auto& p : exp_profiles) {
                spec.profiles.push_back(profile_from_json(read_file(p)));
            }
            if (exp_matrix || spec.profiles.empty()) {
                auto matrix = default_attack_matrix(std::chrono::milliseconds(exp_budget_ms));
                spec.profiles.insert(spec.profiles.end(), matrix.begin(), matrix.end());
            }
            ExperimentReport report = run_experiment(spec);
            if (!exp_out.empty()) std::ofstream(exp_out) << experiment_to_json(report) << "\n";
            std::cout << experiment_to_table(report);
            return kExitOk;
        }
        if (*ben) {
            std::vector<Workload> workloads;
            if (bench_workload == "seq") workloads = {Workload::SequentialStream};
            else if (bench_workload == "small") workloads = {Workload::SmallFiles};
            else if (bench_workload == "append") workloads = {Workload::PeriodicAppend};
            else if (bench_workload == "all")
                workloads = {Workload::SequentialStream, Workload::SmallFiles,
                             Workload::PeriodicAppend};
            else throw std::runtime_error("unknown workload: " + bench_workload);

            std::vector<BenchResult> results;
            for (Workload w : workloads) {
                results.push_back(run_bench(w, bench_work + "/" + to_string(w)));
                const auto& r = results.back();
                std::printf("%-18s direct %8.1f ms  overlay %8.1f ms  x%.2f  failed=%llu  %s\n",
                            to_string(w), r.direct_ms, r.overlay_ms, r.slowdown(),
                            static_cast<unsigned long long>(r.failed_ops),
                            r.trees_identical ? "identical" : "MISMATCH");
            }
            if (!bench_out.empty()) std::ofstream(bench_out) << bench_to_json(results) << "\n";
            bool ok = std::all_of(results.begin(), results.end(), [](const BenchResult& r) {
                return r.failed_ops == 0 && r.trees_identical;
            });
            return ok ? kExitOk : kExitRuntime;
        }
        if (*ctl) {
            std::string line;
            for (const auto& w : ctl_words) {
                if (!line.empty()) line += ' ';
                line += w;
            }
            std::string reply = control_request(ctl_socket, line);
            std::cout << reply << "\n";
            return reply.rfind("OK", 0) == 0 ? kExitOk : kExitRuntime;
        }
        if (*snp) {
            Snapshot s = snapshot(fs::absolute(snap_root).string());
            std::string text = serialize_snapshot(s);
            if (snap_out.empty()) std::cout << text;
            else std::ofstream(snap_out) << text;
            return kExitOk;
        }
        if (*dif) {
            Snapshot before = parse_snapshot(read_file(diff_before));
            Snapshot after = parse_snapshot(read_file(diff_after));
            after.root_identity = before.root_identity; // stored snapshots may span runs
            DiffReport report = diff(before, after);
            std::cout << (diff_json ? diff_to_json(report) : diff_to_table(report));
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
