#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "mtfs/overlay.hpp"

namespace mtfs {

enum class VerdictAction {
    None,
    ActivateTechnique,
    DeactivateTechnique,
};

struct Verdict {
    std::string detector_id;
    VerdictAction action = VerdictAction::None;
    TechniqueKind technique = TechniqueKind::Delay;
    double confidence = 0.0;
};

class Detector {
public:
    virtual ~Detector() = default;
    virtual std::optional<Verdict> on_event(const SyscallEvent& ev) = 0;
};

// Rule-based example detector: fires when the Write rate inside a sliding
// window exceeds a threshold. Deactivates again only after one full quiet
// window (hysteresis).
class RateDetector : public Detector {
public:
    RateDetector(double threshold_ops_per_sec, std::chrono::milliseconds window,
                 TechniqueKind target);

    std::optional<Verdict> on_event(const SyscallEvent& ev) override;

    bool triggered() const { return triggered_; }

private:
    double threshold_;
    std::int64_t window_ns_;
    TechniqueKind target_;
    bool triggered_ = false;
    std::deque<std::int64_t> write_ts_;
};

// Consumes SyscallEvents from a bounded queue on its own thread and applies
// detector verdicts to the pipeline through controller_set.
class DetectorHub {
public:
    using VerdictCallback = std::function<void(const Verdict&)>;

    explicit DetectorHub(TechniquePipeline& pipeline, std::size_t queue_cap = 8192);
    ~DetectorHub();

    void add_detector(std::unique_ptr<Detector> d);
    void set_verdict_callback(VerdictCallback cb); // replaces default pipeline application

    // EventSink-compatible entry point.
    void submit(const SyscallEvent& ev);

    void start();
    void stop();
    void drain(); // waits until the queue is empty (for tests)

    std::uint64_t dropped() const { return dropped_; }

private:
    void run();
    void apply(const Verdict& v);

    TechniquePipeline& pipeline_;
    std::size_t cap_;
    std::vector<std::unique_ptr<Detector>> detectors_;
    VerdictCallback callback_;

    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::deque<SyscallEvent> queue_;
    bool running_ = false;
    bool busy_ = false;
    std::uint64_t dropped_ = 0;
    std::thread worker_;
};

} // namespace mtfs
