#include "mtfs/detector.hpp"

namespace mtfs {

RateDetector::RateDetector(double threshold_ops_per_sec, std::chrono::milliseconds window,
                           TechniqueKind target)
    : threshold_(threshold_ops_per_sec),
      window_ns_(std::chrono::duration_cast<std::chrono::nanoseconds>(window).count()),
      target_(target) {}

std::optional<Verdict> RateDetector::on_event(const SyscallEvent& ev) {
    if (ev.op == OpKind::Write) write_ts_.push_back(ev.timestamp_ns);
    while (!write_ts_.empty() && write_ts_.front() < ev.timestamp_ns - window_ns_) {
        write_ts_.pop_front();
    }

    double window_sec = static_cast<double>(window_ns_) / 1e9;
    double rate = static_cast<double>(write_ts_.size()) / window_sec;

    if (!triggered_ && rate > threshold_) {
        triggered_ = true;
        return Verdict{"rate", VerdictAction::ActivateTechnique, target_,
                       std::min(1.0, rate / (2 * threshold_))};
    }
    if (triggered_ && write_ts_.empty()) {
        // one full quiet window has elapsed since the last write
        triggered_ = false;
        return Verdict{"rate", VerdictAction::DeactivateTechnique, target_, 1.0};
    }
    return std::nullopt;
}

DetectorHub::DetectorHub(TechniquePipeline& pipeline, std::size_t queue_cap)
    : pipeline_(pipeline), cap_(queue_cap) {}

DetectorHub::~DetectorHub() {
    stop();
}

void DetectorHub::add_detector(std::unique_ptr<Detector> d) {
    detectors_.push_back(std::move(d));
}

void DetectorHub::set_verdict_callback(VerdictCallback cb) {
    callback_ = std::move(cb);
}

void DetectorHub::submit(const SyscallEvent& ev) {
    {
        std::lock_guard lock(mu_);
        if (queue_.size() >= cap_) {
            ++dropped_;
            return;
        }
        queue_.push_back(ev);
    }
    cv_.notify_one();
}

void DetectorHub::start() {
    std::lock_guard lock(mu_);
    if (running_) return;
    running_ = true;
    worker_ = std::thread([this] { run(); });
}

void DetectorHub::stop() {
    {
        std::lock_guard lock(mu_);
        if (!running_) return;
        running_ = false;
    }
    cv_.notify_all();
    if (worker_.joinable()) worker_.join();
}

void DetectorHub::drain() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [this] { return queue_.empty() && !busy_; });
}

void DetectorHub::apply(const Verdict& v) {
    if (v.action == VerdictAction::None) return;
    if (callback_) {
        callback_(v);
        return;
    }
    try {
        pipeline_.controller_set(v.technique, v.action == VerdictAction::ActivateTechnique);
    } catch (const UnknownTechniqueError&) {
        // verdict referenced an unconfigured technique; ignore
    }
}

void DetectorHub::run() {
    for (;;) {
        SyscallEvent ev;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [this] { return !queue_.empty() || !running_; });
            if (queue_.empty()) {
                if (!running_) return;
                continue;
            }
            ev = queue_.front();
            queue_.pop_front();
            busy_ = true;
        }
        for (auto& d : detectors_) {
            if (auto v = d->on_event(ev)) apply(*v);
        }
        {
            std::lock_guard lock(mu_);
            busy_ = false;
            if (queue_.empty()) idle_cv_.notify_all();
        }
    }
}

} // namespace mtfs
