#pragma once

#include <optional>
#include <string>
#include <thread>

#include "mtfs/overlay.hpp"

namespace mtfs {

enum class ControlVerb {
    Activate,
    Deactivate,
    Status,
    RotateSeed,
};

struct ControlCommand {
    ControlVerb verb = ControlVerb::Status;
    std::optional<TechniqueKind> technique;
};

// Parses one protocol line ("ACTIVATE INF"); returns an error message on
// malformed input.
struct ParsedCommand {
    std::optional<ControlCommand> command;
    std::string error;
};
ParsedCommand parse_control_line(const std::string& line);

std::string status_to_json(const PipelineStatus& st);

// Applies a command to the pipeline; returns the reply line (without '\n').
std::string apply_control_command(const ControlCommand& cmd, TechniquePipeline& pipeline);

// Line-oriented control daemon on a local (AF_UNIX) stream socket. One
// acceptor thread; commands from all clients are applied serially.
class ControlServer {
public:
    ControlServer(std::string socket_path, TechniquePipeline& pipeline);
    ~ControlServer();

    void start(); // throws std::runtime_error on bind failure
    void stop();

    const std::string& socket_path() const { return path_; }

private:
    void run();
    void handle_client(int fd);

    std::string path_;
    TechniquePipeline& pipeline_;
    int listen_fd_ = -1;
    std::atomic<bool> running_{false};
    std::thread thread_;
    std::mutex apply_mu_;
};

// One-shot client: connects, sends `line`, returns the single reply line.
// Throws std::runtime_error on connection failure.
std::string control_request(const std::string& socket_path, const std::string& line);

} // namespace mtfs
