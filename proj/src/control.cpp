#include "mtfs/control.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include <json.hpp>

namespace mtfs {

ParsedCommand parse_control_line(const std::string& line) {
    std::istringstream ss(line);
    std::string verb, arg, extra;
    ss >> verb >> arg >> extra;
    if (!extra.empty()) return {std::nullopt, "TrailingInput"};

    ControlCommand cmd;
    if (verb == "STATUS") {
        if (!arg.empty()) return {std::nullopt, "UnexpectedArgument"};
        cmd.verb = ControlVerb::Status;
        return {cmd, ""};
    }
    if (verb == "ROTATE-SEED") {
        if (!arg.empty()) return {std::nullopt, "UnexpectedArgument"};
        cmd.verb = ControlVerb::RotateSeed;
        return {cmd, ""};
    }
    if (verb == "ACTIVATE" || verb == "DEACTIVATE") {
        if (arg.empty()) return {std::nullopt, "MissingTechnique"};
        auto kind = technique_from_string(arg);
        if (!kind) return {std::nullopt, "UnknownTechnique"};
        cmd.verb = verb == "ACTIVATE" ? ControlVerb::Activate : ControlVerb::Deactivate;
        cmd.technique = kind;
        return {cmd, ""};
    }
    return {std::nullopt, "UnknownVerb"};
}

std::string status_to_json(const PipelineStatus& st) {
    nlohmann::json j;
    j["techniques"] = nlohmann::json::array();
    for (const auto& t : st.techniques) {
        j["techniques"].push_back({
            {"kind", to_string(t.kind)},
            {"active", t.active},
            {"counter", t.counter},
        });
    }
    return j.dump();
}

std::string apply_control_command(const ControlCommand& cmd, TechniquePipeline& pipeline) {
    try {
        switch (cmd.verb) {
        case ControlVerb::Status:
            return "OK " + status_to_json(pipeline.status());
        case ControlVerb::RotateSeed:
            pipeline.rotate_seed();
            return "OK " + status_to_json(pipeline.status());
        case ControlVerb::Activate:
        case ControlVerb::Deactivate: {
            auto st = pipeline.controller_set(*cmd.technique, cmd.verb == ControlVerb::Activate);
            return "OK " + status_to_json(st);
        }
        }
    } catch (const UnknownTechniqueError&) {
        return "ERR UnknownTechnique";
    }
    return "ERR Internal";
}

ControlServer::ControlServer(std::string socket_path, TechniquePipeline& pipeline)
    : path_(std::move(socket_path)), pipeline_(pipeline) {}

ControlServer::~ControlServer() {
    stop();
}

void ControlServer::start() {
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket() failed");

    std::filesystem::remove(path_);
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (path_.size() >= sizeof(addr.sun_path)) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("control socket path too long: " + path_);
    }
    std::strncpy(addr.sun_path, path_.c_str(), sizeof(addr.sun_path) - 1);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(listen_fd_, 8) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("cannot bind control socket: " + path_);
    }
    running_ = true;
    thread_ = std::thread([this] { run(); });
}

void ControlServer::stop() {
    if (!running_.exchange(false)) return;
    if (thread_.joinable()) thread_.join();
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    std::filesystem::remove(path_);
}

void ControlServer::run() {
    while (running_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc <= 0) continue;
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        handle_client(fd);
        ::close(fd);
    }
}

void ControlServer::handle_client(int fd) {
    std::string buf;
    char chunk[512];
    while (running_) {
        pollfd pfd{fd, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc < 0) return;
        if (rc == 0) continue;
        ssize_t n = ::read(fd, chunk, sizeof(chunk));
        if (n <= 0) return;
        buf.append(chunk, static_cast<std::size_t>(n));
        std::size_t nl;
        while ((nl = buf.find('\n')) != std::string::npos) {
            std::string line = buf.substr(0, nl);
            buf.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string reply;
            auto parsed = parse_control_line(line);
            if (!parsed.command) {
                reply = "ERR " + parsed.error;
            } else {
                std::lock_guard lock(apply_mu_);
                reply = apply_control_command(*parsed.command, pipeline_);
            }
            reply += '\n';
            if (::write(fd, reply.data(), reply.size()) < 0) return;
        }
    }
}

std::string control_request(const std::string& socket_path, const std::string& line) {
    int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket() failed");
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::strncpy(addr.sun_path, socket_path.c_str(), sizeof(addr.sun_path) - 1);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw std::runtime_error("cannot connect to control socket: " + socket_path);
    }
    std::string out = line;
    if (out.empty() || out.back() != '\n') out += '\n';
    if (::write(fd, out.data(), out.size()) < 0) {
        ::close(fd);
        throw std::runtime_error("write to control socket failed");
    }
    std::string reply;
    char chunk[1024];
    for (;;) {
        ssize_t n = ::read(fd, chunk, sizeof(chunk));
        if (n <= 0) break;
        reply.append(chunk, static_cast<std::size_t>(n));
        if (reply.find('\n') != std::string::npos) break;
    }
    ::close(fd);
    if (auto nl = reply.find('\n'); nl != std::string::npos) reply.resize(nl);
    return reply;
}

} // namespace mtfs
