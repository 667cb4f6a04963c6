// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/external_trainer.hpp"

#include "hpi/error.hpp"
#include "json_util.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <regex>
#include <thread>

extern char** environ;

namespace hpi {

using detail::ordered_json;

namespace {

std::string describe_status(int status) {
    if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
    if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
    return "stopped";
}

}  // namespace

ExternalWorker::ExternalWorker(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
    spawn();
}

ExternalWorker::~ExternalWorker() {
    if (pid_ > 0) close(std::chrono::seconds(2));
}

void ExternalWorker::spawn() {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
        throw Error(Errc::io_error, std::string("socketpair: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, sv[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, sv[1], STDOUT_FILENO);
    std::string sh = "sh";
    std::string dash_c = "-c";
    char* argv[] = {sh.data(), dash_c.data(), command_.data(), nullptr};
    // Own process group, so that killing it also reaches anything the shell
    // started.
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setpgroup(&attr, 0);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&actions);
    ::close(sv[1]);
    if (rc != 0) {
        ::close(sv[0]);
        throw Error(Errc::child_crashed, "cannot start '" + command_ + "': " + std::strerror(rc));
    }
    pid_ = pid;
    fd_ = sv[0];

    send(ordered_json({{"cmd", "hello"}, {"protocol", protocol_version}}).dump());
    const std::string reply = receive();
    ordered_json doc;
    try {
        doc = ordered_json::parse(reply);
    } catch (const nlohmann::json::exception&) {
        fail(Errc::protocol_violation, "handshake reply is not JSON: " + reply);
    }
    if (!doc.is_object() || !doc.contains("protocol") || doc["protocol"] != protocol_version) {
        fail(Errc::protocol_violation, "handshake reply lacks \"protocol\": 1: " + reply);
    }
    auto names = doc.find("hyperparameters");
    if (names == doc.end() || !names->is_array()) fail(Errc::protocol_violation, "handshake reply lacks a hyperparameters list: " + reply);
    for (const auto& n : *names) {
        if (!n.is_string()) fail(Errc::protocol_violation, "hyperparameter names must be strings: " + reply);
        hyperparameters_.push_back(n.get<std::string>());
    }
}

void ExternalWorker::fail(Errc code, const std::string& message) {
    broken_ = true;
    if (pid_ > 0) {
        ::kill(-pid_, SIGKILL);
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
    }
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    throw Error(code, "external trainer '" + command_ + "': " + message);
}

void ExternalWorker::send(const std::string& line) {
    if (fd_ < 0) throw Error(Errc::child_crashed, "external trainer '" + command_ + "' is not running");
    std::string buf = line + "\n";
    std::size_t off = 0;
    while (off < buf.size()) {
        const ssize_t n = ::send(fd_, buf.data() + off, buf.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(Errc::child_crashed, std::string("write failed: ") + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

std::string ExternalWorker::receive() {
    if (fd_ < 0) throw Error(Errc::child_crashed, "external trainer '" + command_ + "' is not running");
    const auto deadline = Clock::now() + timeout_;
    for (;;) {
        if (const auto nl = inbox_.find('\n'); nl != std::string::npos) {
            std::string line = inbox_.substr(0, nl);
            inbox_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) fail(Errc::timeout, "no reply within " + std::to_string(timeout_.count()) + " ms");
        pollfd pfd{fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1 << 30)));
        if (ready < 0) {
            if (errno == EINTR) continue;
            fail(Errc::io_error, std::string("poll failed: ") + std::strerror(errno));
        }
        if (ready == 0) continue;
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(Errc::child_crashed, std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            int status = 0;
            std::string how = "closed its output";
            if (::waitpid(pid_, &status, 0) == pid_) {
                how = describe_status(status);
                pid_ = -1;
            }
            fail(Errc::child_crashed, "child " + how);
        }
        inbox_.append(chunk, static_cast<std::size_t>(n));
    }
}

double ExternalWorker::evaluate(const std::string& train_path, const std::string& test_path, const std::string& label,
                                const Assignment& assignment, Metric metric, std::uint64_t seed) {
    const std::int64_t id = next_id_++;
    ordered_json request = {{"id", id},
                            {"cmd", "evaluate"},
                            {"train", train_path},
                            {"test", test_path},
                            {"label", label},
                            {"hyperparams", detail::assignment_to_json(assignment)},
                            {"metric", std::string(metric_name(metric))},
                            {"seed", seed}};
    send(request.dump());
    const std::string line = receive();

    static const std::regex bare_non_finite(R"re("loss"\s*:\s*[-+]?(nan|NaN|NAN|inf|Inf|INF|Infinity|infinity))re");
    if (std::regex_search(line, bare_non_finite)) {
        throw Error(Errc::non_finite_loss, "non-finite loss for " + to_string(assignment) + ": " + line);
    }
    ordered_json reply;
    try {
        reply = ordered_json::parse(line);
    } catch (const nlohmann::json::exception&) {
        fail(Errc::protocol_violation, "malformed reply line: " + line);
    }
    if (!reply.is_object()) fail(Errc::protocol_violation, "reply is not an object: " + line);
    auto rid = reply.find("id");
    if (rid == reply.end() || !rid->is_number_integer() || rid->get<std::int64_t>() != id) {
        fail(Errc::protocol_violation, "expected reply id " + std::to_string(id) + ": " + line);
    }
    if (auto err = reply.find("error"); err != reply.end()) {
        const std::string msg = err->is_string() ? err->get<std::string>() : err->dump();
        throw Error(Errc::trainer_failure, "evaluation of " + to_string(assignment) + " failed: " + msg);
    }
    auto loss = reply.find("loss");
    if (loss == reply.end()) fail(Errc::protocol_violation, "reply has neither loss nor error: " + line);
    double value = 0.0;
    if (loss->is_number()) {
        value = loss->get<double>();
    } else if (loss->is_string()) {
        const std::string text = loss->get<std::string>();
        char* end = nullptr;
        value = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0' || std::isfinite(value)) {
            fail(Errc::protocol_violation, "loss must be a number: " + line);
        }
    } else {
        fail(Errc::protocol_violation, "loss must be a number: " + line);
    }
    if (!std::isfinite(value)) throw Error(Errc::non_finite_loss, "non-finite loss for " + to_string(assignment) + ": " + line);
    return value;
}

int ExternalWorker::close(std::chrono::milliseconds grace) {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
    int result = -1;
    if (pid_ > 0) {
        const auto deadline = Clock::now() + grace;
        int status = 0;
        for (;;) {
            const pid_t r = ::waitpid(pid_, &status, WNOHANG);
            if (r == pid_) {
                result = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
                break;
            }
            if (r < 0 || Clock::now() >= deadline) {
                ::kill(-pid_, SIGKILL);
                ::waitpid(pid_, &status, 0);
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        pid_ = -1;
    }
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    return result;
}

namespace {

std::filesystem::path make_scratch_dir() {
    static std::atomic<unsigned> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("hpi-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

ExternalTrainer::ExternalTrainer(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout), scratch_(make_scratch_dir()) {}

ExternalTrainer::~ExternalTrainer() {
    worker_.reset();
    std::error_code ec;
    std::filesystem::remove_all(scratch_, ec);
}

ExternalWorker& ExternalTrainer::worker() const {
    if (!worker_ || !worker_->alive()) worker_ = std::make_unique<ExternalWorker>(command_, timeout_);
    return *worker_;
}

std::vector<std::string> ExternalTrainer::declared_hyperparameters() const { return worker().hyperparameters(); }

std::string ExternalTrainer::materialize(const Dataset& data) {
    const auto fp = fingerprint(data);
    if (auto it = files_.find(fp); it != files_.end()) return it->second;
    // Subsamples change once per replicate; keep the working set small.
    if (files_.size() >= 4) {
        for (const auto& [_, path] : files_) std::filesystem::remove(path);
        files_.clear();
    }
    char name[32];
    std::snprintf(name, sizeof name, "d%016llx.csv", static_cast<unsigned long long>(fp));
    const auto path = (scratch_ / name).string();
    write_dataset(data, path);
    files_.emplace(fp, path);
    return path;
}

double ExternalTrainer::evaluate(const Dataset& train, const Dataset& test, const Assignment& assignment, Metric metric,
                                 std::uint64_t seed) {
    const std::string test_path = materialize(test);
    const std::string train_path = materialize(train);
    return worker().evaluate(train_path, test_path, train.label_name(), assignment, metric, seed);
}

std::vector<ConformanceCheck> run_protocol_conformance(const std::string& command, std::chrono::milliseconds timeout) {
    std::vector<ConformanceCheck> checks;
    auto record = [&checks](std::string name, bool ok, std::string detail) {
        checks.push_back({std::move(name), ok, std::move(detail)});
    };

    const auto dir = make_scratch_dir();
    const auto toy = (dir / "toy.csv").string();
    {
        std::ofstream out(toy);
        out << "x,y\n0,0\n1,0\n2,1\n3,1\n";
    }
    auto request = [&](std::int64_t id, const std::string& train, ordered_json hyperparams) {
        return ordered_json({{"id", id},
                             {"cmd", "evaluate"},
                             {"train", train},
                             {"test", toy},
                             {"label", "y"},
                             {"hyperparams", std::move(hyperparams)},
                             {"metric", "auc"},
                             {"seed", 1}})
            .dump();
    };
    auto well_formed = [](const ordered_json& r, std::int64_t id) {
        if (!r.is_object() || !r.contains("id") || r["id"] != id) return false;
        const bool has_loss = r.contains("loss") && r["loss"].is_number();
        const bool has_error = r.contains("error") && r["error"].is_string();
        return has_loss != has_error;
    };
    auto parse = [](const std::string& line) {
        try {
            return ordered_json::parse(line);
        } catch (const nlohmann::json::exception&) {
            return ordered_json();
        }
    };

    std::unique_ptr<ExternalWorker> worker;
    try {
        worker = std::make_unique<ExternalWorker>(command, timeout);
        std::string names;
        for (const auto& n : worker->hyperparameters()) names += (names.empty() ? "" : ",") + n;
        record("handshake", true, "hyperparameters: " + names);
    } catch (const std::exception& ex) {
        record("handshake", false, ex.what());
        std::filesystem::remove_all(dir);
        return checks;
    }

    try {
        for (std::int64_t id = 1; id <= 3; ++id) worker->send(request(id, toy, ordered_json::object()));
        bool ok = true;
        std::string detail;
        for (std::int64_t id = 1; id <= 3; ++id) {
            const auto line = worker->receive();
            if (!well_formed(parse(line), id)) {
                ok = false;
                detail = "reply " + std::to_string(id) + " out of order or malformed: " + line;
                break;
            }
        }
        record("ordering", ok, ok ? "3 pipelined replies in order" : detail);

        worker->send(request(4, toy, {{"frobnicate", 1}}));
        const auto unknown = parse(worker->receive());
        const bool names_it = well_formed(unknown, 4) && unknown.contains("error") &&
                              unknown["error"].get<std::string>().find("frobnicate") != std::string::npos;
        record("unknown-hyperparameter", names_it, unknown.dump());

        worker->send(request(5, (dir / "missing" / "nope.csv").string(), ordered_json::object()));
        const auto missing = parse(worker->receive());
        record("unreadable-path", well_formed(missing, 5) && missing.contains("error"), missing.dump());

        worker->send("this is not json");
        const auto garbage = parse(worker->receive());
        const bool error_reply = garbage.is_object() && garbage.contains("error");
        worker->send(request(6, toy, ordered_json::object()));
        const auto after = parse(worker->receive());
        record("malformed-request", error_reply && well_formed(after, 6),
               "error reply then " + after.dump());

        const int status = worker->close(std::chrono::seconds(5));
        record("exit-on-eof", status >= 0, "exit status " + std::to_string(status));
    } catch (const std::exception& ex) {
        record("protocol", false, ex.what());
    }
    std::filesystem::remove_all(dir);
    return checks;
}

}  // namespace hpi
