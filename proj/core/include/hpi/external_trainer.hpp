// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/error.hpp"
#include "hpi/trainer.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace hpi {

constexpr int protocol_version = 1;

/// A persistent child process speaking newline-delimited JSON on its
/// stdin/stdout. The command runs under `/bin/sh -c`.
///
///   parent: {"cmd": "hello", "protocol": 1}
///   child:  {"protocol": 1, "hyperparameters": [names...]}
///   parent: {"id": N, "cmd": "evaluate", "train": path, "test": path,
///            "label": col, "hyperparams": {...}, "metric": m, "seed": s}
///   child:  {"id": N, "loss": x}  or  {"id": N, "error": "..."}
class ExternalWorker {
public:
    using Clock = std::chrono::steady_clock;

    explicit ExternalWorker(std::string command, std::chrono::milliseconds timeout = std::chrono::seconds(600));
    ~ExternalWorker();
    ExternalWorker(const ExternalWorker&) = delete;
    ExternalWorker& operator=(const ExternalWorker&) = delete;

    [[nodiscard]] const std::vector<std::string>& hyperparameters() const noexcept { return hyperparameters_; }
    [[nodiscard]] bool alive() const noexcept { return pid_ > 0 && !broken_; }

    double evaluate(const std::string& train_path, const std::string& test_path, const std::string& label,
                    const Assignment& assignment, Metric metric, std::uint64_t seed);

    /// Raw line transport, for conformance probes that pipeline requests.
    void send(const std::string& line);
    std::string receive();

    /// Closes the child's stdin and waits for it to exit; returns its exit
    /// status, or -1 if it had to be killed.
    int close(std::chrono::milliseconds grace = std::chrono::seconds(5));

private:
    void spawn();
    [[noreturn]] void fail(Errc code, const std::string& message);

    std::string command_;
    std::chrono::milliseconds timeout_;
    int pid_ = -1;
    int fd_ = -1;
    bool broken_ = false;
    std::string inbox_;
    std::int64_t next_id_ = 1;
    std::vector<std::string> hyperparameters_;
};

/// Trainer backed by ExternalWorker. Datasets are materialized as CSV files in
/// a private temporary directory and reused while their content is unchanged.
class ExternalTrainer final : public Trainer {
public:
    explicit ExternalTrainer(std::string command, std::chrono::milliseconds timeout = std::chrono::seconds(600));
    ~ExternalTrainer() override;

    [[nodiscard]] std::vector<std::string> declared_hyperparameters() const override;
    double evaluate(const Dataset& train, const Dataset& test, const Assignment& assignment, Metric metric,
                    std::uint64_t seed) override;

private:
    std::string materialize(const Dataset& data);
    ExternalWorker& worker() const;

    std::string command_;
    std::chrono::milliseconds timeout_;
    mutable std::unique_ptr<ExternalWorker> worker_;
    std::filesystem::path scratch_;
    std::map<std::uint64_t, std::string> files_;
};

/// Black-box protocol checks against any command: handshake, id ordering,
/// error replies for unknown hyperparameters and unreadable paths, and exit on
/// closed stdin.
struct ConformanceCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<ConformanceCheck> run_protocol_conformance(const std::string& command,
                                                       std::chrono::milliseconds timeout = std::chrono::seconds(60));

}  // namespace hpi
