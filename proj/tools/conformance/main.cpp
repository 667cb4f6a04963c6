// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

// Runs the wire-protocol conformance checks against an external trainer.

#include <CLI11.hpp>

#include "hpi/external_trainer.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"External-trainer protocol conformance", "hpi-conformance"};
    std::string command;
    double timeout = 60.0;
    app.add_option("command", command, "Trainer command line, run under /bin/sh -c")->required();
    app.add_option("--timeout", timeout, "Seconds per exchange")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const auto checks =
        hpi::run_protocol_conformance(command, std::chrono::milliseconds(static_cast<long long>(timeout * 1000)));
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) std::cout << "  " << c.detail;
        std::cout << "\n";
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}
