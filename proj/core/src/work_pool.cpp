// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "work_pool.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace hpi::detail {

std::vector<TaskFailure> run_pool(std::size_t n, std::size_t workers, const TrainerFactory& factory, bool stop_on_failure,
                                  const std::function<void(std::size_t, Trainer&)>& task) {
    std::vector<TaskFailure> failures;
    if (n == 0) return failures;
    const std::size_t threads = std::clamp<std::size_t>(workers, 1, n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mu;

    auto body = [&] {
        std::unique_ptr<Trainer> trainer;
        try {
            trainer = factory();
        } catch (...) {
            std::lock_guard lock(mu);
            // Attribute a trainer start-up failure to the first task this worker would run.
            failures.push_back({next.load(), std::current_exception()});
            stop = true;
            return;
        }
        for (;;) {
            if (stop_on_failure && stop.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                task(i, *trainer);
            } catch (...) {
                std::lock_guard lock(mu);
                failures.push_back({i, std::current_exception()});
                stop = true;
            }
        }
    };

    if (threads == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    std::sort(failures.begin(), failures.end(), [](const TaskFailure& a, const TaskFailure& b) { return a.index < b.index; });
    return failures;
}

}  // namespace hpi::detail
