// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/trainer.hpp"

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace hpi::detail {

struct TaskFailure {
    std::size_t index = 0;
    std::exception_ptr error;
};

/// Runs task(i, trainer) for i in [0, n) on up to `workers` threads, each
/// owning one trainer from `factory`. Tasks are claimed in increasing index
/// order. With `stop_on_failure`, no new task starts after a failure. Returns
/// the failures sorted by index.
std::vector<TaskFailure> run_pool(std::size_t n, std::size_t workers, const TrainerFactory& factory, bool stop_on_failure,
                                  const std::function<void(std::size_t, Trainer&)>& task);

}  // namespace hpi::detail
