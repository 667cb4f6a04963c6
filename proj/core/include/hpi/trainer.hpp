// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/data.hpp"
#include "hpi/hypergrid.hpp"
#include "hpi/metrics.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hpi {

/// A learner that fits on `train` with one hyperparameter assignment and
/// returns the metric on `test`. Implementations must be deterministic in all
/// arguments. An instance is used by one thread at a time.
class Trainer {
public:
    virtual ~Trainer() = default;

    [[nodiscard]] virtual std::vector<std::string> declared_hyperparameters() const = 0;
    virtual double evaluate(const Dataset& train, const Dataset& test, const Assignment& assignment, Metric metric,
                            std::uint64_t seed) = 0;
};

using TrainerFactory = std::function<std::unique_ptr<Trainer>()>;

/// Throws Errc::unknown_axis if the grid names an axis the trainer does not declare.
void check_declared(const Trainer& trainer, const HyperGrid& grid);

}  // namespace hpi
