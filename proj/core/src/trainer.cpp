// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/trainer.hpp"

#include "hpi/error.hpp"

#include <algorithm>

namespace hpi {

void check_declared(const Trainer& trainer, const HyperGrid& grid) {
    const auto declared = trainer.declared_hyperparameters();
    for (const auto& axis : grid.axes()) {
        if (std::find(declared.begin(), declared.end(), axis.name) == declared.end()) {
            std::string known;
            for (const auto& d : declared) known += (known.empty() ? "" : ", ") + d;
            throw Error(Errc::unknown_axis, "trainer does not understand hyperparameter '" + axis.name + "' (known: " + known + ")");
        }
    }
}

}  // namespace hpi
