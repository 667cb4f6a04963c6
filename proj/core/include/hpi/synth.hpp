// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/data.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hpi {

/// Synthetic binary-classification generators with known structure.
/// Features are iid U(-1, 1); the label is drawn from a logistic model.
///
///   interaction      logit = 3 s0 s1 + 1.5 s2 s3 + 0.5 x4, s_j = sign(x_j)
///                    (XOR-like products, so tree depth matters; d >= 4)
///   additive         logit = sum_j w_j g_j(x_j), g_j monotone
///                    (no interactions, so stumps suffice)
///   separable-noise  y = [w.x + 0.1 e > 0], e ~ N(0, 1)
enum class Generator { interaction, additive, separable_noise };

std::string_view generator_name(Generator g) noexcept;
Generator parse_generator(std::string_view name);
std::vector<std::string> generator_names();

Dataset synthesize(Generator generator, std::size_t rows, std::size_t dims, std::uint64_t seed);

}  // namespace hpi
