// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace hpi {

enum class Metric { auc, log_loss, accuracy };

[[nodiscard]] constexpr bool higher_is_better(Metric m) noexcept { return m != Metric::log_loss; }
std::string_view metric_name(Metric m) noexcept;
/// Accepts "auc", "logloss" (or "log_loss") and "accuracy".
Metric parse_metric(std::string_view name);

constexpr double log_loss_epsilon = 1e-12;

/// Mann-Whitney estimate (wins + ties / 2) / (n+ * n-), via midranks.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);
double log_loss(std::span<const double> probabilities, std::span<const std::uint8_t> labels);
/// Fraction of rows with (score >= threshold) == label.
double accuracy(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold = 0.5);

double evaluate_metric(Metric m, std::span<const double> probabilities, std::span<const std::uint8_t> labels);

/// Maps a metric value onto a quantity to minimize.
[[nodiscard]] constexpr double as_risk(Metric m, double value) noexcept { return higher_is_better(m) ? -value : value; }

}  // namespace hpi
