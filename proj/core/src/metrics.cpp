// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/metrics.hpp"

#include "hpi/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hpi {

std::string_view metric_name(Metric m) noexcept {
    switch (m) {
    case Metric::auc: return "auc";
    case Metric::log_loss: return "logloss";
    case Metric::accuracy: return "accuracy";
    }
    return "auc";
}

Metric parse_metric(std::string_view name) {
    if (name == "auc") return Metric::auc;
    if (name == "logloss" || name == "log_loss") return Metric::log_loss;
    if (name == "accuracy") return Metric::accuracy;
    throw Error(Errc::invalid_config, "unknown metric '" + std::string(name) + "'");
}

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw Error(Errc::length_mismatch, std::to_string(a) + " scores for " + std::to_string(b) + " labels");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_lengths(scores.size(), labels.size());
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of midranks (1-based) over positives.
    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) {
                rank_sum += midrank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw Error(Errc::single_class, "AUC needs both classes present");
    const double p = static_cast<double>(n_pos);
    return (rank_sum - p * (p + 1.0) * 0.5) / (p * static_cast<double>(n_neg));
}

double log_loss(std::span<const double> probabilities, std::span<const std::uint8_t> labels) {
    check_lengths(probabilities.size(), labels.size());
    if (labels.empty()) throw Error(Errc::length_mismatch, "log-loss of an empty vector");
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(probabilities[i], log_loss_epsilon, 1.0 - log_loss_epsilon);
        total -= labels[i] ? std::log(p) : std::log1p(-p);
    }
    return total / static_cast<double>(labels.size());
}

double accuracy(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold) {
    check_lengths(scores.size(), labels.size());
    if (labels.empty()) throw Error(Errc::length_mismatch, "accuracy of an empty vector");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        hits += predicted == (labels[i] == 1);
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double evaluate_metric(Metric m, std::span<const double> probabilities, std::span<const std::uint8_t> labels) {
    switch (m) {
    case Metric::auc: return auc(probabilities, labels);
    case Metric::log_loss: return log_loss(probabilities, labels);
    case Metric::accuracy: return accuracy(probabilities, labels);
    }
    return 0.0;
}

}  // namespace hpi
