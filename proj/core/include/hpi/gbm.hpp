// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hpi {

/// Gradient-boosted trees on the logistic loss.
struct GbmParams {
    int max_depth = 6;          ///< edges from root to deepest leaf; 1 is a stump
    double step_size = 0.3;
    int max_iteration = 50;     ///< boosting rounds
    double subsample = 1.0;     ///< row fraction drawn per round
    double colsample = 1.0;     ///< feature fraction drawn per tree
    double alpha = 0.0;         ///< L1 on leaf values
    double lambda = 1.0;        ///< L2 on leaf values
    double gamma = 0.0;         ///< minimum gain to split
    int max_bins = 256;
    int min_instances = 1;      ///< rows required in each child

    void validate() const;
    /// Overrides fields named in `assignment`; unknown names throw before any work.
    static GbmParams from_assignment(const Assignment& assignment, GbmParams base);
    static GbmParams from_assignment(const Assignment& assignment);
    static const std::vector<std::string>& names();
};

struct TreeNode {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;  ///< rows with x < threshold go left
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    [[nodiscard]] double predict(std::span<const double> row) const;
};

class GbmModel {
public:
    GbmModel() = default;
    GbmModel(std::vector<Tree> trees, double step_size, std::size_t width)
        : trees_(std::move(trees)), step_size_(step_size), width_(width) {}

    [[nodiscard]] const std::vector<Tree>& trees() const noexcept { return trees_; }
    [[nodiscard]] double step_size() const noexcept { return step_size_; }
    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] double margin(std::span<const double> row) const;

private:
    std::vector<Tree> trees_;
    double step_size_ = 0.0;
    std::size_t width_ = 0;
};

GbmModel gbm_fit(const Dataset& train, const GbmParams& params, std::uint64_t seed);
/// Probabilities for every row of `data`; its width must match the model.
std::vector<double> gbm_predict(const GbmModel& model, const Dataset& data);
std::vector<double> gbm_predict(const GbmModel& model, std::span<const double> features, std::size_t width);

double sigmoid(double x) noexcept;

class GbmTrainer final : public Trainer {
public:
    explicit GbmTrainer(GbmParams base = {}) : base_(base) {}

    [[nodiscard]] std::vector<std::string> declared_hyperparameters() const override { return GbmParams::names(); }
    double evaluate(const Dataset& train, const Dataset& test, const Assignment& assignment, Metric metric,
                    std::uint64_t seed) override;

private:
    GbmParams base_;
};

}  // namespace hpi
