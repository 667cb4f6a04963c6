// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/data.hpp"
#include "hpi/importance.hpp"
#include "hpi/loss_tensor.hpp"
#include "hpi/report_io.hpp"
#include "hpi/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hpi {

enum class FailurePolicy {
    abort,  ///< the first failed evaluation aborts the run
    skip,   ///< failed cells are imputed and counted in the report metadata
};

struct CheckpointOptions {
    std::string directory;  ///< empty disables checkpoints
    bool resume = false;
    std::size_t flush_every = 64;  ///< cells between checkpoint writes
};

struct EstimationConfig {
    HyperGrid grid;
    std::vector<AxisPair> joint;
    std::vector<std::size_t> subsample_sizes;  ///< strictly increasing row counts
    std::size_t replicates = 1;
    double train_fraction = 0.7;
    Metric metric = Metric::auc;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    FailurePolicy failure_policy = FailurePolicy::abort;
    Sampling sampling = Sampling::uniform;
    std::optional<std::size_t> test_subsample_size;
    ImportanceForm form = ImportanceForm::before;
    Aggregation aggregation = Aggregation::mean_then_variance;
    std::size_t top_k = 2;
    CheckpointOptions checkpoint;
};

struct SizeResult {
    std::size_t subsample_size = 0;
    LossTensor tensor;
    ImportanceReport report;
    std::size_t fits = 0;           ///< evaluations run in this invocation
    std::size_t resumed_cells = 0;  ///< cells restored from a checkpoint
    std::size_t failed_cells = 0;
    double wall_seconds = 0.0;
    double fit_seconds = 0.0;  ///< summed over evaluations
};

struct EstimationResult {
    std::vector<SizeResult> sizes;
    std::optional<ConsistencyVerdict> consistency;

    [[nodiscard]] std::size_t fit_count() const noexcept;
    [[nodiscard]] EstimationDocument document() const;
};

/// Values in (0, 1) are fractions of `train_rows` (floored); others are row counts.
std::vector<std::size_t> resolve_sizes(const std::vector<double>& raw, std::size_t train_rows);
/// Throws with the offending size named.
void validate_config(const EstimationConfig& config, std::size_t train_rows);

/// Seeds, all derived from the master seed:
///   split       derive_seed(master, {})
///   test sample derive_seed(master, {2^64 - 1})
///   subsample   derive_seed(master, {size_index, t})
///   fit         derive_seed(master, {size_index, t, flat grid index})
std::uint64_t split_seed(std::uint64_t master) noexcept;

/// Subsample -> grid search -> repeat T times -> tensor -> report, for every
/// configured size, then the cross-size consistency verdict.
EstimationResult run_estimation(const Dataset& data, const EstimationConfig& config, const TrainerFactory& factory);
EstimationResult run_estimation(const SplitPair& split, const EstimationConfig& config, const TrainerFactory& factory);

std::string checkpoint_path(const std::string& directory, std::size_t subsample_size);

struct TimingRow {
    std::size_t subsample_size = 0;
    double mean_fit_seconds = 0.0;
    double mean_loss = 0.0;  ///< grand mean of the tensor
};

std::vector<TimingRow> timing_profile(const EstimationResult& result);
std::vector<TimingRow> timing_profile(const Dataset& data, const EstimationConfig& config, const TrainerFactory& factory);
std::string timing_csv(const std::vector<TimingRow>& rows);

}  // namespace hpi
