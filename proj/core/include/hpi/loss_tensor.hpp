// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/hypergrid.hpp"
#include "hpi/metrics.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hpi {

/// Dense row-major array over a grid's axes (last axis fastest).
class GridArray {
public:
    GridArray() = default;
    GridArray(std::vector<std::size_t> shape, std::vector<double> values);

    [[nodiscard]] const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const GridArray&, const GridArray&) = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values) noexcept;
double mean(std::span<const double> values) noexcept;
/// Divides by the count, not count - 1.
double population_variance(std::span<const double> values) noexcept;

/// Partitions the cells by their coordinates on `key_axes`: one bucket per
/// key (row-major over the key axes, ascending axis order), each holding the
/// cells that share it in increasing flat order. An empty key yields a single
/// bucket with every cell.
std::vector<std::vector<double>> group_by_axes(const GridArray& array, std::vector<std::size_t> key_axes);

/// Uniform average over every axis not in `keep_axes`; the result's axes are
/// the kept ones in ascending order.
GridArray marginal_mean(const GridArray& array, std::vector<std::size_t> keep_axes);

enum class CellState : std::uint8_t { empty = 0, filled = 1, imputed = 2 };

/// T x p1 x ... x pq losses, addressed by (replicate, flat grid index).
class LossTensor {
public:
    LossTensor() = default;
    LossTensor(std::size_t replicates, std::vector<std::string> axis_names, std::vector<std::size_t> axis_sizes);
    LossTensor(std::size_t replicates, const HyperGrid& grid);

    [[nodiscard]] std::size_t replicates() const noexcept { return replicates_; }
    [[nodiscard]] const std::vector<std::string>& axis_names() const noexcept { return names_; }
    [[nodiscard]] const std::vector<std::size_t>& axis_sizes() const noexcept { return sizes_; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return grid_size_; }
    [[nodiscard]] std::size_t cell_count() const noexcept { return values_.size(); }

    /// Writes are safe from several threads as long as the cells differ.
    void set(std::size_t replicate, std::size_t flat, double loss);
    void set(std::size_t replicate, const HyperGrid& grid, const Assignment& point, double loss);
    [[nodiscard]] double get(std::size_t replicate, std::size_t flat) const;
    [[nodiscard]] bool is_set(std::size_t replicate, std::size_t flat) const;
    [[nodiscard]] CellState state(std::size_t replicate, std::size_t flat) const;
    [[nodiscard]] bool complete() const noexcept;
    [[nodiscard]] std::size_t filled_count() const noexcept;
    [[nodiscard]] std::size_t imputed_count() const noexcept;

    /// Fills an empty cell with the mean of the same grid point over the other
    /// replicates, falling back to the mean of the replicate's filled cells.
    void impute(std::size_t replicate, std::size_t flat);
    /// Records a value already imputed elsewhere (checkpoint restore).
    void set_imputed(std::size_t replicate, std::size_t flat, double loss);

    [[nodiscard]] GridArray replicate(std::size_t t) const;
    [[nodiscard]] const std::vector<double>& raw_values() const noexcept { return values_; }

    friend bool operator==(const LossTensor&, const LossTensor&) = default;

private:
    [[nodiscard]] std::size_t offset(std::size_t replicate, std::size_t flat) const;

    std::size_t replicates_ = 0;
    std::vector<std::string> names_;
    std::vector<std::size_t> sizes_;
    std::size_t grid_size_ = 0;
    std::vector<double> values_;
    std::vector<CellState> state_;
};

/// Element-wise mean over the replicate axis. Throws if incomplete.
GridArray replicate_mean(const LossTensor& tensor);

/// Identity of the run that produced a tensor, stored in checkpoints.
struct TensorHeader {
    std::uint64_t master_seed = 0;
    Metric metric = Metric::auc;
    std::uint64_t subsample_size = 0;

    friend bool operator==(const TensorHeader&, const TensorHeader&) = default;
};

/// Binary checkpoint; layout in docs/formats.md. Writes atomically via rename.
void save_checkpoint(const std::string& path, const LossTensor& tensor, const TensorHeader& header);
LossTensor load_checkpoint(const std::string& path, TensorHeader* header = nullptr);

}  // namespace hpi
