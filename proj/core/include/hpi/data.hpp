// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hpi {

/// Dense numeric features (row-major) with a binary label.
class Dataset {
public:
    Dataset() = default;
    /// Throws on shape mismatch, non-finite features, or labels outside {0,1}.
    Dataset(std::vector<std::string> feature_names, std::vector<double> features, std::vector<std::uint8_t> labels,
            std::string label_name = "label");

    [[nodiscard]] std::size_t rows() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return names_.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {features_.data() + i * cols(), cols()}; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return features_[i * cols() + j]; }
    [[nodiscard]] const std::vector<double>& features() const noexcept { return features_; }
    [[nodiscard]] const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return names_; }
    [[nodiscard]] const std::string& label_name() const noexcept { return label_name_; }
    [[nodiscard]] std::size_t positives() const noexcept;
    [[nodiscard]] bool has_both_classes() const noexcept;

    /// Copy of the given rows, in the given order.
    [[nodiscard]] Dataset take(std::span<const std::size_t> rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<std::string> names_;
    std::vector<double> features_;
    std::vector<std::uint8_t> labels_;
    std::string label_name_ = "label";
};

struct SplitPair {
    Dataset train;
    Dataset test;
};

/// Reads a UTF-8 CSV with a header row. The label column is removed from the
/// features and must hold only 0 and 1.
Dataset load_dataset(const std::string& path, const std::string& label_column);
Dataset parse_dataset(const std::string& csv_text, const std::string& label_column);
/// Writes features then the label as the last column; values round-trip exactly.
void write_dataset(const Dataset& data, const std::string& path);

/// Train size is floor(n * train_fraction). Deterministic in (data, fraction, seed).
SplitPair split(const Dataset& data, double train_fraction, std::uint64_t seed);

enum class Sampling { uniform, stratified };

/// Sample of `size` distinct rows without replacement, kept in source order.
/// Stratified mode keeps the label prevalence (at least one row of each class
/// present in the source, when size allows).
Dataset subsample(const Dataset& data, std::size_t size, std::uint64_t seed, Sampling mode = Sampling::uniform);
std::vector<std::size_t> subsample_rows(const Dataset& data, std::size_t size, std::uint64_t seed,
                                        Sampling mode = Sampling::uniform);

/// FNV-1a over shape, names, features and labels.
std::uint64_t fingerprint(const Dataset& data) noexcept;

}  // namespace hpi
