// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpi {

/// Every failure the library reports carries one of these codes. The CLI maps
/// them onto its exit-code contract through `exit_category`.
enum class Errc {
    // grid configuration
    malformed_grid,
    duplicate_axis,
    duplicate_value,
    empty_axis,
    default_not_in_values,
    mixed_axis_types,
    unknown_axis,
    unknown_value,
    // data
    missing_file,
    missing_label_column,
    non_binary_label,
    non_numeric_cell,
    non_finite_cell,
    empty_file,
    ragged_row,
    degenerate_split,
    size_out_of_range,
    single_class,
    // metrics / shapes
    length_mismatch,
    width_mismatch,
    // tensor
    double_write,
    non_finite_loss,
    index_out_of_range,
    incomplete_tensor,
    invalid_axes,
    checkpoint_mismatch,
    malformed_checkpoint,
    // importance / reports
    axis_mismatch,
    malformed_report,
    // configuration
    invalid_config,
    invalid_params,
    overlapping_groups,
    // trainer
    trainer_failure,
    child_crashed,
    protocol_violation,
    timeout,
    io_error,
};

enum class ErrorCategory { config = 2, trainer = 3 };

ErrorCategory exit_category(Errc code) noexcept;
std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace hpi
