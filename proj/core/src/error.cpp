// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/error.hpp"

namespace hpi {

ErrorCategory exit_category(Errc code) noexcept {
    switch (code) {
    case Errc::trainer_failure:
    case Errc::child_crashed:
    case Errc::protocol_violation:
    case Errc::timeout:
    case Errc::non_finite_loss:
        return ErrorCategory::trainer;
    default:
        return ErrorCategory::config;
    }
}

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::malformed_grid: return "malformed-grid";
    case Errc::duplicate_axis: return "duplicate-axis";
    case Errc::duplicate_value: return "duplicate-value";
    case Errc::empty_axis: return "empty-axis";
    case Errc::default_not_in_values: return "default-not-in-values";
    case Errc::mixed_axis_types: return "mixed-axis-types";
    case Errc::unknown_axis: return "unknown-axis";
    case Errc::unknown_value: return "unknown-value";
    case Errc::missing_file: return "missing-file";
    case Errc::missing_label_column: return "missing-label-column";
    case Errc::non_binary_label: return "non-binary-label";
    case Errc::non_numeric_cell: return "non-numeric-cell";
    case Errc::non_finite_cell: return "non-finite-cell";
    case Errc::empty_file: return "empty-file";
    case Errc::ragged_row: return "ragged-row";
    case Errc::degenerate_split: return "degenerate-split";
    case Errc::size_out_of_range: return "size-out-of-range";
    case Errc::single_class: return "single-class";
    case Errc::length_mismatch: return "length-mismatch";
    case Errc::width_mismatch: return "width-mismatch";
    case Errc::double_write: return "double-write";
    case Errc::non_finite_loss: return "non-finite-loss";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::incomplete_tensor: return "incomplete-tensor";
    case Errc::invalid_axes: return "invalid-axes";
    case Errc::checkpoint_mismatch: return "checkpoint-mismatch";
    case Errc::malformed_checkpoint: return "malformed-checkpoint";
    case Errc::axis_mismatch: return "axis-mismatch";
    case Errc::malformed_report: return "malformed-report";
    case Errc::invalid_config: return "invalid-config";
    case Errc::invalid_params: return "invalid-params";
    case Errc::overlapping_groups: return "overlapping-groups";
    case Errc::trainer_failure: return "trainer-failure";
    case Errc::child_crashed: return "child-crashed";
    case Errc::protocol_violation: return "protocol-violation";
    case Errc::timeout: return "timeout";
    case Errc::io_error: return "io-error";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace hpi
