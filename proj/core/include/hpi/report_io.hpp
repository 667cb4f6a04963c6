// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/importance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hpi {

/// Contents of report.json: one report per subsample size, plus the verdict
/// across sizes when there are at least two. The grid is embedded so that a
/// plan can be derived from the document alone.
struct EstimationDocument {
    std::vector<ImportanceReport> reports;
    std::optional<ConsistencyVerdict> consistency;
    std::optional<GridConfig> grid;

    friend bool operator==(const EstimationDocument&, const EstimationDocument&) = default;
};

std::string report_to_json(const ImportanceReport& report);
ImportanceReport report_from_json(const std::string& text);

std::string verdict_to_json(const ConsistencyVerdict& verdict);

std::string estimation_to_json(const EstimationDocument& doc);
/// Accepts either an estimation document or a bare single report.
EstimationDocument estimation_from_json(const std::string& text);
EstimationDocument load_estimation(const std::string& path);

/// subsample_size,axis,before,after,rank (rank is 1-based).
std::string ranking_csv(const std::vector<ImportanceReport>& reports);
/// Tidy subsample_size,axis,score rows, scores multiplied by `scale`. Pairs
/// appear with axis "a&b".
std::string plot_data_csv(const std::vector<ImportanceReport>& reports, double scale = 1e6);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hpi
