// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/hypergrid.hpp"
#include "hpi/loss_tensor.hpp"
#include "hpi/metrics.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hpi {

/// Importance of an axis is the variance of the risk as that axis moves over
/// its candidates, every grid point weighted uniformly.
///
/// before: average the other axes out first, then take the variance of the
///         resulting 1-D profile.
/// after:  take the variance along the axis at every setting of the other
///         axes, then average those variances.
///
/// Differences of before-form scores equal ranking_difference on any grid.
/// On two-axis grids the after form differs from the before form by a common
/// term and ranks identically; with three or more axes it generally does not.
enum class ImportanceForm { before, after };
enum class Aggregation { mean_then_variance, variance_then_mean };

std::string_view form_name(ImportanceForm f) noexcept;
ImportanceForm parse_form(std::string_view name);
std::string_view aggregation_name(Aggregation a) noexcept;
Aggregation parse_aggregation(std::string_view name);

double importance_before(const GridArray& risk, std::size_t axis);
double importance_after(const GridArray& risk, std::size_t axis);
double importance(const GridArray& risk, std::size_t axis, ImportanceForm form);

/// mean(m_j^2) - mean(m_k^2) for the marginal profiles m_j, m_k. Equals
/// importance_before(j) - importance_before(k).
double ranking_difference(const GridArray& risk, std::size_t j, std::size_t k);

double joint_importance(const GridArray& risk, std::size_t j, std::size_t k, ImportanceForm form);

struct AxisScore {
    std::string name;
    double before = 0.0;
    double after = 0.0;
    double dispersion = 0.0;  ///< population std of per-replicate scores

    [[nodiscard]] double score(ImportanceForm f) const noexcept { return f == ImportanceForm::before ? before : after; }
    friend bool operator==(const AxisScore&, const AxisScore&) = default;
};

struct PairScore {
    AxisPair axes;
    double before = 0.0;
    double after = 0.0;
    double dispersion = 0.0;

    [[nodiscard]] double score(ImportanceForm f) const noexcept { return f == ImportanceForm::before ? before : after; }
    friend bool operator==(const PairScore&, const PairScore&) = default;
};

struct ReportMetadata {
    std::uint64_t subsample_size = 0;
    std::uint64_t replicates = 0;
    Metric metric = Metric::auc;
    std::uint64_t master_seed = 0;
    Aggregation aggregation = Aggregation::mean_then_variance;
    std::uint64_t imputed_cells = 0;

    friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct ImportanceReport {
    std::vector<AxisScore> axes;  ///< declaration order
    std::vector<PairScore> pairs;
    std::vector<std::string> ranking;  ///< descending chosen score, ties by declaration order
    ImportanceForm form = ImportanceForm::before;
    ReportMetadata metadata;

    [[nodiscard]] const AxisScore& axis(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> axis_names() const;

    friend bool operator==(const ImportanceReport&, const ImportanceReport&) = default;
};

/// Stable descending order of `scores`; equal scores keep declaration order.
std::vector<std::string> rank_by_score(const std::vector<std::string>& names, const std::vector<double>& scores);

ImportanceReport compute_report(const LossTensor& tensor, const std::vector<AxisPair>& pairs,
                                ImportanceForm form = ImportanceForm::before,
                                Aggregation aggregation = Aggregation::mean_then_variance, ReportMetadata metadata = {});

/// Proportion of concordant minus discordant pairs; both lists must hold the
/// same names.
double kendall_tau(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct RankCorrelation {
    std::uint64_t size_a = 0;
    std::uint64_t size_b = 0;
    double tau = 1.0;

    friend bool operator==(const RankCorrelation&, const RankCorrelation&) = default;
};

struct ConsistencyVerdict {
    std::vector<std::uint64_t> sizes;
    std::vector<std::vector<std::string>> rankings;
    bool exact_match = false;
    std::vector<RankCorrelation> kendall;  ///< every pair of sizes, i < j
    std::size_t k = 0;
    bool top_k_match = false;

    friend bool operator==(const ConsistencyVerdict&, const ConsistencyVerdict&) = default;
};

ConsistencyVerdict consistency_check(const std::vector<ImportanceReport>& reports, std::size_t k);

}  // namespace hpi
