// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hpi/data.hpp"
#include "hpi/hypergrid.hpp"
#include "hpi/importance.hpp"
#include "hpi/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hpi {

/// Ordered groups of axes to tune one after another. Axes in no group stay
/// at their defaults.
struct TuningPlan {
    HyperGrid grid;
    std::vector<std::vector<std::string>> groups;
    Assignment defaults;

    friend bool operator==(const TuningPlan&, const TuningPlan&) = default;
};

/// Start a new group wherever consecutive descending scores fall by at least
/// `ratio`. Axes whose score is zero (at most 1e-12 of the largest) are left
/// out of the plan.
struct GapRatioPolicy {
    double ratio = 3.0;
};
struct TopPolicy {
    std::size_t count = 1;
};
struct ExplicitPolicy {
    std::vector<std::vector<std::string>> groups;
};
using PlanPolicy = std::variant<GapRatioPolicy, TopPolicy, ExplicitPolicy>;

TuningPlan plan_groups(const ImportanceReport& report, const HyperGrid& grid, const PlanPolicy& policy);
/// Groups must be non-empty, disjoint, and name axes of the plan's grid.
void validate_plan(const TuningPlan& plan);

/// Parses "a,b|c" into {{a, b}, {c}}.
std::vector<std::vector<std::string>> parse_group_list(const std::string& text);

struct GroupTrace {
    std::vector<std::string> axes;
    std::size_t evaluated = 0;
    Assignment chosen;  ///< values picked for this group's axes
    double metric_value = 0.0;
    double seconds = 0.0;
};

struct TuningOutcome {
    std::string method;  ///< "sequential" or "simultaneous"
    Metric metric = Metric::auc;
    Assignment selected;  ///< every axis of the grid
    double metric_value = 0.0;  ///< natural orientation, on the test split
    std::size_t fit_count = 0;
    double wall_seconds = 0.0;
    std::vector<GroupTrace> trace;
};

struct TuningOptions {
    Metric metric = Metric::auc;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// Grid search of each group in order, earlier groups fixed at their chosen
/// values and later ones at defaults. Ties go to the earliest point in
/// enumeration order. An empty plan evaluates the defaults once.
TuningOutcome tune_sequential(const TuningPlan& plan, const SplitPair& data, const TrainerFactory& factory,
                              const TuningOptions& options);
TuningOutcome tune_simultaneous(const HyperGrid& grid, const SplitPair& data, const TrainerFactory& factory,
                                const TuningOptions& options);

/// Plan JSON embeds the grid so that `tune` needs nothing else.
std::string plan_to_json(const TuningPlan& plan);
TuningPlan plan_from_json(const std::string& text);

std::string outcome_to_json(const TuningOutcome& outcome);

struct TuningComparison {
    double metric_delta = 0.0;  ///< sequential - simultaneous
    double fit_ratio = 0.0;     ///< sequential fits / simultaneous fits
};

TuningComparison compare(const TuningOutcome& sequential, const TuningOutcome& simultaneous);
std::string comparison_to_json(const TuningOutcome& sequential, const TuningOutcome& simultaneous);

}  // namespace hpi
