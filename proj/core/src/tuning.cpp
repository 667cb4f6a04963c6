// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/tuning.hpp"

#include "hpi/error.hpp"
#include "hpi/random.hpp"
#include "json_util.hpp"
#include "work_pool.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

namespace hpi {

using detail::ordered_json;

void validate_plan(const TuningPlan& plan) {
    std::set<std::string> seen;
    for (const auto& group : plan.groups) {
        if (group.empty()) throw Error(Errc::invalid_config, "plan contains an empty group");
        for (const auto& name : group) {
            if (!plan.grid.axis_index(name)) throw Error(Errc::unknown_axis, "plan names unknown axis '" + name + "'");
            if (!seen.insert(name).second) throw Error(Errc::overlapping_groups, "axis '" + name + "' appears in two groups");
        }
    }
    if (plan.defaults.size() != plan.grid.axis_count()) throw Error(Errc::invalid_config, "plan defaults must bind every axis");
    (void)flat_index(plan.grid, plan.defaults);
}

std::vector<std::vector<std::string>> parse_group_list(const std::string& text) {
    std::vector<std::vector<std::string>> groups;
    std::stringstream outer(text);
    std::string group;
    while (std::getline(outer, group, '|')) {
        std::vector<std::string> names;
        std::stringstream inner(group);
        std::string name;
        while (std::getline(inner, name, ',')) {
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            if (!name.empty()) names.push_back(name);
        }
        if (names.empty()) throw Error(Errc::invalid_config, "empty group in '" + text + "'");
        groups.push_back(std::move(names));
    }
    if (groups.empty() || text.back() == '|') throw Error(Errc::invalid_config, "empty group in '" + text + "'");
    return groups;
}

TuningPlan plan_groups(const ImportanceReport& report, const HyperGrid& grid, const PlanPolicy& policy) {
    for (const auto& axis : grid.axes()) (void)report.axis(axis.name);
    TuningPlan plan{grid, {}, grid.defaults()};

    std::vector<std::string> ranked;
    for (const auto& name : report.ranking) {
        if (grid.axis_index(name)) ranked.push_back(name);
    }
    auto score = [&](const std::string& name) { return report.axis(name).score(report.form); };

    if (const auto* gap = std::get_if<GapRatioPolicy>(&policy)) {
        if (!(gap->ratio > 1.0)) throw Error(Errc::invalid_config, "gap ratio must exceed 1");
        const double top = ranked.empty() ? 0.0 : score(ranked.front());
        const double zero_below = top * 1e-12;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            const double s = score(ranked[i]);
            if (!(s > zero_below)) break;
            if (i == 0 || score(ranked[i - 1]) / s >= gap->ratio) plan.groups.emplace_back();
            plan.groups.back().push_back(ranked[i]);
        }
    } else if (const auto* top = std::get_if<TopPolicy>(&policy)) {
        if (top->count < 1) throw Error(Errc::invalid_config, "top count must be >= 1");
        const auto m = std::min(top->count, ranked.size());
        plan.groups.emplace_back(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(m));
    } else {
        plan.groups = std::get<ExplicitPolicy>(policy).groups;
    }
    validate_plan(plan);
    return plan;
}

namespace {

using Clock = std::chrono::steady_clock;

struct SearchResult {
    std::size_t best = 0;
    double metric_value = 0.0;
};

/// Evaluates `points` (on the full grid) and returns the risk-minimizing one;
/// ties go to the lowest position.
SearchResult search(const HyperGrid& grid, const std::vector<Assignment>& points, const SplitPair& data,
                    const TrainerFactory& factory, const TuningOptions& options) {
    std::vector<double> values(points.size());
    const auto failures = detail::run_pool(points.size(), options.workers, factory, true, [&](std::size_t i, Trainer& trainer) {
        const auto seed = derive_seed(options.seed, {flat_index(grid, points[i])});
        values[i] = trainer.evaluate(data.train, data.test, points[i], options.metric, seed);
    });
    if (!failures.empty()) {
        const auto& f = failures.front();
        try {
            std::rethrow_exception(f.error);
        } catch (const Error& ex) {
            const std::string where = f.index < points.size() ? to_string(points[f.index]) : "trainer start-up";
            throw Error(ex.code(), "tuning " + where + ": " + ex.what());
        } catch (const std::exception& ex) {
            throw Error(Errc::trainer_failure, ex.what());
        }
    }
    SearchResult r;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (as_risk(options.metric, values[i]) < as_risk(options.metric, values[r.best])) r.best = i;
    }
    r.metric_value = values[r.best];
    return r;
}

Assignment with_overrides(const HyperGrid& grid, const Assignment& base, const Assignment& overrides) {
    std::vector<Binding> out;
    for (const auto& axis : grid.axes()) {
        const Value* v = overrides.find(axis.name);
        out.push_back({axis.name, v ? *v : base.at(axis.name)});
    }
    return Assignment(std::move(out));
}

}  // namespace

TuningOutcome tune_sequential(const TuningPlan& plan, const SplitPair& data, const TrainerFactory& factory,
                              const TuningOptions& options) {
    validate_plan(plan);
    const auto start = Clock::now();
    TuningOutcome out;
    out.method = "sequential";
    out.metric = options.metric;
    Assignment current = plan.defaults;
    if (plan.groups.empty()) {
        const auto r = search(plan.grid, {current}, data, factory, options);
        out.metric_value = r.metric_value;
        out.fit_count = 1;
    }
    for (const auto& group : plan.groups) {
        const auto group_start = Clock::now();
        const HyperGrid sub = plan.grid.restrict_to(group);
        std::vector<Assignment> points;
        points.reserve(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i) points.push_back(with_overrides(plan.grid, current, sub.point(i)));
        const auto r = search(plan.grid, points, data, factory, options);
        current = points[r.best];
        out.metric_value = r.metric_value;
        out.fit_count += points.size();
        GroupTrace trace;
        trace.axes = sub.names();
        trace.evaluated = points.size();
        trace.chosen = sub.point(r.best);
        trace.metric_value = r.metric_value;
        trace.seconds = std::chrono::duration<double>(Clock::now() - group_start).count();
        out.trace.push_back(std::move(trace));
    }
    out.selected = current;
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

TuningOutcome tune_simultaneous(const HyperGrid& grid, const SplitPair& data, const TrainerFactory& factory,
                                const TuningOptions& options) {
    const auto start = Clock::now();
    TuningOutcome out;
    out.method = "simultaneous";
    out.metric = options.metric;
    const auto points = enumerate_points(grid);
    const auto r = search(grid, points, data, factory, options);
    out.selected = points[r.best];
    out.metric_value = r.metric_value;
    out.fit_count = points.size();
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    GroupTrace trace;
    trace.axes = grid.names();
    trace.evaluated = points.size();
    trace.chosen = out.selected;
    trace.metric_value = r.metric_value;
    trace.seconds = out.wall_seconds;
    out.trace.push_back(std::move(trace));
    return out;
}

std::string plan_to_json(const TuningPlan& plan) {
    const auto grid_doc = ordered_json::parse(serialize_grid({plan.grid, {}}));
    const ordered_json doc = {{"groups", plan.groups},
                              {"defaults", detail::assignment_to_json(plan.defaults)},
                              {"grid", grid_doc}};
    return doc.dump(2) + "\n";
}

TuningPlan plan_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw Error(Errc::invalid_config, std::string("plan: ") + ex.what());
    }
    if (!doc.is_object() || !doc.contains("grid") || !doc.contains("groups")) {
        throw Error(Errc::invalid_config, "plan needs 'grid' and 'groups'");
    }
    TuningPlan plan;
    plan.grid = parse_grid(doc["grid"].dump());
    plan.groups = detail::require<std::vector<std::vector<std::string>>>(doc, "groups", Errc::invalid_config);
    plan.defaults = doc.contains("defaults") ? detail::assignment_from_json(doc["defaults"], plan.grid, Errc::invalid_config)
                                             : plan.grid.defaults();
    validate_plan(plan);
    return plan;
}

std::string outcome_to_json(const TuningOutcome& outcome) {
    ordered_json groups = ordered_json::array();
    ordered_json group_seconds = ordered_json::array();
    for (const auto& g : outcome.trace) {
        groups.push_back({{"axes", g.axes},
                          {"evaluated", g.evaluated},
                          {"chosen", detail::assignment_to_json(g.chosen)},
                          {"metric_value", g.metric_value}});
        group_seconds.push_back(g.seconds);
    }
    ordered_json columns = ordered_json::array();
    ordered_json row = ordered_json::array();
    for (const auto& b : outcome.selected.bindings()) {
        columns.push_back(b.name);
        row.push_back(to_string(b.value));
    }
    const ordered_json doc = {{"method", outcome.method},
                              {"metric", std::string(metric_name(outcome.metric))},
                              {"metric_value", outcome.metric_value},
                              {"fit_count", outcome.fit_count},
                              {"selected", detail::assignment_to_json(outcome.selected)},
                              {"table", {{"columns", columns}, {"row", row}}},
                              {"groups", groups},
                              {"timing", {{"wall_seconds", outcome.wall_seconds}, {"group_seconds", group_seconds}}}};
    return doc.dump(2) + "\n";
}

TuningComparison compare(const TuningOutcome& sequential, const TuningOutcome& simultaneous) {
    TuningComparison c;
    c.metric_delta = sequential.metric_value - simultaneous.metric_value;
    c.fit_ratio = simultaneous.fit_count ? static_cast<double>(sequential.fit_count) / static_cast<double>(simultaneous.fit_count) : 0.0;
    return c;
}

std::string comparison_to_json(const TuningOutcome& sequential, const TuningOutcome& simultaneous) {
    const auto c = compare(sequential, simultaneous);
    const ordered_json doc = {
        {"sequential", ordered_json::parse(outcome_to_json(sequential))},
        {"simultaneous", ordered_json::parse(outcome_to_json(simultaneous))},
        {"comparison",
         {{"metric_delta", c.metric_delta},
          {"fit_ratio", c.fit_ratio},
          {"sequential_fits", sequential.fit_count},
          {"simultaneous_fits", simultaneous.fit_count}}}};
    return doc.dump(2) + "\n";
}

}  // namespace hpi
