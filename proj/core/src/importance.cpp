// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/importance.hpp"

#include "hpi/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace hpi {

std::string_view form_name(ImportanceForm f) noexcept { return f == ImportanceForm::before ? "before" : "after"; }

ImportanceForm parse_form(std::string_view name) {
    if (name == "before") return ImportanceForm::before;
    if (name == "after") return ImportanceForm::after;
    throw Error(Errc::invalid_config, "unknown importance form '" + std::string(name) + "'");
}

std::string_view aggregation_name(Aggregation a) noexcept {
    return a == Aggregation::mean_then_variance ? "mean-then-variance" : "variance-then-mean";
}

Aggregation parse_aggregation(std::string_view name) {
    if (name == "mean-then-variance") return Aggregation::mean_then_variance;
    if (name == "variance-then-mean") return Aggregation::variance_then_mean;
    throw Error(Errc::invalid_config, "unknown aggregation '" + std::string(name) + "'");
}

namespace {

void check_axis(const GridArray& risk, std::size_t axis) {
    if (axis >= risk.rank()) {
        throw Error(Errc::invalid_axes, "axis " + std::to_string(axis) + " outside rank " + std::to_string(risk.rank()));
    }
}

std::vector<std::size_t> complement(std::size_t rank, std::initializer_list<std::size_t> axes) {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < rank; ++a) {
        if (std::find(axes.begin(), axes.end(), a) == axes.end()) out.push_back(a);
    }
    return out;
}

/// Average over complement settings of the variance within each slice.
double mean_slice_variance(const GridArray& risk, std::vector<std::size_t> fixed_axes) {
    const auto slices = group_by_axes(risk, std::move(fixed_axes));
    std::vector<double> variances(slices.size());
    for (std::size_t s = 0; s < slices.size(); ++s) variances[s] = population_variance(slices[s]);
    return mean(variances);
}

double mean_square(std::span<const double> v) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
    return mean(sq);
}

}  // namespace

double importance_before(const GridArray& risk, std::size_t axis) {
    check_axis(risk, axis);
    return population_variance(marginal_mean(risk, {axis}).values());
}

double importance_after(const GridArray& risk, std::size_t axis) {
    check_axis(risk, axis);
    return mean_slice_variance(risk, complement(risk.rank(), {axis}));
}

double importance(const GridArray& risk, std::size_t axis, ImportanceForm form) {
    return form == ImportanceForm::before ? importance_before(risk, axis) : importance_after(risk, axis);
}

double ranking_difference(const GridArray& risk, std::size_t j, std::size_t k) {
    check_axis(risk, j);
    check_axis(risk, k);
    if (j == k) throw Error(Errc::invalid_axes, "ranking difference of an axis with itself");
    return mean_square(marginal_mean(risk, {j}).values()) - mean_square(marginal_mean(risk, {k}).values());
}

double joint_importance(const GridArray& risk, std::size_t j, std::size_t k, ImportanceForm form) {
    check_axis(risk, j);
    check_axis(risk, k);
    if (j == k) throw Error(Errc::invalid_axes, "joint importance needs two distinct axes");
    if (form == ImportanceForm::before) return population_variance(marginal_mean(risk, {j, k}).values());
    return mean_slice_variance(risk, complement(risk.rank(), {j, k}));
}

const AxisScore& ImportanceReport::axis(std::string_view name) const {
    for (const auto& a : axes) {
        if (a.name == name) return a;
    }
    throw Error(Errc::unknown_axis, "report has no axis '" + std::string(name) + "'");
}

std::vector<std::string> ImportanceReport::axis_names() const {
    std::vector<std::string> out;
    for (const auto& a : axes) out.push_back(a.name);
    return out;
}

std::vector<std::string> rank_by_score(const std::vector<std::string>& names, const std::vector<double>& scores) {
    if (names.size() != scores.size()) throw Error(Errc::length_mismatch, "names and scores disagree");
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<std::string> out;
    for (auto i : order) out.push_back(names[i]);
    return out;
}

namespace {

struct Scores {
    std::vector<double> before;
    std::vector<double> after;
};

Scores score_array(const GridArray& risk, const std::vector<std::pair<std::size_t, std::size_t>>& pairs, bool joint) {
    Scores s;
    if (!joint) {
        for (std::size_t a = 0; a < risk.rank(); ++a) {
            s.before.push_back(importance_before(risk, a));
            s.after.push_back(importance_after(risk, a));
        }
    } else {
        for (const auto& [j, k] : pairs) {
            s.before.push_back(joint_importance(risk, j, k, ImportanceForm::before));
            s.after.push_back(joint_importance(risk, j, k, ImportanceForm::after));
        }
    }
    return s;
}

}  // namespace

ImportanceReport compute_report(const LossTensor& tensor, const std::vector<AxisPair>& pairs, ImportanceForm form,
                                Aggregation aggregation, ReportMetadata metadata) {
    if (!tensor.complete()) throw Error(Errc::incomplete_tensor, "importance needs every tensor cell");
    const auto& names = tensor.axis_names();
    std::vector<std::pair<std::size_t, std::size_t>> pair_index;
    for (const auto& [a, b] : pairs) {
        const auto ia = std::find(names.begin(), names.end(), a);
        const auto ib = std::find(names.begin(), names.end(), b);
        if (ia == names.end() || ib == names.end()) throw Error(Errc::unknown_axis, "pair (" + a + ", " + b + ") names an unknown axis");
        if (ia == ib) throw Error(Errc::invalid_axes, "pair (" + a + ", " + b + ") repeats an axis");
        pair_index.emplace_back(static_cast<std::size_t>(ia - names.begin()), static_cast<std::size_t>(ib - names.begin()));
    }

    const std::size_t T = tensor.replicates();
    std::vector<Scores> per_axis(T);
    std::vector<Scores> per_pair(T);
    for (std::size_t t = 0; t < T; ++t) {
        const GridArray rep = tensor.replicate(t);
        per_axis[t] = score_array(rep, pair_index, false);
        per_pair[t] = score_array(rep, pair_index, true);
    }

    Scores axis_scores;
    Scores pair_scores;
    if (aggregation == Aggregation::mean_then_variance) {
        const GridArray avg = replicate_mean(tensor);
        axis_scores = score_array(avg, pair_index, false);
        pair_scores = score_array(avg, pair_index, true);
    } else {
        auto average = [T](const std::vector<Scores>& reps, std::size_t n) {
            Scores out;
            std::vector<double> b(T);
            std::vector<double> a(T);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t t = 0; t < T; ++t) {
                    b[t] = reps[t].before[i];
                    a[t] = reps[t].after[i];
                }
                out.before.push_back(mean(b));
                out.after.push_back(mean(a));
            }
            return out;
        };
        axis_scores = average(per_axis, names.size());
        pair_scores = average(per_pair, pair_index.size());
    }
    auto dispersion = [&](const std::vector<Scores>& reps, std::size_t i) {
        std::vector<double> v(T);
        for (std::size_t t = 0; t < T; ++t) v[t] = form == ImportanceForm::before ? reps[t].before[i] : reps[t].after[i];
        return std::sqrt(population_variance(v));
    };

    ImportanceReport report;
    report.form = form;
    metadata.replicates = T;
    metadata.aggregation = aggregation;
    metadata.imputed_cells = tensor.imputed_count();
    report.metadata = metadata;
    std::vector<double> chosen;
    for (std::size_t a = 0; a < names.size(); ++a) {
        report.axes.push_back({names[a], axis_scores.before[a], axis_scores.after[a], dispersion(per_axis, a)});
        chosen.push_back(form == ImportanceForm::before ? axis_scores.before[a] : axis_scores.after[a]);
    }
    for (std::size_t p = 0; p < pair_index.size(); ++p) {
        report.pairs.push_back({pairs[p], pair_scores.before[p], pair_scores.after[p], dispersion(per_pair, p)});
    }
    report.ranking = rank_by_score(names, chosen);
    return report;
}

double kendall_tau(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size() || std::set<std::string>(a.begin(), a.end()) != std::set<std::string>(b.begin(), b.end())) {
        throw Error(Errc::axis_mismatch, "rankings cover different axes");
    }
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::vector<std::size_t> pos_b(n);
    for (std::size_t i = 0; i < n; ++i) pos_b[i] = static_cast<std::size_t>(std::find(b.begin(), b.end(), a[i]) - b.begin());
    long long concordant = 0;
    long long discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) (pos_b[i] < pos_b[j] ? concordant : discordant) += 1;
    }
    return static_cast<double>(concordant - discordant) / static_cast<double>(concordant + discordant);
}

ConsistencyVerdict consistency_check(const std::vector<ImportanceReport>& reports, std::size_t k) {
    if (reports.size() < 2) throw Error(Errc::invalid_config, "consistency check needs at least two reports");
    const auto names = reports.front().axis_names();
    const std::set<std::string> axis_set(names.begin(), names.end());
    for (const auto& r : reports) {
        const auto n = r.axis_names();
        if (std::set<std::string>(n.begin(), n.end()) != axis_set || n.size() != names.size()) {
            throw Error(Errc::axis_mismatch, "reports cover different axes");
        }
        if (r.metadata.metric != reports.front().metadata.metric) throw Error(Errc::axis_mismatch, "reports use different metrics");
    }
    ConsistencyVerdict v;
    v.k = std::min(k, names.size());
    v.exact_match = true;
    v.top_k_match = true;
    for (const auto& r : reports) {
        v.sizes.push_back(r.metadata.subsample_size);
        v.rankings.push_back(r.ranking);
    }
    const auto& first = v.rankings.front();
    for (const auto& ranking : v.rankings) {
        v.exact_match = v.exact_match && ranking == first;
        v.top_k_match = v.top_k_match && std::equal(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(v.k), ranking.begin());
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (std::size_t j = i + 1; j < reports.size(); ++j) {
            v.kendall.push_back({v.sizes[i], v.sizes[j], kendall_tau(v.rankings[i], v.rankings[j])});
        }
    }
    return v;
}

}  // namespace hpi
