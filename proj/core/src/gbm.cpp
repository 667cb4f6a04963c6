// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/gbm.hpp"

#include "hpi/error.hpp"
#include "hpi/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hpi {

const std::vector<std::string>& GbmParams::names() {
    static const std::vector<std::string> kNames = {"max_depth", "step_size", "max_iteration", "subsample", "colsample",
                                                   "alpha",     "lambda",    "gamma",         "max_bins",  "min_instances"};
    return kNames;
}

void GbmParams::validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::invalid_params, what); };
    if (max_depth < 1) fail("max_depth must be >= 1");
    if (!(step_size >= 0.0) || !std::isfinite(step_size)) fail("step_size must be a finite number >= 0");
    if (max_iteration < 1) fail("max_iteration must be >= 1");
    if (!(subsample > 0.0 && subsample <= 1.0)) fail("subsample must lie in (0, 1]");
    if (!(colsample > 0.0 && colsample <= 1.0)) fail("colsample must lie in (0, 1]");
    if (!(alpha >= 0.0)) fail("alpha must be >= 0");
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (!(gamma >= 0.0)) fail("gamma must be >= 0");
    if (max_bins < 2 || max_bins > 65536) fail("max_bins must lie in [2, 65536]");
    if (min_instances < 1) fail("min_instances must be >= 1");
}

namespace {

int as_int(const Binding& b) {
    const double v = as_double(b.value);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(Errc::invalid_params, b.name + " must be an integer, got " + to_string(b.value));
    return static_cast<int>(v);
}

}  // namespace

GbmParams GbmParams::from_assignment(const Assignment& assignment) { return from_assignment(assignment, GbmParams{}); }

GbmParams GbmParams::from_assignment(const Assignment& assignment, GbmParams base) {
    for (const auto& b : assignment.bindings()) {
        if (b.name == "max_depth") base.max_depth = as_int(b);
        else if (b.name == "step_size") base.step_size = as_double(b.value);
        else if (b.name == "max_iteration") base.max_iteration = as_int(b);
        else if (b.name == "subsample") base.subsample = as_double(b.value);
        else if (b.name == "colsample") base.colsample = as_double(b.value);
        else if (b.name == "alpha") base.alpha = as_double(b.value);
        else if (b.name == "lambda") base.lambda = as_double(b.value);
        else if (b.name == "gamma") base.gamma = as_double(b.value);
        else if (b.name == "max_bins") base.max_bins = as_int(b);
        else if (b.name == "min_instances") base.min_instances = as_int(b);
        else throw Error(Errc::unknown_axis, "built-in GBM has no hyperparameter '" + b.name + "'");
    }
    base.validate();
    return base;
}

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

double Tree::predict(std::span<const double> row) const {
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
        const auto& n = nodes[at];
        at = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
    }
    return nodes[at].value;
}

double GbmModel::margin(std::span<const double> row) const {
    double m = 0.0;
    for (const auto& t : trees_) m += step_size_ * t.predict(row);
    return m;
}

namespace {

/// Quantized training matrix. `cuts[f]` are ascending thresholds; the bin of x
/// is the number of cuts <= x, so "bin < k" is equivalent to "x < cuts[f][k-1]".
struct BinnedMatrix {
    std::size_t rows = 0;
    std::vector<std::vector<double>> cuts;
    std::vector<std::uint16_t> bins;  // column-major

    [[nodiscard]] std::uint16_t at(std::size_t i, std::size_t f) const { return bins[f * rows + i]; }
    [[nodiscard]] std::size_t bin_count(std::size_t f) const { return cuts[f].size() + 1; }
};

BinnedMatrix quantize(const Dataset& data, int max_bins) {
    BinnedMatrix m;
    m.rows = data.rows();
    m.cuts.resize(data.cols());
    m.bins.resize(data.rows() * data.cols());
    std::vector<double> column(data.rows());
    const auto budget = static_cast<std::size_t>(max_bins);
    for (std::size_t f = 0; f < data.cols(); ++f) {
        for (std::size_t i = 0; i < data.rows(); ++i) column[i] = data.at(i, f);
        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> uniq = sorted;
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        auto& cuts = m.cuts[f];
        if (uniq.size() <= budget) {
            cuts.assign(uniq.begin() + 1, uniq.end());
        } else {
            // Quantile lower edges; repeated values collapse into one bin.
            for (std::size_t b = 1; b < budget; ++b) {
                const double v = sorted[b * sorted.size() / budget];
                if (v > sorted.front() && (cuts.empty() || v > cuts.back())) cuts.push_back(v);
            }
        }
        for (std::size_t i = 0; i < data.rows(); ++i) {
            const auto pos = std::upper_bound(cuts.begin(), cuts.end(), column[i]) - cuts.begin();
            m.bins[f * m.rows + i] = static_cast<std::uint16_t>(pos);
        }
    }
    return m;
}

double leaf_value(double g, double h, const GbmParams& p) {
    const double denom = h + p.lambda;
    if (!(denom > 0.0)) return 0.0;
    const double shrunk = std::max(std::abs(g) - p.alpha, 0.0);
    return g > 0.0 ? -shrunk / denom : shrunk / denom;
}

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    std::size_t cut = 0;  // left: bin < cut
};

class TreeBuilder {
public:
    TreeBuilder(const BinnedMatrix& x, const std::vector<double>& g, const std::vector<double>& h, const GbmParams& p,
                const std::vector<std::size_t>& features)
        : x_(x), g_(g), h_(h), p_(p), features_(features) {}

    /// Grows a tree over `rows` (which it reorders) and records each internal
    /// node's bin cut for routing the training margins afterwards.
    Tree grow(std::vector<std::size_t>& rows) {
        tree_.nodes.clear();
        cut_bins_.clear();
        build(rows, 0, rows.size(), 0);
        return tree_;
    }

    [[nodiscard]] double route(std::size_t row) const {
        std::size_t at = 0;
        while (tree_.nodes[at].feature >= 0) {
            const auto& n = tree_.nodes[at];
            at = static_cast<std::size_t>(x_.at(row, static_cast<std::size_t>(n.feature)) < cut_bins_[at] ? n.left : n.right);
        }
        return tree_.nodes[at].value;
    }

private:
    std::int32_t build(std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi, int depth) {
        const auto id = static_cast<std::int32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        cut_bins_.push_back(0);

        double G = 0.0;
        double H = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
            G += g_[rows[k]];
            H += h_[rows[k]];
        }
        const std::size_t count = hi - lo;
        const auto min_child = static_cast<std::size_t>(p_.min_instances);
        SplitChoice best;
        if (depth < p_.max_depth && count >= 2 * min_child) best = find_split(rows, lo, hi, G, H);
        if (best.feature < 0) {
            tree_.nodes[static_cast<std::size_t>(id)].value = leaf_value(G, H, p_);
            return id;
        }
        const auto f = static_cast<std::size_t>(best.feature);
        const auto mid = std::stable_partition(rows.begin() + static_cast<std::ptrdiff_t>(lo),
                                               rows.begin() + static_cast<std::ptrdiff_t>(hi),
                                               [&](std::size_t r) { return x_.at(r, f) < best.cut; }) -
                         rows.begin();
        const auto split_at = static_cast<std::size_t>(mid);
        const auto left = build(rows, lo, split_at, depth + 1);
        const auto right = build(rows, split_at, hi, depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = x_.cuts[f][best.cut - 1];
        node.left = left;
        node.right = right;
        cut_bins_[static_cast<std::size_t>(id)] = static_cast<std::uint16_t>(best.cut);
        return id;
    }

    SplitChoice find_split(const std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi, double G, double H) {
        SplitChoice best;
        const double parent = G * G / (H + p_.lambda);
        const auto min_child = static_cast<std::size_t>(p_.min_instances);
        const std::size_t count = hi - lo;
        for (const auto f : features_) {
            const std::size_t nb = x_.bin_count(f);
            if (nb < 2) continue;
            hist_g_.assign(nb, 0.0);
            hist_h_.assign(nb, 0.0);
            hist_n_.assign(nb, 0);
            const std::uint16_t* col = x_.bins.data() + f * x_.rows;
            for (std::size_t k = lo; k < hi; ++k) {
                const auto r = rows[k];
                const auto b = col[r];
                hist_g_[b] += g_[r];
                hist_h_[b] += h_[r];
                ++hist_n_[b];
            }
            double GL = 0.0;
            double HL = 0.0;
            std::size_t NL = 0;
            for (std::size_t cut = 1; cut < nb; ++cut) {
                GL += hist_g_[cut - 1];
                HL += hist_h_[cut - 1];
                NL += hist_n_[cut - 1];
                if (NL < min_child) continue;
                if (count - NL < min_child) break;
                const double dl = HL + p_.lambda;
                const double dr = (H - HL) + p_.lambda;
                if (!(dl > 0.0) || !(dr > 0.0) || !(H + p_.lambda > 0.0)) continue;
                const double GR = G - GL;
                const double gain = 0.5 * (GL * GL / dl + GR * GR / dr - parent) - p_.gamma;
                if (gain > best.gain) best = {gain, static_cast<int>(f), cut};
            }
        }
        return best;
    }

    const BinnedMatrix& x_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    const GbmParams& p_;
    const std::vector<std::size_t>& features_;
    Tree tree_;
    std::vector<std::uint16_t> cut_bins_;
    std::vector<double> hist_g_;
    std::vector<double> hist_h_;
    std::vector<std::size_t> hist_n_;
};

std::size_t fraction_count(double fraction, std::size_t n) {
    if (fraction >= 1.0) return n;
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
}

}  // namespace

GbmModel gbm_fit(const Dataset& train, const GbmParams& params, std::uint64_t seed) {
    params.validate();
    if (!train.has_both_classes()) throw Error(Errc::single_class, "GBM training labels contain a single class");
    const std::size_t n = train.rows();
    const std::size_t d = train.cols();
    const BinnedMatrix x = quantize(train, params.max_bins);
    const auto& y = train.labels();

    std::vector<double> margin(n, 0.0);
    std::vector<double> g(n);
    std::vector<double> h(n);
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(params.max_iteration));
    const std::size_t row_take = fraction_count(params.subsample, n);
    const std::size_t col_take = fraction_count(params.colsample, d);
    std::vector<std::size_t> all_features(d);
    for (std::size_t f = 0; f < d; ++f) all_features[f] = f;

    for (int round = 0; round < params.max_iteration; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            g[i] = p - static_cast<double>(y[i]);
            h[i] = p * (1.0 - p);
        }
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(round)}));
        std::vector<std::size_t> rows;
        if (row_take < n) {
            rows = rng.sample_indices(n, row_take);
            std::sort(rows.begin(), rows.end());
        } else {
            rows.resize(n);
            for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        }
        std::vector<std::size_t> features = all_features;
        if (col_take < d) {
            features = rng.sample_indices(d, col_take);
            std::sort(features.begin(), features.end());
        }
        TreeBuilder builder(x, g, h, params, features);
        Tree tree = builder.grow(rows);
        for (std::size_t i = 0; i < n; ++i) margin[i] += params.step_size * builder.route(i);
        trees.push_back(std::move(tree));
    }
    return GbmModel(std::move(trees), params.step_size, d);
}

std::vector<double> gbm_predict(const GbmModel& model, std::span<const double> features, std::size_t width) {
    if (width != model.width()) {
        throw Error(Errc::width_mismatch, "model expects " + std::to_string(model.width()) + " features, got " + std::to_string(width));
    }
    if (width == 0 || features.size() % width != 0) throw Error(Errc::width_mismatch, "feature buffer is not a whole number of rows");
    const std::size_t n = features.size() / width;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sigmoid(model.margin(features.subspan(i * width, width)));
    return out;
}

std::vector<double> gbm_predict(const GbmModel& model, const Dataset& data) {
    return gbm_predict(model, data.features(), data.cols());
}

double GbmTrainer::evaluate(const Dataset& train, const Dataset& test, const Assignment& assignment, Metric metric,
                            std::uint64_t seed) {
    const GbmParams params = GbmParams::from_assignment(assignment, base_);
    const GbmModel model = gbm_fit(train, params, seed);
    const auto probs = gbm_predict(model, test);
    return evaluate_metric(metric, probs, test.labels());
}

}  // namespace hpi
