// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hpi/error.hpp"
#include "hpi/importance.hpp"
#include "hpi/random.hpp"
#include "oracle.hpp"

#include <cmath>

namespace hpi {
namespace {

GridArray random_array(Rng& rng, std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return GridArray(std::move(shape), std::move(v));
}

std::vector<std::size_t> random_shape(Rng& rng, std::size_t q) {
    std::vector<std::size_t> shape(q);
    for (auto& s : shape) s = 2 + rng.below(4);
    return shape;
}

const GridArray kHand({2, 2}, {1, 2, 3, 4});

TEST(Importance, HandOracle) {
    EXPECT_EQ(importance_before(kHand, 0), 1.0);
    EXPECT_EQ(importance_before(kHand, 1), 0.25);
    EXPECT_EQ(importance_after(kHand, 0), 1.0);
    EXPECT_EQ(importance_after(kHand, 1), 0.25);
    // (1.5^2 + 3.5^2)/2 - (2^2 + 3^2)/2 = 7.25 - 6.5
    EXPECT_EQ(ranking_difference(kHand, 0, 1), 0.75);
    EXPECT_EQ(ranking_difference(kHand, 1, 0), -0.75);
}

TEST(Importance, ConstantArrayIsZero) {
    const GridArray c({3, 2, 2}, std::vector<double>(12, 0.7));
    for (std::size_t a = 0; a < 3; ++a) {
        EXPECT_EQ(importance_before(c, a), 0.0);
        EXPECT_EQ(importance_after(c, a), 0.0);
        for (std::size_t b = 0; b < 3; ++b) {
            if (a != b) {
                EXPECT_NEAR(ranking_difference(c, a, b), 0.0, 1e-15);
                EXPECT_EQ(joint_importance(c, a, b, ImportanceForm::before), 0.0);
            }
        }
    }
}

TEST(Importance, VaryingAlongOneAxisOnly) {
    std::vector<double> v;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k < 2; ++k) v.push_back(static_cast<double>(j * j));
    const GridArray r({3, 4, 2}, v);
    EXPECT_EQ(importance_before(r, 0), 0.0);
    EXPECT_EQ(importance_before(r, 2), 0.0);
    EXPECT_EQ(importance_after(r, 0), 0.0);
    EXPECT_GT(importance_before(r, 1), 0.0);
}

TEST(Importance, SingleAxisFormsCoincide) {
    Rng rng(1);
    const auto r = random_array(rng, {5});
    EXPECT_EQ(importance_before(r, 0), importance_after(r, 0));
}

TEST(Importance, MatchesBruteForceOracle) {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto shape = random_shape(rng, 1 + rng.below(4));
        const auto r = random_array(rng, shape);
        for (std::size_t a = 0; a < shape.size(); ++a) {
            EXPECT_NEAR(importance_before(r, a), oracle::before(r.values(), shape, {a}), 1e-12);
            EXPECT_NEAR(importance_after(r, a), oracle::after(r.values(), shape, {a}), 1e-12);
        }
    }
}

TEST(Importance, RankingDifferenceEqualsBeforeDifference) {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto shape = random_shape(rng, 2 + rng.below(3));
        const auto r = random_array(rng, shape);
        for (std::size_t j = 0; j < shape.size(); ++j) {
            for (std::size_t k = 0; k < shape.size(); ++k) {
                if (j == k) continue;
                const double d = ranking_difference(r, j, k);
                EXPECT_NEAR(d, importance_before(r, j) - importance_before(r, k), 1e-10);
                EXPECT_NEAR(d, oracle::mean_square_marginal(r.values(), shape, j) -
                                   oracle::mean_square_marginal(r.values(), shape, k),
                            1e-10);
            }
        }
    }
}

TEST(Importance, TwoAxisFormsDifferByCommonTerm) {
    Rng rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const auto r = random_array(rng, random_shape(rng, 2));
        const double before_gap = importance_before(r, 0) - importance_before(r, 1);
        const double after_gap = importance_after(r, 0) - importance_after(r, 1);
        EXPECT_NEAR(before_gap, after_gap, 1e-10);
    }
}

// With three axes the after form picks up interaction variance that is not
// shared by every axis. R = b * c over {0,1}^3: before = (0, 1/16, 1/16),
// after = (0, 1/8, 1/8).
TEST(Importance, ThreeAxisAfterFormCarriesInteractions) {
    std::vector<double> v;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) v.push_back(static_cast<double>(b * c) + 0.0 * a);
    const GridArray r({2, 2, 2}, v);
    EXPECT_DOUBLE_EQ(importance_before(r, 1), 1.0 / 16);
    EXPECT_DOUBLE_EQ(importance_after(r, 1), 1.0 / 8);
    EXPECT_DOUBLE_EQ(importance_after(r, 0), 0.0);
    EXPECT_NE(importance_before(r, 1) - importance_before(r, 0), importance_after(r, 1) - importance_after(r, 0));
}

TEST(Importance, JointMatchesFlattenedMarginalOracle) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = random_array(rng, {2, 3, 2});
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t k = j + 1; k < 3; ++k) {
                EXPECT_NEAR(joint_importance(r, j, k, ImportanceForm::before), oracle::before(r.values(), r.shape(), {j, k}),
                            1e-12);
                EXPECT_NEAR(joint_importance(r, j, k, ImportanceForm::after), oracle::after(r.values(), r.shape(), {j, k}),
                            1e-12);
            }
        }
    }
    EXPECT_THROW(joint_importance(kHand, 0, 0, ImportanceForm::before), Error);
    EXPECT_THROW(importance_before(kHand, 2), Error);
}

LossTensor tensor_of(const std::vector<GridArray>& reps, std::vector<std::string> names) {
    LossTensor t(reps.size(), std::move(names), reps.front().shape());
    for (std::size_t r = 0; r < reps.size(); ++r) {
        for (std::size_t f = 0; f < reps[r].size(); ++f) t.set(r, f, reps[r][f]);
    }
    return t;
}

TEST(Report, IdenticalReplicatesHaveZeroDispersion) {
    const auto t = tensor_of({kHand, kHand, kHand}, {"a", "b"});
    const auto rep = compute_report(t, {});
    EXPECT_EQ(rep.axis("a").before, 1.0);
    EXPECT_EQ(rep.axis("b").after, 0.25);
    EXPECT_EQ(rep.axis("a").dispersion, 0.0);
    EXPECT_EQ(rep.ranking, (std::vector<std::string>{"a", "b"}));
}

TEST(Report, SingleReplicateAggregationsCoincide) {
    Rng rng(6);
    const auto t = tensor_of({random_array(rng, {3, 2})}, {"a", "b"});
    EXPECT_EQ(compute_report(t, {}, ImportanceForm::before, Aggregation::mean_then_variance).axes,
              compute_report(t, {}, ImportanceForm::before, Aggregation::variance_then_mean).axes);
}

TEST(Report, MeanThenVarianceIsImportanceOfReplicateMean) {
    Rng rng(7);
    std::vector<GridArray> reps;
    for (int i = 0; i < 4; ++i) reps.push_back(random_array(rng, {3, 2}));
    const auto t = tensor_of(reps, {"a", "b"});
    std::vector<double> avg(6);
    for (std::size_t f = 0; f < 6; ++f) {
        for (const auto& r : reps) avg[f] += r[f] / 4.0;
    }
    const auto rep = compute_report(t, {});
    EXPECT_NEAR(rep.axis("a").before, oracle::before(avg, {3, 2}, {0}), 1e-12);
    EXPECT_NEAR(rep.axis("b").before, oracle::before(avg, {3, 2}, {1}), 1e-12);

    const auto vtm = compute_report(t, {}, ImportanceForm::before, Aggregation::variance_then_mean);
    double expected = 0;
    for (const auto& r : reps) expected += oracle::before(r.values(), {3, 2}, {0}) / 4.0;
    EXPECT_NEAR(vtm.axis("a").before, expected, 1e-12);
}

TEST(Report, PairsAndTiesKeepDeclarationOrder) {
    const GridArray flat({2, 2, 2}, std::vector<double>(8, 1.0));
    const auto t = tensor_of({flat}, {"x", "y", "z"});
    const auto rep = compute_report(t, {{"x", "z"}});
    EXPECT_EQ(rep.ranking, (std::vector<std::string>{"x", "y", "z"}));
    ASSERT_EQ(rep.pairs.size(), 1u);
    EXPECT_EQ(rep.pairs[0].axes, (AxisPair{"x", "z"}));
    EXPECT_THROW(compute_report(t, {{"x", "w"}}), Error);
}

TEST(Kendall, Examples) {
    const std::vector<std::string> abc = {"a", "b", "c"};
    EXPECT_EQ(kendall_tau(abc, abc), 1.0);
    EXPECT_DOUBLE_EQ(kendall_tau(abc, {"a", "c", "b"}), 1.0 / 3.0);
    EXPECT_EQ(kendall_tau(abc, {"c", "b", "a"}), -1.0);
    EXPECT_THROW(kendall_tau(abc, {"a", "b", "d"}), Error);
}

ImportanceReport ranked(std::vector<std::string> order, std::uint64_t size) {
    ImportanceReport r;
    const double n = static_cast<double>(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) r.axes.push_back({order[i], n - static_cast<double>(i), 0, 0});
    r.ranking = order;
    r.metadata.subsample_size = size;
    return r;
}

TEST(Consistency, Verdicts) {
    const auto same = consistency_check({ranked({"a", "b", "c"}, 100), ranked({"a", "b", "c"}, 200)}, 2);
    EXPECT_TRUE(same.exact_match);
    EXPECT_TRUE(same.top_k_match);
    ASSERT_EQ(same.kendall.size(), 1u);
    EXPECT_EQ(same.kendall[0].tau, 1.0);

    const auto swapped = consistency_check(
        {ranked({"a", "b", "c"}, 100), ranked({"a", "c", "b"}, 200), ranked({"a", "b", "c"}, 400)}, 1);
    EXPECT_FALSE(swapped.exact_match);
    EXPECT_TRUE(swapped.top_k_match);
    EXPECT_EQ(swapped.kendall.size(), 3u);
    EXPECT_DOUBLE_EQ(swapped.kendall[0].tau, 1.0 / 3.0);
    EXPECT_FALSE(consistency_check({ranked({"a", "b", "c"}, 100), ranked({"a", "c", "b"}, 200)}, 2).top_k_match);
    // order inside the top k counts
    EXPECT_FALSE(consistency_check({ranked({"a", "b", "c"}, 1), ranked({"b", "a", "c"}, 2)}, 2).top_k_match);
}

TEST(Consistency, Mismatches) {
    try {
        consistency_check({ranked({"a", "b"}, 1), ranked({"a", "c"}, 2)}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::axis_mismatch);
    }
    auto other_metric = ranked({"a", "b"}, 2);
    other_metric.metadata.metric = Metric::log_loss;
    EXPECT_THROW(consistency_check({ranked({"a", "b"}, 1), other_metric}, 1), Error);
    EXPECT_THROW(consistency_check({ranked({"a", "b"}, 1)}, 1), Error);
}

}  // namespace
}  // namespace hpi
