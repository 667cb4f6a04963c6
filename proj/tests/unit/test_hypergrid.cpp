// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hpi/error.hpp"
#include "hpi/hypergrid.hpp"
#include "hpi/random.hpp"

namespace hpi {
namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::io_error;
}

TEST(HyperGrid, ParsesShapeAndDefaults) {
    const auto g = parse_grid(R"({"axes": {
        "max_depth": {"values": [2, 4, 6], "default": 4},
        "step_size": {"values": [0.05, 0.1], "default": 0.1}}})");
    EXPECT_EQ(g.sizes(), (std::vector<std::size_t>{3, 2}));
    EXPECT_EQ(g.size(), 6u);
    const auto d = g.defaults();
    EXPECT_EQ(std::get<std::int64_t>(d.at("max_depth")), 4);
    EXPECT_DOUBLE_EQ(std::get<double>(d.at("step_size")), 0.1);
}

TEST(HyperGrid, SingletonAndMissingDefault) {
    const auto g = parse_grid(R"({"axes": {"a": {"values": [1]}}})");
    EXPECT_EQ(g.size(), 1u);
    EXPECT_EQ(g.axis(0).default_index, 0u);
}

TEST(HyperGrid, RejectsInvalidGrids) {
    EXPECT_EQ(code_of([] { parse_grid(R"({"axes": {"a": {"values": [1, 1]}}})"); }), Errc::duplicate_value);
    EXPECT_EQ(code_of([] { parse_grid(R"({"axes": {"a": {"values": []}}})"); }), Errc::empty_axis);
    EXPECT_EQ(code_of([] { parse_grid(R"({"axes": {"a": {"values": [1, 2], "default": 3}}})"); }),
              Errc::default_not_in_values);
    EXPECT_EQ(code_of([] { parse_grid(R"({"axes": {"a": {"values": [1, "x"]}}})"); }), Errc::mixed_axis_types);
    EXPECT_EQ(code_of([] { parse_grid(R"({"axes": {"a": {"values": [1]}, "a": {"values": [2]}}})"); }),
              Errc::duplicate_axis);
    EXPECT_EQ(code_of([] { parse_grid(R"({"axes": {"a": {"values": [1], "step": 2}}})"); }), Errc::malformed_grid);
    EXPECT_EQ(code_of([] { parse_grid("{not json"); }), Errc::malformed_grid);
    EXPECT_EQ(code_of([] { parse_grid_config(R"({"axes": {"a": {"values": [1]}}, "joint": [["a", "b"]]})"); }),
              Errc::unknown_axis);
}

TEST(HyperGrid, IntegersOnRealAxisArePromoted) {
    const auto g = parse_grid(R"({"axes": {"subsample": {"values": [0.5, 1], "default": 1}}})");
    EXPECT_EQ(type_of(g.axis(0).values[1]), ValueType::real);
    EXPECT_EQ(g.axis(0).default_index, 1u);
    // 1 and 1.0 collide once promoted
    EXPECT_EQ(code_of([] { parse_grid(R"({"axes": {"a": {"values": [1, 1.0]}}})"); }), Errc::duplicate_value);
}

TEST(HyperGrid, EnumerationIsRowMajor) {
    const auto g = parse_grid(R"({"axes": {"a": {"values": [1, 2]}, "b": {"values": ["x", "y"]}}})");
    const auto pts = enumerate_points(g);
    ASSERT_EQ(pts.size(), 4u);
    const std::vector<std::pair<std::int64_t, std::string>> expected = {{1, "x"}, {1, "y"}, {2, "x"}, {2, "y"}};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(std::get<std::int64_t>(pts[i].at("a")), expected[i].first);
        EXPECT_EQ(std::get<std::string>(pts[i].at("b")), expected[i].second);
        EXPECT_EQ(flat_index(g, pts[i]), i);
    }
}

TEST(HyperGrid, FlatIndexByHand) {
    const auto g = parse_grid(R"({"axes": {"a": {"values": [1, 2, 3]}, "b": {"values": [0, 1]}}})");
    EXPECT_EQ(enumerate_points(g).size(), 6u);
    // i_a * p_b + i_b = 1 * 2 + 1
    const Assignment p({{"a", Value{std::int64_t{2}}}, {"b", Value{std::int64_t{1}}}});
    EXPECT_EQ(flat_index(g, p), 3u);
}

TEST(HyperGrid, FlatIndexErrors) {
    const auto g = parse_grid(R"({"axes": {"a": {"values": [1, 2]}}})");
    EXPECT_EQ(code_of([&] { (void)flat_index(g, Assignment({{"a", Value{std::int64_t{5}}}})); }), Errc::unknown_value);
    EXPECT_EQ(code_of([&] { (void)flat_index(g, Assignment({{"z", Value{std::int64_t{1}}}})); }), Errc::unknown_axis);
}

TEST(HyperGrid, RoundTripOnRandomGrids) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Axis> axes;
        for (int j = 0; j < 3; ++j) {
            Axis a{"ax" + std::to_string(j), {}, 0};
            const auto n = 1 + rng.below(4);
            for (std::uint64_t v = 0; v < n; ++v) a.values.push_back(Value{static_cast<std::int64_t>(v * 10)});
            axes.push_back(std::move(a));
        }
        const HyperGrid g(std::move(axes));
        const auto pts = enumerate_points(g);
        ASSERT_EQ(pts.size(), g.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            EXPECT_EQ(flat_index(g, pts[i]), i);
            EXPECT_EQ(g.flat_from_coordinates(g.coordinates(i)), i);
        }
    }
}

TEST(HyperGrid, SerializeRoundTrip) {
    const auto cfg = parse_grid_config(R"({"axes": {
        "max_depth": {"values": [2, 4], "default": 4},
        "booster": {"values": ["gbtree", "dart"]},
        "step_size": {"values": [0.1, 0.30000000000000004]}},
        "joint": [["max_depth", "step_size"]]})");
    const auto again = parse_grid_config(serialize_grid(cfg));
    EXPECT_EQ(again, cfg);
}

TEST(HyperGrid, RestrictKeepsGridOrder) {
    const auto g = parse_grid(R"({"axes": {"a": {"values": [1, 2]}, "b": {"values": [1]}, "c": {"values": [3, 4, 5]}}})");
    const auto sub = g.restrict_to({"c", "a"});
    EXPECT_EQ(sub.names(), (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(sub.size(), 6u);
}

}  // namespace
}  // namespace hpi
