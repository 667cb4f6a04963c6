// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hpi/error.hpp"
#include "hpi/random.hpp"
#include "hpi/report_io.hpp"

#include <json.hpp>

namespace hpi {
namespace {

ImportanceReport sample_report(std::uint64_t size, std::uint64_t seed) {
    LossTensor t(3, {"depth", "eta", "rounds"}, {3, 2, 2});
    Rng rng(seed);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t f = 0; f < t.grid_size(); ++f) t.set(r, f, rng.uniform() * (1 + f % 3));
    }
    ReportMetadata meta;
    meta.subsample_size = size;
    meta.replicates = 3;
    meta.master_seed = seed;
    meta.metric = Metric::log_loss;
    return compute_report(t, {{"eta", "rounds"}}, ImportanceForm::after, Aggregation::mean_then_variance, meta);
}

TEST(ReportIo, ReportRoundTripsExactly) {
    const auto r = sample_report(100, 1);
    EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(ReportIo, EstimationDocumentRoundTrip) {
    EstimationDocument doc;
    doc.reports = {sample_report(100, 1), sample_report(200, 2)};
    doc.consistency = consistency_check(doc.reports, 2);
    doc.grid = parse_grid_config(R"({"axes": {"depth": {"values": [1, 2, 3]}, "eta": {"values": [0.1, 0.3]},
                                   "rounds": {"values": [10, 20]}}, "joint": [["eta", "rounds"]]})");
    const auto text = estimation_to_json(doc);
    EXPECT_EQ(estimation_from_json(text), doc);
    EXPECT_EQ(estimation_to_json(estimation_from_json(text)), text);

    const auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j["reports"][0]["metadata"]["form"], "after");
    EXPECT_EQ(j["reports"][0]["metadata"]["metric"], "logloss");
    EXPECT_EQ(j["reports"][0]["pairs"][0]["axes"], (nlohmann::json{"eta", "rounds"}));
    EXPECT_TRUE(j["consistency"].contains("kendall_tau"));
}

TEST(ReportIo, BareReportAccepted) {
    const auto r = sample_report(50, 3);
    const auto doc = estimation_from_json(report_to_json(r));
    ASSERT_EQ(doc.reports.size(), 1u);
    EXPECT_EQ(doc.reports[0], r);
}

TEST(ReportIo, MalformedReports) {
    for (const char* text : {"[1, 2]", "{\"reports\": []}", "{\"axes\": 3}", "nope"}) {
        try {
            estimation_from_json(text);
            ADD_FAILURE() << text;
        } catch (const Error& e) {
            EXPECT_EQ(exit_category(e.code()), ErrorCategory::config) << text;
        }
    }
}

TEST(ReportIo, RankingAndPlotCsv) {
    const auto r = sample_report(100, 1);
    const auto csv = ranking_csv({r});
    EXPECT_EQ(csv.rfind("subsample_size,axis,before,after,rank\n100,", 0), 0u);
    EXPECT_NE(csv.find("," + r.ranking.front() + ","), std::string::npos);

    const auto plot = plot_data_csv({r}, 1.0);
    EXPECT_EQ(plot.rfind("subsample_size,axis,score\n", 0), 0u);
    EXPECT_NE(plot.find("100,eta&rounds,"), std::string::npos);
    std::size_t lines = 0;
    for (char c : plot) lines += c == '\n';
    EXPECT_EQ(lines, 1u + 3u + 1u);
}

}  // namespace
}  // namespace hpi
