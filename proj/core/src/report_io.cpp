// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/report_io.hpp"

#include "hpi/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hpi {

using detail::ordered_json;

namespace {

ordered_json report_json(const ImportanceReport& r) {
    ordered_json axes = ordered_json::array();
    for (const auto& a : r.axes) {
        axes.push_back({{"name", a.name}, {"before", a.before}, {"after", a.after}, {"dispersion", a.dispersion}});
    }
    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back({{"axes", {p.axes.first, p.axes.second}},
                         {"before", p.before},
                         {"after", p.after},
                         {"dispersion", p.dispersion}});
    }
    return {{"metadata",
             {{"subsample_size", r.metadata.subsample_size},
              {"replicates", r.metadata.replicates},
              {"metric", std::string(metric_name(r.metadata.metric))},
              {"master_seed", r.metadata.master_seed},
              {"form", std::string(form_name(r.form))},
              {"aggregation", std::string(aggregation_name(r.metadata.aggregation))},
              {"imputed_cells", r.metadata.imputed_cells}}},
            {"axes", axes},
            {"pairs", pairs},
            {"ranking", r.ranking}};
}

ImportanceReport parse_report(const ordered_json& j) {
    using detail::require;
    constexpr auto bad = Errc::malformed_report;
    if (!j.is_object()) throw Error(bad, "report must be an object");
    ImportanceReport r;
    try {
        const auto& m = j.at("metadata");
        r.metadata.subsample_size = require<std::uint64_t>(m, "subsample_size", bad);
        r.metadata.replicates = require<std::uint64_t>(m, "replicates", bad);
        r.metadata.metric = parse_metric(require<std::string>(m, "metric", bad));
        r.metadata.master_seed = require<std::uint64_t>(m, "master_seed", bad);
        r.form = parse_form(require<std::string>(m, "form", bad));
        r.metadata.aggregation = parse_aggregation(require<std::string>(m, "aggregation", bad));
        r.metadata.imputed_cells = m.value("imputed_cells", std::uint64_t{0});
        for (const auto& a : j.at("axes")) {
            r.axes.push_back({require<std::string>(a, "name", bad), require<double>(a, "before", bad),
                              require<double>(a, "after", bad), a.value("dispersion", 0.0)});
        }
        if (j.contains("pairs")) {
            for (const auto& p : j.at("pairs")) {
                const auto names = require<std::vector<std::string>>(p, "axes", bad);
                if (names.size() != 2) throw Error(bad, "pair entry needs two axis names");
                r.pairs.push_back({{names[0], names[1]}, require<double>(p, "before", bad), require<double>(p, "after", bad),
                                   p.value("dispersion", 0.0)});
            }
        }
        r.ranking = require<std::vector<std::string>>(j, "ranking", bad);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(bad, ex.what());
    } catch (const Error& ex) {
        if (ex.code() == bad) throw;
        throw Error(bad, ex.what());
    }
    auto names = r.axis_names();
    auto ranked = r.ranking;
    std::sort(names.begin(), names.end());
    std::sort(ranked.begin(), ranked.end());
    if (names != ranked || std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw Error(bad, "ranking does not list each axis exactly once");
    }
    return r;
}

ordered_json verdict_json(const ConsistencyVerdict& v) {
    ordered_json kendall = ordered_json::array();
    for (const auto& c : v.kendall) kendall.push_back({{"sizes", {c.size_a, c.size_b}}, {"tau", c.tau}});
    return {{"sizes", v.sizes},
            {"rankings", v.rankings},
            {"exact_match", v.exact_match},
            {"kendall_tau", kendall},
            {"k", v.k},
            {"top_k_match", v.top_k_match}};
}

ConsistencyVerdict parse_verdict(const ordered_json& j) {
    ConsistencyVerdict v;
    try {
        v.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
        v.rankings = j.at("rankings").get<std::vector<std::vector<std::string>>>();
        v.exact_match = j.at("exact_match").get<bool>();
        for (const auto& c : j.at("kendall_tau")) {
            const auto sizes = c.at("sizes").get<std::vector<std::uint64_t>>();
            if (sizes.size() != 2) throw Error(Errc::malformed_report, "kendall entry needs two sizes");
            v.kendall.push_back({sizes[0], sizes[1], c.at("tau").get<double>()});
        }
        v.k = j.at("k").get<std::size_t>();
        v.top_k_match = j.at("top_k_match").get<bool>();
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Errc::malformed_report, std::string("consistency block: ") + ex.what());
    }
    return v;
}

ordered_json parse_json(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw Error(Errc::malformed_report, ex.what());
    }
}

std::string number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string report_to_json(const ImportanceReport& report) { return report_json(report).dump(2) + "\n"; }

ImportanceReport report_from_json(const std::string& text) { return parse_report(parse_json(text)); }

std::string verdict_to_json(const ConsistencyVerdict& verdict) { return verdict_json(verdict).dump(2) + "\n"; }

std::string estimation_to_json(const EstimationDocument& doc) {
    ordered_json reports = ordered_json::array();
    for (const auto& r : doc.reports) reports.push_back(report_json(r));
    ordered_json out = {{"reports", reports}};
    if (doc.consistency) out["consistency"] = verdict_json(*doc.consistency);
    if (doc.grid) out["grid"] = ordered_json::parse(serialize_grid(*doc.grid));
    return out.dump(2) + "\n";
}

EstimationDocument estimation_from_json(const std::string& text) {
    const auto j = parse_json(text);
    EstimationDocument doc;
    if (j.is_object() && j.contains("reports")) {
        if (!j["reports"].is_array() || j["reports"].empty()) throw Error(Errc::malformed_report, "'reports' must be a non-empty list");
        for (const auto& r : j["reports"]) doc.reports.push_back(parse_report(r));
        if (j.contains("consistency")) doc.consistency = parse_verdict(j["consistency"]);
        if (j.contains("grid")) doc.grid = parse_grid_config(j["grid"].dump());
    } else {
        doc.reports.push_back(parse_report(j));
    }
    return doc;
}

EstimationDocument load_estimation(const std::string& path) { return estimation_from_json(read_text_file(path)); }

std::string ranking_csv(const std::vector<ImportanceReport>& reports) {
    std::string out = "subsample_size,axis,before,after,rank\n";
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.ranking.size(); ++i) {
            const auto& a = r.axis(r.ranking[i]);
            out += std::to_string(r.metadata.subsample_size) + "," + a.name + "," + number(a.before) + "," + number(a.after) +
                   "," + std::to_string(i + 1) + "\n";
        }
    }
    return out;
}

std::string plot_data_csv(const std::vector<ImportanceReport>& reports, double scale) {
    std::string out = "subsample_size,axis,score\n";
    for (const auto& r : reports) {
        const auto size = std::to_string(r.metadata.subsample_size);
        for (const auto& a : r.axes) out += size + "," + a.name + "," + number(a.score(r.form) * scale) + "\n";
        for (const auto& p : r.pairs) {
            out += size + "," + p.axes.first + "&" + p.axes.second + "," + number(p.score(r.form) * scale) + "\n";
        }
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::missing_file, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(Errc::io_error, "short write to '" + path + "'");
}

}  // namespace hpi
