// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks A1-A10. One PASS, FAIL or SKIP line per criterion; the
// exit status is non-zero when any criterion fails.
//
//   hpi_acceptance [--only A4] [--workdir DIR] [--fraud PATH]
//
// A10 looks for the credit-card fraud CSV at --fraud, $HPI_FRAUD_CSV, or
// data/creditcard.csv, and is skipped when none exists.

#include "cli.hpp"
#include "hpi/gbm.hpp"
#include "hpi/importance.hpp"
#include "hpi/metrics.hpp"
#include "hpi/random.hpp"
#include "hpi/report_io.hpp"
#include "hpi/synth.hpp"
#include "hpi/tuning.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

Verdict verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(double v, const char* pattern = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int hpi_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = hpi::cli::run(args, out, err);
    if (code != 0) std::cerr << "hpi " << args.front() << " exited " << code << ": " << err.str();
    return code;
}

hpi::GridArray random_array(hpi::Rng& rng, std::size_t q) {
    std::vector<std::size_t> shape(q);
    std::size_t n = 1;
    for (auto& s : shape) {
        s = 2 + rng.below(4);
        n *= s;
    }
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return hpi::GridArray(std::move(shape), std::move(v));
}

// Shared corpus for A1 and A3: 1000 arrays with 2-4 axes of 2-5 values.
const std::vector<hpi::GridArray>& corpus() {
    static const std::vector<hpi::GridArray> arrays = [] {
        hpi::Rng rng(20240601);
        std::vector<hpi::GridArray> out;
        for (int i = 0; i < 1000; ++i) out.push_back(random_array(rng, 2 + rng.below(3)));
        return out;
    }();
    return arrays;
}

Verdict a1() {
    const double tol = 1e-10;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_q;  // q -> (violations, pairs)
    std::size_t ranking_violations = 0;
    double worst = 0.0;
    for (const auto& r : corpus()) {
        const auto q = r.rank();
        std::vector<double> before(q), after(q);
        for (std::size_t a = 0; a < q; ++a) {
            before[a] = hpi::importance_before(r, a);
            after[a] = hpi::importance_after(r, a);
        }
        for (std::size_t j = 0; j < q; ++j) {
            for (std::size_t k = j + 1; k < q; ++k) {
                const double db = before[j] - before[k];
                const double da = after[j] - after[k];
                const double rd = hpi::ranking_difference(r, j, k);
                auto& slot = by_q[q];
                ++slot.second;
                const double gap = std::max(std::abs(db - da), std::abs(da - rd));
                worst = std::max(worst, gap);
                if (gap > tol) ++slot.first;
                if (std::abs(db - rd) > tol) ++ranking_violations;
            }
        }
    }
    std::string detail;
    bool ok = ranking_violations == 0;
    for (const auto& [q, counts] : by_q) {
        detail += "q=" + std::to_string(q) + ": " + std::to_string(counts.first) + "/" + std::to_string(counts.second) +
                  " pairs off; ";
        ok = ok && counts.first == 0;
    }
    detail += "before-vs-ranking_difference off: " + std::to_string(ranking_violations) + "; worst gap " + fmt(worst);
    return verdict(ok, detail);
}

Verdict a2() {
    const hpi::GridArray r({2, 2}, {1, 2, 3, 4});
    const double b0 = hpi::importance_before(r, 0), b1 = hpi::importance_before(r, 1);
    const double a0 = hpi::importance_after(r, 0), a1v = hpi::importance_after(r, 1);
    const double tol = 1e-15;
    const bool ok = std::abs(b0 - 1.0) <= tol && std::abs(b1 - 0.25) <= tol && std::abs(a0 - 1.0) <= tol &&
                    std::abs(a1v - 0.25) <= tol;
    return verdict(ok, "before (" + fmt(b0, "%.17g") + ", " + fmt(b1, "%.17g") + "), after (" + fmt(a0, "%.17g") + ", " +
                           fmt(a1v, "%.17g") + ")");
}

Verdict a3() {
    const double tol = 1e-10;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_q;  // q -> (disagreements, decisive pairs)
    for (const auto& r : corpus()) {
        const auto q = r.rank();
        for (std::size_t j = 0; j < q; ++j) {
            for (std::size_t k = j + 1; k < q; ++k) {
                const double db = hpi::importance_before(r, j) - hpi::importance_before(r, k);
                const double da = hpi::importance_after(r, j) - hpi::importance_after(r, k);
                if (std::abs(db) <= tol || std::abs(da) <= tol) continue;
                auto& slot = by_q[q];
                ++slot.second;
                if ((db > 0) != (da > 0)) ++slot.first;
            }
        }
    }
    bool ok = true;
    std::string detail;
    for (const auto& [q, counts] : by_q) {
        detail += "q=" + std::to_string(q) + ": " + std::to_string(counts.first) + "/" + std::to_string(counts.second) +
                  " orderings disagree; ";
        ok = ok && counts.first == 0;
    }
    return verdict(ok, detail);
}

// Planted surface on a 4x4x4 grid: A linear with unit slope, B a small
// quadratic, C nearly flat.
hpi::GridArray planted_surface(hpi::Rng& rng, double noise_sd) {
    const std::size_t p = 4;
    std::vector<double> v;
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            for (std::size_t c = 0; c < p; ++c) {
                const double la = -1.0 + 2.0 * a / 3.0, lb = -1.0 + 2.0 * b / 3.0, lc = -1.0 + 2.0 * c / 3.0;
                v.push_back(1.0 * la + 0.05 * lb * lb + 0.002 * lc + noise_sd * rng.normal());
            }
        }
    }
    return hpi::GridArray({p, p, p}, std::move(v));
}

Verdict a4() {
    const std::vector<std::string> planted = {"A", "B", "C"};
    std::vector<double> rates;
    for (const double n : {1e2, 1e3, 1e4}) {
        int hits = 0;
        for (std::uint64_t trial = 0; trial < 100; ++trial) {
            hpi::Rng rng(hpi::derive_seed(4, {static_cast<std::uint64_t>(n), trial}));
            const auto r = planted_surface(rng, 1.0 / std::sqrt(n));
            std::vector<double> scores;
            for (std::size_t a = 0; a < 3; ++a) scores.push_back(hpi::importance_before(r, a));
            hits += hpi::rank_by_score(planted, scores) == planted;
        }
        rates.push_back(hits / 100.0);
    }
    const bool ok = rates[0] <= rates[1] && rates[1] <= rates[2] && rates[2] == 1.0;
    return verdict(ok, "exact-match rate at n=1e2,1e3,1e4: " + fmt(rates[0]) + ", " + fmt(rates[1]) + ", " + fmt(rates[2]));
}

double population_sd(const std::vector<double>& v) { return std::sqrt(hpi::population_variance(v)); }

Verdict a5() {
    // Each replicate sees the same surface plus independent subsampling noise.
    const std::size_t sims = 200;
    std::vector<double> single, averaged;
    for (std::uint64_t s = 0; s < sims; ++s) {
        hpi::Rng rng(hpi::derive_seed(5, {s}));
        hpi::LossTensor t8(8, {"A", "B", "C"}, {4, 4, 4});
        for (std::size_t r = 0; r < 8; ++r) {
            const auto rep = planted_surface(rng, 0.2);
            for (std::size_t f = 0; f < rep.size(); ++f) t8.set(r, f, rep[f]);
        }
        hpi::LossTensor t1(1, {"A", "B", "C"}, {4, 4, 4});
        for (std::size_t f = 0; f < t1.grid_size(); ++f) t1.set(0, f, t8.get(0, f));
        single.push_back(hpi::compute_report(t1, {}).axis("C").before);
        averaged.push_back(hpi::compute_report(t8, {}).axis("C").before);
    }
    const double sd1 = population_sd(single), sd8 = population_sd(averaged);
    return verdict(sd8 < sd1, "sd of C importance over " + std::to_string(sims) + " tensors: T=1 " + fmt(sd1) + ", T=8 " +
                                  fmt(sd8));
}

struct Workspace {
    fs::path dir;
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

const char* kGrid = R"({"axes": {
  "max_depth": {"values": [1, 3, 6], "default": 6},
  "step_size": {"values": [0.05, 0.3, 1.0], "default": 0.3},
  "max_iteration": {"values": [10, 50, 100], "default": 50},
  "subsample": {"values": [0.5, 0.8, 1.0], "default": 1.0}
}})";

std::vector<std::string> estimate_args(const Workspace& ws, const std::string& data, const std::string& out,
                                       const std::string& sizes, const std::string& replicates, const std::string& workers) {
    return {"estimate", "--data",  ws.path(data), "--label",      "label",    "--grid",  ws.path("grid.json"),
            "--sizes",  sizes,     "--replicates", replicates,    "--metric", "auc",     "--seed",
            "42",       "--out",   ws.path(out),  "--workers",    workers};
}

bool prepare(const Workspace& ws) {
    static bool done = false;
    static bool ok = false;
    if (done) return ok;
    done = true;
    fs::create_directories(ws.dir);
    std::ofstream(ws.dir / "grid.json") << kGrid;
    ok = hpi_cli({"synth", "--gen", "interaction", "--n", "8000", "--d", "6", "--seed", "7", "--out", ws.path("interaction.csv")}) == 0 &&
         hpi_cli({"synth", "--gen", "additive", "--n", "8000", "--d", "6", "--seed", "7", "--out", ws.path("additive.csv")}) == 0;
    return ok;
}

bool run_interaction_estimate(const Workspace& ws) {
    static int status = -1;
    if (status < 0) {
        status = prepare(ws) && hpi_cli(estimate_args(ws, "interaction.csv", "a6_interaction", "500,1000,2000", "5", "1")) == 0;
    }
    return status == 1;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ">") + x;
    return s;
}

Verdict a6(const Workspace& ws) {
    if (!run_interaction_estimate(ws)) return {Outcome::fail, "interaction estimate failed"};
    if (hpi_cli(estimate_args(ws, "additive.csv", "a6_additive", "500,1000,2000", "5", "1")) != 0) {
        return {Outcome::fail, "additive estimate failed"};
    }
    const auto inter = hpi::load_estimation(ws.path("a6_interaction/report.json"));
    const auto add = hpi::load_estimation(ws.path("a6_additive/report.json"));
    const bool top2 = inter.consistency && inter.consistency->top_k_match && inter.consistency->k == 2;
    bool first_ok = true;
    std::string detail = "interaction:";
    for (const auto& r : inter.reports) {
        first_ok = first_ok && (r.ranking.front() == "max_depth" || r.ranking.front() == "step_size");
        detail += " " + std::to_string(r.metadata.subsample_size) + "[" + join(r.ranking) + "]";
    }
    bool additive_ok = true;
    detail += "; additive:";
    for (const auto& r : add.reports) {
        additive_ok = additive_ok && r.ranking.front() != "max_depth";
        detail += " " + std::to_string(r.metadata.subsample_size) + "[" + join(r.ranking) + "]";
    }
    detail += std::string("; top-2 match ") + (top2 ? "yes" : "no");
    return verdict(top2 && first_ok && additive_ok, detail);
}

Verdict a7(const Workspace& ws) {
    if (!run_interaction_estimate(ws)) return {Outcome::fail, "interaction estimate failed"};
    if (hpi_cli({"plan", "--report", ws.path("a6_interaction/report.json"), "--gap-ratio", "3.0", "--out", ws.path("a7_plan.json")}) != 0) {
        return {Outcome::fail, "plan failed"};
    }
    if (hpi_cli({"tune", "--both", "--plan", ws.path("a7_plan.json"), "--data", ws.path("interaction.csv"), "--label", "label",
                 "--metric", "auc", "--seed", "42", "--out", ws.path("a7_both.json")}) != 0) {
        return {Outcome::fail, "tune failed"};
    }
    const auto plan = hpi::plan_from_json(slurp(ws.path("a7_plan.json")));
    std::size_t expected_seq = plan.groups.empty() ? 1 : 0;
    for (const auto& g : plan.groups) expected_seq += plan.grid.restrict_to(g).size();
    const auto j = nlohmann::json::parse(slurp(ws.path("a7_both.json")));
    const auto seq_fits = j["sequential"]["fit_count"].get<std::size_t>();
    const auto sim_fits = j["simultaneous"]["fit_count"].get<std::size_t>();
    const double seq_auc = j["sequential"]["metric_value"].get<double>();
    const double sim_auc = j["simultaneous"]["metric_value"].get<double>();
    const double ratio = static_cast<double>(seq_fits) / static_cast<double>(sim_fits);
    const bool identity = seq_fits == expected_seq && sim_fits == plan.grid.size() && plan.grid.size() >= 81;
    const bool ok = identity && ratio <= 0.40 && std::abs(seq_auc - sim_auc) <= 0.01;
    std::string groups;
    for (const auto& g : plan.groups) {
        groups += "[";
        for (std::size_t i = 0; i < g.size(); ++i) groups += (i ? "," : "") + g[i];
        groups += "]";
    }
    return verdict(ok, "plan " + groups + "; fits " + std::to_string(seq_fits) + "/" + std::to_string(sim_fits) + " = " +
                           fmt(ratio, "%.3f") + (identity ? " (identity holds)" : " (identity broken)") + "; AUC " +
                           fmt(seq_auc, "%.4f") + " vs " + fmt(sim_auc, "%.4f"));
}

Verdict a8() {
    const auto sep = hpi::synthesize(hpi::Generator::separable_noise, 2000, 5, 11);
    const auto pair = hpi::split(sep, 0.7, 11);
    hpi::GbmTrainer trainer;
    const double sep_auc = trainer.evaluate(pair.train, pair.test, hpi::Assignment{}, hpi::Metric::auc, 1);

    const hpi::Dataset toy({"x"}, {0, 1, 2, 3}, {0, 0, 1, 1});
    hpi::GbmParams stump;
    stump.max_depth = 1;
    stump.lambda = 0.0;
    stump.max_iteration = 1;
    stump.step_size = 1.0;
    const auto model = hpi::gbm_fit(toy, stump, 0);
    const auto& nodes = model.trees().at(0).nodes;
    const bool leaves = nodes.size() == 3 && nodes[static_cast<std::size_t>(nodes[0].left)].value == -2.0 &&
                        nodes[static_cast<std::size_t>(nodes[0].right)].value == 2.0;

    const auto inter = hpi::synthesize(hpi::Generator::interaction, 1000, 6, 12);
    hpi::GbmParams p;
    p.max_depth = 4;
    bool monotone = true;
    double previous = INFINITY;
    for (int rounds = 1; rounds <= 40; ++rounds) {
        p.max_iteration = rounds;
        const double loss = hpi::log_loss(hpi::gbm_predict(hpi::gbm_fit(inter, p, 3), inter), inter.labels());
        monotone = monotone && loss <= previous;
        previous = loss;
    }
    return verdict(sep_auc > 0.95 && leaves && monotone, "separable AUC " + fmt(sep_auc, "%.4f") + "; stump leaves " +
                                                            (leaves ? "-2/+2" : "wrong") + "; log-loss monotone over 40 rounds " +
                                                            (monotone ? "yes" : "no"));
}

Verdict a9(const Workspace& ws) {
    if (!prepare(ws)) return {Outcome::fail, "synth failed"};
    const std::vector<std::pair<std::string, std::string>> runs = {{"a9_w1", "1"}, {"a9_w8", "8"}, {"a9_w1_again", "1"}};
    for (const auto& [out, workers] : runs) {
        if (hpi_cli(estimate_args(ws, "interaction.csv", out, "500,1000", "3", workers)) != 0) return {Outcome::fail, out + " failed"};
    }
    bool ok = true;
    std::string detail;
    for (const char* file : {"report.json", "ranking.csv", "plotdata.csv", "tensor_500.bin", "tensor_1000.bin"}) {
        const auto ref = slurp(ws.dir / "a9_w1" / file);
        const bool same = !ref.empty() && ref == slurp(ws.dir / "a9_w8" / file) && ref == slurp(ws.dir / "a9_w1_again" / file);
        ok = ok && same;
        if (!same) detail += std::string(file) + " differs; ";
    }
    return verdict(ok, ok ? "report, csv and tensor bytes identical for workers 1, 8 and a repeat run" : detail);
}

std::string fraud_path(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("HPI_FRAUD_CSV")) return env;
    return "data/creditcard.csv";
}

Verdict a10(const Workspace& ws, const std::string& csv) {
    if (!fs::exists(csv)) return {Outcome::skip, "fraud CSV not found at " + csv};
    fs::create_directories(ws.dir);
    std::ofstream(ws.dir / "fraud_grid.json") << R"({"axes": {
      "max_depth": {"values": [2, 4, 6], "default": 6},
      "step_size": {"values": [0.01, 0.1, 0.3], "default": 0.3},
      "max_iteration": {"values": [10, 50, 100], "default": 50},
      "subsample": {"values": [0.6, 1.0], "default": 1.0},
      "lambda": {"values": [1, 10], "default": 1}
    }})";
    const std::vector<std::string> args = {"estimate", "--data", csv, "--label", "Class", "--grid", ws.path("fraud_grid.json"),
                                           "--sizes", "2000,5000,7000", "--replicates", "10", "--metric", "auc", "--seed", "42",
                                           "--stratified", "--out", ws.path("a10")};
    if (hpi_cli(args) != 0) return {Outcome::fail, "estimate failed"};
    const auto doc = hpi::load_estimation(ws.path("a10/report.json"));
    bool ok = true;
    std::string detail;
    for (const auto& r : doc.reports) {
        const std::vector<std::string> top(r.ranking.begin(), r.ranking.begin() + std::min<std::size_t>(3, r.ranking.size()));
        const auto has = [&](const char* n) { return std::find(top.begin(), top.end(), n) != top.end(); };
        ok = ok && has("step_size") && has("max_iteration");
        detail += std::to_string(r.metadata.subsample_size) + "[" + join(r.ranking) + "] ";
    }
    return verdict(ok, detail);
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_seconds;  ///< 0 means no runtime bound
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::string only, fraud;
    fs::path workdir = fs::temp_directory_path() / "hpi_acceptance";
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--only") only = argv[i + 1];
        else if (flag == "--workdir") workdir = argv[i + 1];
        else if (flag == "--fraud") fraud = argv[i + 1];
    }
    fs::remove_all(workdir);
    const Workspace ws{workdir};

    const std::vector<Criterion> criteria = {
        {"A1", "variance-form identity on 1000 random arrays", 10, a1},
        {"A2", "hand oracle R=[[1,2],[3,4]] gives (1.0, 0.25)", 0, a2},
        {"A3", "before/after orderings agree on the A1 corpus", 0, a3},
        {"A4", "planted-order simulation, exact-match rate", 30, a4},
        {"A5", "T=8 aggregation lowers dispersion vs T=1", 30, a5},
        {"A6", "end-to-end consistency on synthetic data", 600, [&] { return a6(ws); }},
        {"A7", "sequential vs simultaneous tuning", 900, [&] { return a7(ws); }},
        {"A8", "GBM sanity", 0, a8},
        {"A9", "determinism across runs and worker counts", 0, [&] { return a9(ws); }},
        {"A10", "fraud data top-3 contains step_size and max_iteration", 0, [&] { return a10(ws, fraud_path(fraud)); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && only != c.id) continue;
        const auto start = Clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const double took = std::chrono::duration<double>(Clock::now() - start).count();
        if (v.outcome == Outcome::pass && c.budget_seconds > 0 && took >= c.budget_seconds) {
            v = {Outcome::fail, v.detail + "; over the " + fmt(c.budget_seconds) + " s budget"};
        }
        const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
        failures += v.outcome == Outcome::fail;
        std::cout << tag << " " << c.id << " " << c.title << " [" << fmt(took, "%.2f") << " s]: " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
