// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include "hpi/data.hpp"
#include "hpi/error.hpp"
#include "hpi/external_trainer.hpp"
#include "hpi/gbm.hpp"
#include "hpi/pipeline.hpp"
#include "hpi/report_io.hpp"
#include "hpi/synth.hpp"
#include "hpi/tuning.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hpi::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t default_workers() {
    if (const char* env = std::getenv("HPI_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    return 1;
}

std::string fixed(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

struct TrainerFlags {
    std::string kind = "builtin";
    std::string command;
    double timeout_seconds = 600.0;
};

void add_trainer_flags(CLI::App& cmd, TrainerFlags& flags) {
    cmd.add_option("--trainer", flags.kind, "builtin or external")->check(CLI::IsMember({"builtin", "external"}));
    cmd.add_option("--trainer-cmd", flags.command, "Command line of an external trainer");
    cmd.add_option("--timeout", flags.timeout_seconds, "Seconds to wait for one external evaluation")
        ->check(CLI::PositiveNumber);
}

TrainerFactory make_factory(const TrainerFlags& flags) {
    if (flags.kind == "builtin") return [] { return std::make_unique<GbmTrainer>(); };
    if (flags.command.empty()) throw UsageError("--trainer external requires --trainer-cmd");
    const auto timeout = std::chrono::milliseconds(static_cast<std::int64_t>(flags.timeout_seconds * 1000.0));
    const std::string command = flags.command;
    return [command, timeout] { return std::make_unique<ExternalTrainer>(command, timeout); };
}

struct DataFlags {
    std::string data;
    std::string label;
    std::string metric = "auc";
    std::uint64_t seed = 0;
    double train_fraction = 0.7;
    std::size_t workers = default_workers();
};

void add_data_flags(CLI::App& cmd, DataFlags& flags) {
    cmd.add_option("--data", flags.data, "CSV dataset")->required();
    cmd.add_option("--label", flags.label, "Label column (0/1)")->required();
    cmd.add_option("--metric", flags.metric, "auc, logloss or accuracy")
        ->check(CLI::IsMember({"auc", "logloss", "log_loss", "accuracy"}));
    cmd.add_option("--seed", flags.seed, "Master seed");
    cmd.add_option("--train-fraction", flags.train_fraction, "Fraction of rows in the training split")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--workers", flags.workers, "Parallel evaluations (default $HPI_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
}

void print_ranking(const ImportanceReport& r, std::ostream& out) {
    out << "size " << r.metadata.subsample_size << " (" << metric_name(r.metadata.metric) << ", T=" << r.metadata.replicates
        << ", " << form_name(r.form) << ")\n";
    for (std::size_t i = 0; i < r.ranking.size(); ++i) {
        const auto& a = r.axis(r.ranking[i]);
        out << "  " << std::setw(2) << (i + 1) << "  " << std::left << std::setw(20) << a.name << std::right
            << " before " << std::setw(12) << fixed(a.before) << "  after " << std::setw(12) << fixed(a.after)
            << "  sd " << fixed(a.dispersion, 3) << "\n";
    }
    for (const auto& p : r.pairs) {
        out << "      " << p.axes.first << " & " << p.axes.second << "  " << fixed(p.score(r.form)) << "\n";
    }
    if (r.metadata.imputed_cells > 0) out << "  imputed cells: " << r.metadata.imputed_cells << "\n";
}

void print_verdict(const ConsistencyVerdict& v, std::ostream& out) {
    out << "consistency: exact_match=" << (v.exact_match ? "yes" : "no") << " top" << v.k
        << "_match=" << (v.top_k_match ? "yes" : "no");
    for (const auto& t : v.kendall) out << " tau(" << t.size_a << "," << t.size_b << ")=" << fixed(t.tau, 4);
    out << "\n";
}

void print_outcome(const TuningOutcome& o, std::ostream& out) {
    out << o.method << ": " << metric_name(o.metric) << " " << fixed(o.metric_value) << ", fits " << o.fit_count
        << ", " << fixed(o.wall_seconds, 3) << " s\n  ";
    for (const auto& b : o.selected.bindings()) out << b.name << "=" << to_string(b.value) << " ";
    out << "\n";
}

// estimate -------------------------------------------------------------------

struct EstimateFlags {
    DataFlags data;
    TrainerFlags trainer;
    std::string grid;
    std::vector<double> sizes;
    std::size_t replicates = 1;
    std::string out = "out";
    bool skip_failures = false;
    bool stratified = false;
    std::size_t test_size = 0;
    std::string form = "before";
    std::string aggregation = "mean-then-variance";
    std::size_t top_k = 2;
    bool resume = false;
};

int cmd_estimate(const EstimateFlags& f, std::ostream& out) {
    const auto grid = load_grid_config(f.grid);
    const auto data = load_dataset(f.data.data, f.data.label);
    const auto pair = split(data, f.data.train_fraction, split_seed(f.data.seed));

    EstimationConfig config;
    config.grid = grid.grid;
    config.joint = grid.joint;
    config.subsample_sizes = resolve_sizes(f.sizes, pair.train.rows());
    config.replicates = f.replicates;
    config.train_fraction = f.data.train_fraction;
    config.metric = parse_metric(f.data.metric);
    config.master_seed = f.data.seed;
    config.workers = f.data.workers;
    config.failure_policy = f.skip_failures ? FailurePolicy::skip : FailurePolicy::abort;
    config.sampling = f.stratified ? Sampling::stratified : Sampling::uniform;
    if (f.test_size > 0) config.test_subsample_size = f.test_size;
    config.form = parse_form(f.form);
    config.aggregation = parse_aggregation(f.aggregation);
    config.top_k = f.top_k;
    config.checkpoint.directory = f.out;
    config.checkpoint.resume = f.resume;
    validate_config(config, pair.train.rows());

    fs::create_directories(f.out);
    const auto result = run_estimation(pair, config, make_factory(f.trainer));
    auto doc = result.document();
    doc.grid = grid;

    const fs::path dir(f.out);
    write_text_file((dir / "report.json").string(), estimation_to_json(doc));
    write_text_file((dir / "ranking.csv").string(), ranking_csv(doc.reports));
    write_text_file((dir / "plotdata.csv").string(), plot_data_csv(doc.reports));
    write_text_file((dir / "timing.csv").string(), timing_csv(timing_profile(result)));

    for (const auto& r : doc.reports) print_ranking(r, out);
    if (doc.consistency) print_verdict(*doc.consistency, out);
    std::size_t resumed = 0;
    for (const auto& s : result.sizes) resumed += s.resumed_cells;
    out << "fits " << result.fit_count();
    if (resumed > 0) out << " (resumed " << resumed << " cells)";
    out << ", wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

// plan -----------------------------------------------------------------------

struct PlanFlags {
    std::string report;
    std::string grid;
    double gap_ratio = 3.0;
    std::string groups;
    std::size_t top = 0;
    std::size_t size = 0;
    std::string out = "plan.json";
};

int cmd_plan(const PlanFlags& f, std::ostream& out) {
    const auto doc = load_estimation(f.report);
    HyperGrid grid;
    if (!f.grid.empty()) {
        grid = load_grid_config(f.grid).grid;
    } else if (doc.grid) {
        grid = doc.grid->grid;
    } else {
        throw Error(Errc::malformed_report, "report carries no grid; pass --grid");
    }

    const ImportanceReport* chosen = &doc.reports.back();
    if (f.size > 0) {
        chosen = nullptr;
        for (const auto& r : doc.reports) {
            if (r.metadata.subsample_size == f.size) chosen = &r;
        }
        if (!chosen) throw Error(Errc::size_out_of_range, "report has no subsample size " + std::to_string(f.size));
    }

    PlanPolicy policy = GapRatioPolicy{f.gap_ratio};
    if (!f.groups.empty()) policy = ExplicitPolicy{parse_group_list(f.groups)};
    if (f.top > 0) policy = TopPolicy{f.top};
    const auto plan = plan_groups(*chosen, grid, policy);
    write_text_file(f.out, plan_to_json(plan));

    out << "plan from size " << chosen->metadata.subsample_size << ":";
    for (const auto& g : plan.groups) {
        out << " [";
        for (std::size_t i = 0; i < g.size(); ++i) out << (i ? "," : "") << g[i];
        out << "]";
    }
    out << "\nwrote " << f.out << "\n";
    return 0;
}

// tune -----------------------------------------------------------------------

struct TuneFlags {
    DataFlags data;
    TrainerFlags trainer;
    std::string plan;
    std::string grid;
    bool simultaneous = false;
    bool both = false;
    std::string out = "outcome.json";
};

int cmd_tune(const TuneFlags& f, std::ostream& out) {
    if (f.simultaneous && f.both) throw UsageError("--simultaneous and --both are exclusive");
    if (!f.simultaneous && f.plan.empty()) throw UsageError("--plan is required unless --simultaneous is given");
    if (f.simultaneous && f.plan.empty() && f.grid.empty()) throw UsageError("--simultaneous needs --grid or --plan");

    std::optional<TuningPlan> plan;
    if (!f.plan.empty()) plan = plan_from_json(read_text_file(f.plan));
    const HyperGrid grid = !f.grid.empty() ? load_grid_config(f.grid).grid : plan->grid;
    if (plan && plan->grid != grid) throw Error(Errc::invalid_config, "--grid differs from the grid embedded in the plan");

    const auto data = load_dataset(f.data.data, f.data.label);
    const auto pair = split(data, f.data.train_fraction, split_seed(f.data.seed));
    const auto factory = make_factory(f.trainer);
    TuningOptions options;
    options.metric = parse_metric(f.data.metric);
    options.seed = f.data.seed;
    options.workers = f.data.workers;

    if (f.both) {
        const auto seq = tune_sequential(*plan, pair, factory, options);
        const auto sim = tune_simultaneous(grid, pair, factory, options);
        write_text_file(f.out, comparison_to_json(seq, sim));
        print_outcome(seq, out);
        print_outcome(sim, out);
        const auto c = compare(seq, sim);
        out << "comparison: " << metric_name(options.metric) << " delta " << fixed(c.metric_delta) << ", fit ratio "
            << seq.fit_count << "/" << sim.fit_count << " = " << fixed(c.fit_ratio, 4) << "\n";
    } else {
        const auto outcome = f.simultaneous ? tune_simultaneous(grid, pair, factory, options)
                                            : tune_sequential(*plan, pair, factory, options);
        write_text_file(f.out, outcome_to_json(outcome));
        print_outcome(outcome, out);
    }
    out << "wrote " << f.out << "\n";
    return 0;
}

// check ----------------------------------------------------------------------

struct CheckFlags {
    std::vector<std::string> reports;
    std::size_t k = 2;
    std::string out;
};

int cmd_check(const CheckFlags& f, std::ostream& out) {
    std::vector<ImportanceReport> reports;
    for (const auto& path : f.reports) {
        auto doc = load_estimation(path);
        for (auto& r : doc.reports) reports.push_back(std::move(r));
    }
    if (reports.size() < 2) throw Error(Errc::invalid_config, "check needs at least two reports");
    const auto verdict = consistency_check(reports, f.k);
    const auto text = verdict_to_json(verdict);
    if (!f.out.empty()) write_text_file(f.out, text);
    for (std::size_t i = 0; i < verdict.sizes.size(); ++i) {
        out << "size " << verdict.sizes[i] << ":";
        for (const auto& name : verdict.rankings[i]) out << " " << name;
        out << "\n";
    }
    print_verdict(verdict, out);
    return 0;
}

// synth ----------------------------------------------------------------------

struct SynthFlags {
    std::string generator;
    std::size_t rows = 1000;
    std::size_t dims = 6;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
    const auto data = synthesize(parse_generator(f.generator), f.rows, f.dims, f.seed);
    write_dataset(data, f.out);
    out << "wrote " << data.rows() << " rows (" << data.positives() << " positive) to " << f.out << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hyperparameter importance by subsampled grid search", "hpi"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    EstimateFlags est;
    auto* estimate = app.add_subcommand("estimate", "Estimate hyperparameter importance at several subsample sizes");
    add_data_flags(*estimate, est.data);
    add_trainer_flags(*estimate, est.trainer);
    estimate->add_option("--grid", est.grid, "Grid JSON file")->required();
    estimate->add_option("--sizes", est.sizes, "Subsample sizes (rows, or fractions in (0,1))")
        ->required()
        ->delimiter(',');
    estimate->add_option("--replicates", est.replicates, "Replicates T per size")->check(CLI::PositiveNumber);
    estimate->add_option("--out", est.out, "Output directory");
    estimate->add_flag("--skip-failures", est.skip_failures, "Impute failed cells instead of aborting");
    estimate->add_flag("--stratified", est.stratified, "Class-stratified subsampling");
    estimate->add_option("--test-size", est.test_size, "Subsample the test split to this many rows");
    estimate->add_option("--form", est.form, "Importance form")->check(CLI::IsMember({"before", "after"}));
    estimate->add_option("--aggregation", est.aggregation, "Replicate aggregation")
        ->check(CLI::IsMember({"mean-then-variance", "variance-then-mean"}));
    estimate->add_option("--top-k", est.top_k, "k for the top-k consistency check")->check(CLI::PositiveNumber);
    estimate->add_flag("--resume", est.resume, "Resume from checkpoints in the output directory");

    PlanFlags pl;
    auto* plan = app.add_subcommand("plan", "Group axes into a sequential tuning plan");
    plan->add_option("--report", pl.report, "report.json from estimate")->required();
    plan->add_option("--grid", pl.grid, "Grid JSON (defaults to the grid embedded in the report)");
    auto* gap = plan->add_option("--gap-ratio", pl.gap_ratio, "Split groups where scores drop by this factor");
    auto* groups = plan->add_option("--groups", pl.groups, "Explicit groups, e.g. \"a,b|c\"");
    auto* top = plan->add_option("--top", pl.top, "One group of the top N axes")->check(CLI::PositiveNumber);
    gap->excludes(groups)->excludes(top);
    groups->excludes(top);
    plan->add_option("--size", pl.size, "Subsample size whose report to use (default the largest)");
    plan->add_option("--out", pl.out, "Plan file to write");

    TuneFlags tn;
    auto* tune = app.add_subcommand("tune", "Sequential and/or simultaneous grid search");
    add_data_flags(*tune, tn.data);
    add_trainer_flags(*tune, tn.trainer);
    tune->add_option("--plan", tn.plan, "Plan JSON from `hpi plan`");
    tune->add_option("--grid", tn.grid, "Grid JSON (for --simultaneous without a plan)");
    tune->add_flag("--simultaneous", tn.simultaneous, "Search the full grid");
    tune->add_flag("--both", tn.both, "Run the plan and the full grid, and compare");
    tune->add_option("--out", tn.out, "Outcome file to write");

    CheckFlags ck;
    auto* check = app.add_subcommand("check", "Consistency verdict across existing reports");
    check->add_option("--report", ck.reports, "report.json (repeatable)")->required();
    check->add_option("--k", ck.k, "k for the top-k check")->check(CLI::PositiveNumber);
    check->add_option("--out", ck.out, "Write the verdict JSON here");

    SynthFlags sy;
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
    synth->add_option("--gen", sy.generator, "Generator")->required()->check(CLI::IsMember(generator_names()));
    synth->add_option("--n", sy.rows, "Rows")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 32));
    synth->add_option("--d", sy.dims, "Features")->check(CLI::PositiveNumber);
    synth->add_option("--seed", sy.seed, "Seed");
    synth->add_option("--out", sy.out, "CSV file to write")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "hpi: " << e.what() << "\n";
        if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            err << "run 'hpi " << sub->get_name() << " --help' for usage\n";
        } else {
            err << app.help();
        }
        return 1;
    }

    try {
        if (estimate->parsed()) return cmd_estimate(est, out);
        if (plan->parsed()) return cmd_plan(pl, out);
        if (tune->parsed()) return cmd_tune(tn, out);
        if (check->parsed()) return cmd_check(ck, out);
        if (synth->parsed()) return cmd_synth(sy, out);
    } catch (const UsageError& e) {
        err << "hpi: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "hpi: " << e.what() << "\n";
        return static_cast<int>(exit_category(e.code()));
    } catch (const std::exception& e) {
        err << "hpi: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace hpi::cli
