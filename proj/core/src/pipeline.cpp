// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/pipeline.hpp"

#include "hpi/error.hpp"
#include "hpi/random.hpp"
#include "work_pool.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>

namespace hpi {

std::size_t EstimationResult::fit_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sizes) n += s.fits;
    return n;
}

EstimationDocument EstimationResult::document() const {
    EstimationDocument doc;
    for (const auto& s : sizes) doc.reports.push_back(s.report);
    doc.consistency = consistency;
    return doc;
}

std::vector<std::size_t> resolve_sizes(const std::vector<double>& raw, std::size_t train_rows) {
    std::vector<std::size_t> out;
    for (const double v : raw) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_config, "subsample size must be positive");
        if (v < 1.0) {
            out.push_back(static_cast<std::size_t>(std::floor(v * static_cast<double>(train_rows))));
        } else {
            if (v != std::floor(v)) throw Error(Errc::invalid_config, "subsample size " + to_string(Value{v}) + " is neither a fraction nor a row count");
            out.push_back(static_cast<std::size_t>(v));
        }
    }
    return out;
}

void validate_config(const EstimationConfig& config, std::size_t train_rows) {
    if (config.grid.axis_count() == 0) throw Error(Errc::invalid_config, "grid has no axes");
    if (config.replicates < 1) throw Error(Errc::invalid_config, "replicates must be >= 1");
    if (config.subsample_sizes.empty()) throw Error(Errc::invalid_config, "no subsample sizes given");
    for (std::size_t i = 0; i < config.subsample_sizes.size(); ++i) {
        const auto s = config.subsample_sizes[i];
        if (s < 2) throw Error(Errc::size_out_of_range, "subsample size " + std::to_string(s) + " is below 2 rows");
        if (s > train_rows) {
            throw Error(Errc::size_out_of_range, "subsample size " + std::to_string(s) + " exceeds the " + std::to_string(train_rows) +
                                                     " training rows");
        }
        if (i > 0 && s <= config.subsample_sizes[i - 1]) throw Error(Errc::invalid_config, "subsample sizes must be strictly increasing");
    }
    for (const auto& [a, b] : config.joint) {
        if (!config.grid.axis_index(a) || !config.grid.axis_index(b)) throw Error(Errc::unknown_axis, "joint pair (" + a + ", " + b + ") names an unknown axis");
    }
}

std::uint64_t split_seed(std::uint64_t master) noexcept { return derive_seed(master, std::span<const std::uint64_t>{}); }

std::string checkpoint_path(const std::string& directory, std::size_t subsample_size) {
    return (std::filesystem::path(directory) / ("tensor_" + std::to_string(subsample_size) + ".bin")).string();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

LossTensor initial_tensor(const EstimationConfig& config, const TensorHeader& header, std::size_t& resumed) {
    resumed = 0;
    LossTensor fresh(config.replicates, config.grid);
    if (config.checkpoint.directory.empty() || !config.checkpoint.resume) return fresh;
    const auto path = checkpoint_path(config.checkpoint.directory, header.subsample_size);
    if (!std::filesystem::exists(path)) return fresh;
    TensorHeader stored;
    LossTensor loaded = load_checkpoint(path, &stored);
    if (!(stored == header) || loaded.axis_names() != fresh.axis_names() || loaded.axis_sizes() != fresh.axis_sizes() ||
        loaded.replicates() != fresh.replicates()) {
        throw Error(Errc::checkpoint_mismatch, "checkpoint '" + path + "' was written by a different configuration");
    }
    resumed = loaded.filled_count();
    return loaded;
}

std::string describe(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

}  // namespace

EstimationResult run_estimation(const Dataset& data, const EstimationConfig& config, const TrainerFactory& factory) {
    return run_estimation(split(data, config.train_fraction, split_seed(config.master_seed)), config, factory);
}

EstimationResult run_estimation(const SplitPair& parts, const EstimationConfig& config, const TrainerFactory& factory) {
    validate_config(config, parts.train.rows());
    {
        const auto probe = factory();
        check_declared(*probe, config.grid);
    }
    Dataset test = parts.test;
    if (config.test_subsample_size && *config.test_subsample_size < test.rows()) {
        test = subsample(test, *config.test_subsample_size, derive_seed(config.master_seed, {~std::uint64_t{0}}), config.sampling);
    }
    if (!test.has_both_classes() && config.metric == Metric::auc) throw Error(Errc::single_class, "test split contains a single class");
    if (!config.checkpoint.directory.empty()) std::filesystem::create_directories(config.checkpoint.directory);

    EstimationResult result;
    const std::size_t g = config.grid.size();
    const std::size_t T = config.replicates;
    for (std::size_t s = 0; s < config.subsample_sizes.size(); ++s) {
        const auto start = Clock::now();
        SizeResult out;
        out.subsample_size = config.subsample_sizes[s];
        const TensorHeader header{config.master_seed, config.metric, out.subsample_size};
        LossTensor tensor = initial_tensor(config, header, out.resumed_cells);

        std::vector<Dataset> samples;
        samples.reserve(T);
        for (std::size_t t = 0; t < T; ++t) {
            samples.push_back(subsample(parts.train, out.subsample_size, derive_seed(config.master_seed, {s, t}), config.sampling));
            if (!samples.back().has_both_classes()) {
                throw Error(Errc::single_class, "subsample of size " + std::to_string(out.subsample_size) + " (replicate " +
                                                    std::to_string(t) + ") contains a single class; consider stratified sampling");
            }
        }

        std::vector<std::size_t> pending;
        for (std::size_t k = 0; k < T * g; ++k) {
            if (!tensor.is_set(k / g, k % g)) pending.push_back(k);
        }

        std::mutex mu;
        std::size_t since_flush = 0;
        double fit_seconds = 0.0;
        auto flush = [&] {
            if (!config.checkpoint.directory.empty()) save_checkpoint(checkpoint_path(config.checkpoint.directory, out.subsample_size), tensor, header);
        };
        const bool stop_on_failure = config.failure_policy == FailurePolicy::abort;
        auto failures = detail::run_pool(pending.size(), config.workers, factory, stop_on_failure, [&](std::size_t i, Trainer& trainer) {
            const std::size_t cell = pending[i];
            const std::size_t t = cell / g;
            const std::size_t flat = cell % g;
            const auto fit_start = Clock::now();
            const double loss = trainer.evaluate(samples[t], test, config.grid.point(flat), config.metric,
                                                 derive_seed(config.master_seed, {s, t, flat}));
            const double took = seconds_since(fit_start);
            std::lock_guard lock(mu);
            tensor.set(t, flat, loss);
            fit_seconds += took;
            if (++since_flush >= config.checkpoint.flush_every) {
                since_flush = 0;
                flush();
            }
        });
        out.fits = pending.size();
        if (stop_on_failure && !failures.empty()) {
            // Claimed cells beyond the first failure were never evaluated.
            out.fits = tensor.filled_count() - out.resumed_cells + failures.size();
            flush();
            const auto& first = failures.front();
            try {
                std::rethrow_exception(first.error);
            } catch (const Error& ex) {
                if (first.index < pending.size()) {
                    const auto cell = pending[first.index];
                    throw Error(ex.code(), "size " + std::to_string(out.subsample_size) + ", replicate " + std::to_string(cell / g) +
                                               ", " + to_string(config.grid.point(cell % g)) + ": " + ex.what());
                }
                throw;
            } catch (const std::exception& ex) {
                throw Error(Errc::trainer_failure, ex.what());
            }
        }
        for (const auto& f : failures) {
            if (f.index >= pending.size()) throw Error(Errc::trainer_failure, describe(f.error));
        }
        for (const auto& f : failures) {
            const auto cell = pending[f.index];
            tensor.impute(cell / g, cell % g);
        }
        out.failed_cells = failures.size();
        flush();

        ReportMetadata meta;
        meta.subsample_size = out.subsample_size;
        meta.replicates = T;
        meta.imputed_cells = tensor.imputed_count();
        meta.metric = config.metric;
        meta.master_seed = config.master_seed;
        out.report = compute_report(tensor, config.joint, config.form, config.aggregation, meta);
        out.tensor = std::move(tensor);
        out.fit_seconds = fit_seconds;
        out.wall_seconds = seconds_since(start);
        result.sizes.push_back(std::move(out));
    }
    if (result.sizes.size() >= 2) {
        std::vector<ImportanceReport> reports;
        for (const auto& s : result.sizes) reports.push_back(s.report);
        result.consistency = consistency_check(reports, config.top_k);
    }
    return result;
}

std::vector<TimingRow> timing_profile(const EstimationResult& result) {
    std::vector<TimingRow> rows;
    for (const auto& s : result.sizes) {
        TimingRow r;
        r.subsample_size = s.subsample_size;
        r.mean_fit_seconds = s.fits ? s.fit_seconds / static_cast<double>(s.fits) : 0.0;
        r.mean_loss = mean(s.tensor.raw_values());
        rows.push_back(r);
    }
    return rows;
}

std::vector<TimingRow> timing_profile(const Dataset& data, const EstimationConfig& config, const TrainerFactory& factory) {
    return timing_profile(run_estimation(data, config, factory));
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
    std::string out = "subsample_size,mean_fit_seconds,mean_loss\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.6g,%.17g\n", r.subsample_size, r.mean_fit_seconds, r.mean_loss);
        out += buf;
    }
    return out;
}

}  // namespace hpi
