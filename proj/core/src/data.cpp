// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/data.hpp"

#include "hpi/error.hpp"
#include "hpi/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hpi {

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<double> features, std::vector<std::uint8_t> labels,
                 std::string label_name)
    : names_(std::move(feature_names)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      label_name_(std::move(label_name)) {
    if (names_.empty()) throw Error(Errc::invalid_config, "dataset needs at least one feature column");
    if (labels_.empty()) throw Error(Errc::empty_file, "dataset has no rows");
    if (features_.size() != labels_.size() * names_.size()) {
        throw Error(Errc::length_mismatch, "feature matrix does not match rows x columns");
    }
    for (const auto y : labels_) {
        if (y > 1) throw Error(Errc::non_binary_label, "label outside {0,1}");
    }
    for (std::size_t k = 0; k < features_.size(); ++k) {
        if (!std::isfinite(features_[k])) {
            throw Error(Errc::non_finite_cell, "non-finite feature at row " + std::to_string(k / names_.size()) +
                                                   ", column '" + names_[k % names_.size()] + "'");
        }
    }
}

std::size_t Dataset::positives() const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

bool Dataset::has_both_classes() const noexcept {
    const auto p = positives();
    return p > 0 && p < rows();
}

Dataset Dataset::take(std::span<const std::size_t> rows) const {
    Dataset out;
    out.names_ = names_;
    out.label_name_ = label_name_;
    out.features_.reserve(rows.size() * cols());
    out.labels_.reserve(rows.size());
    for (const auto r : rows) {
        const auto src = row(r);
        out.features_.insert(out.features_.end(), src.begin(), src.end());
        out.labels_.push_back(labels_[r]);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_number(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end && !s.empty();
}

}  // namespace

Dataset parse_dataset(const std::string& csv_text, const std::string& label_column) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw Error(Errc::empty_file, "no header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_fields(line);
    std::size_t label_idx = header.size();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == label_column) {
            label_idx = j;
        } else {
            names.emplace_back(header[j]);
        }
    }
    if (label_idx == header.size()) throw Error(Errc::missing_label_column, "no column named '" + label_column + "'");
    if (names.empty()) throw Error(Errc::invalid_config, "no feature columns besides the label");

    std::vector<double> features;
    std::vector<std::uint8_t> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw Error(Errc::ragged_row, "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                              " fields, header has " + std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            double v = 0.0;
            if (!parse_number(fields[j], v)) {
                if (j == label_idx) {
                    throw Error(Errc::non_binary_label, "line " + std::to_string(line_no) + ": label '" +
                                                            std::string(fields[j]) + "' is not 0 or 1");
                }
                throw Error(Errc::non_numeric_cell, "line " + std::to_string(line_no) + ", column '" +
                                                        std::string(header[j]) + "': '" + std::string(fields[j]) + "'");
            }
            if (j == label_idx) {
                if (v != 0.0 && v != 1.0) {
                    throw Error(Errc::non_binary_label, "line " + std::to_string(line_no) + ": label '" +
                                                            std::string(fields[j]) + "' is not 0 or 1");
                }
                labels.push_back(static_cast<std::uint8_t>(v));
            } else {
                if (!std::isfinite(v)) {
                    throw Error(Errc::non_finite_cell, "line " + std::to_string(line_no) + ", column '" +
                                                           std::string(header[j]) + "' is not finite");
                }
                features.push_back(v);
            }
        }
    }
    if (labels.empty()) throw Error(Errc::empty_file, "no data rows");
    return Dataset(std::move(names), std::move(features), std::move(labels), label_column);
}

Dataset load_dataset(const std::string& path, const std::string& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::missing_file, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str(), label_column);
}

void write_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
    std::string buf;
    for (const auto& n : data.feature_names()) buf += n + ",";
    buf += data.label_name() + "\n";
    char num[64];
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (const double v : data.row(i)) {
            auto [ptr, ec] = std::to_chars(num, num + sizeof num, v);
            buf.append(num, ptr);
            buf += ',';
        }
        buf += data.labels()[i] ? "1\n" : "0\n";
        if (buf.size() > (1u << 20)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
    if (!out) throw Error(Errc::io_error, "short write to '" + path + "'");
}

SplitPair split(const Dataset& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error(Errc::degenerate_split, "train fraction must lie in (0, 1)");
    }
    const std::size_t n = data.rows();
    // The epsilon absorbs representation error such as 10 * 0.7 = 6.9999...
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 1e-9));
    if (n_train < 1 || n - n_train < 1) {
        throw Error(Errc::degenerate_split, "splitting " + std::to_string(n) + " rows at " + std::to_string(train_fraction) +
                                                " leaves one side empty");
    }
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {data.take(train), data.take(test)};
}

std::vector<std::size_t> subsample_rows(const Dataset& data, std::size_t size, std::uint64_t seed, Sampling mode) {
    const std::size_t n = data.rows();
    if (size < 1 || size > n) {
        throw Error(Errc::size_out_of_range, "subsample size " + std::to_string(size) + " outside [1, " + std::to_string(n) + "]");
    }
    Rng rng(seed);
    std::vector<std::size_t> rows;
    if (mode == Sampling::uniform) {
        rows = rng.sample_indices(n, size);
    } else {
        std::vector<std::size_t> pos;
        std::vector<std::size_t> neg;
        for (std::size_t i = 0; i < n; ++i) (data.labels()[i] ? pos : neg).push_back(i);
        auto take_pos = static_cast<std::size_t>(
            std::llround(static_cast<double>(size) * static_cast<double>(pos.size()) / static_cast<double>(n)));
        if (size >= 2) {
            if (!pos.empty()) take_pos = std::max<std::size_t>(take_pos, 1);
            if (!neg.empty()) take_pos = std::min(take_pos, size - 1);
        }
        take_pos = std::min(take_pos, pos.size());
        if (size - take_pos > neg.size()) take_pos = size - neg.size();
        for (const auto k : rng.sample_indices(pos.size(), take_pos)) rows.push_back(pos[k]);
        for (const auto k : rng.sample_indices(neg.size(), size - take_pos)) rows.push_back(neg[k]);
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

Dataset subsample(const Dataset& data, std::size_t size, std::uint64_t seed, Sampling mode) {
    const auto rows = subsample_rows(data, size, seed, mode);
    return data.take(rows);
}

std::uint64_t fingerprint(const Dataset& data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t shape[2] = {data.rows(), data.cols()};
    mix(shape, sizeof shape);
    for (const auto& n : data.feature_names()) mix(n.data(), n.size() + 1);
    mix(data.features().data(), data.features().size() * sizeof(double));
    mix(data.labels().data(), data.labels().size());
    return h;
}

}  // namespace hpi
