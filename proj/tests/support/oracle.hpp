// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference computations, written without the library's helpers.

#pragma once

#include <cstddef>
#include <map>
#include <vector>

namespace oracle {

inline std::vector<std::size_t> decode(std::size_t flat, const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> c(shape.size());
    for (std::size_t a = shape.size(); a-- > 0;) {
        c[a] = flat % shape[a];
        flat /= shape[a];
    }
    return c;
}

inline double variance(const std::vector<double>& v) {
    long double m = 0;
    for (double x : v) m += x;
    m /= static_cast<long double>(v.size());
    long double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return static_cast<double>(s / static_cast<long double>(v.size()));
}

/// Mean of the cells grouped by their coordinates on `axes`, keyed by those
/// coordinates.
inline std::map<std::vector<std::size_t>, double> marginal(const std::vector<double>& values,
                                                           const std::vector<std::size_t>& shape,
                                                           const std::vector<std::size_t>& axes) {
    std::map<std::vector<std::size_t>, std::pair<long double, std::size_t>> acc;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto c = decode(i, shape);
        std::vector<std::size_t> key;
        for (auto a : axes) key.push_back(c[a]);
        auto& slot = acc[key];
        slot.first += values[i];
        slot.second += 1;
    }
    std::map<std::vector<std::size_t>, double> out;
    for (const auto& [k, v] : acc) out[k] = static_cast<double>(v.first / static_cast<long double>(v.second));
    return out;
}

inline double before(const std::vector<double>& values, const std::vector<std::size_t>& shape,
                     const std::vector<std::size_t>& axes) {
    std::vector<double> m;
    for (const auto& [_, v] : marginal(values, shape, axes)) m.push_back(v);
    return variance(m);
}

/// Mean over settings of the other axes of the variance across `axes`.
inline double after(const std::vector<double>& values, const std::vector<std::size_t>& shape,
                    const std::vector<std::size_t>& axes) {
    std::map<std::vector<std::size_t>, std::vector<double>> slices;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto c = decode(i, shape);
        std::vector<std::size_t> key;
        for (std::size_t a = 0; a < shape.size(); ++a) {
            bool in = false;
            for (auto b : axes) in = in || a == b;
            if (!in) key.push_back(c[a]);
        }
        slices[key].push_back(values[i]);
    }
    long double total = 0;
    for (const auto& [_, s] : slices) total += variance(s);
    return static_cast<double>(total / static_cast<long double>(slices.size()));
}

inline double mean_square_marginal(const std::vector<double>& values, const std::vector<std::size_t>& shape,
                                   std::size_t axis) {
    long double s = 0;
    const auto m = marginal(values, shape, {axis});
    for (const auto& [_, v] : m) s += static_cast<long double>(v) * v;
    return static_cast<double>(s / static_cast<long double>(m.size()));
}

}  // namespace oracle
