// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hpi {

/// A single hyperparameter candidate.
using Value = std::variant<std::int64_t, double, std::string>;

enum class ValueType { integer, real, category };

std::string to_string(const Value& value);
/// Numeric view of an integer or real candidate; throws for categories.
double as_double(const Value& value);
ValueType type_of(const Value& value) noexcept;

struct Axis {
    std::string name;
    std::vector<Value> values;
    std::size_t default_index = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] const Value& default_value() const { return values[default_index]; }
    [[nodiscard]] ValueType type() const noexcept { return type_of(values.front()); }
    /// Position of `value` among the candidates, if present. Integer and real
    /// candidates compare numerically against each other.
    [[nodiscard]] std::optional<std::size_t> find(const Value& value) const;

    friend bool operator==(const Axis&, const Axis&) = default;
};

struct Binding {
    std::string name;
    Value value;

    friend bool operator==(const Binding&, const Binding&) = default;
};

/// One point of a grid: exactly one binding per axis, in axis order.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(std::vector<Binding> bindings) : bindings_(std::move(bindings)) {}

    [[nodiscard]] const std::vector<Binding>& bindings() const noexcept { return bindings_; }
    [[nodiscard]] const Value* find(std::string_view name) const noexcept;
    [[nodiscard]] const Value& at(std::string_view name) const;
    [[nodiscard]] std::size_t size() const noexcept { return bindings_.size(); }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<Binding> bindings_;
};

std::string to_string(const Assignment& assignment);

using AxisPair = std::pair<std::string, std::string>;

class HyperGrid {
public:
    HyperGrid() = default;
    /// Validates every invariant; throws hpi::Error on violation.
    explicit HyperGrid(std::vector<Axis> axes);

    [[nodiscard]] const std::vector<Axis>& axes() const noexcept { return axes_; }
    [[nodiscard]] const Axis& axis(std::size_t i) const { return axes_.at(i); }
    [[nodiscard]] std::size_t axis_count() const noexcept { return axes_.size(); }
    [[nodiscard]] std::vector<std::size_t> sizes() const;
    [[nodiscard]] std::vector<std::string> names() const;
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::optional<std::size_t> axis_index(std::string_view name) const noexcept;

    /// Row-major decoding of a flat index (last axis fastest).
    [[nodiscard]] Assignment point(std::size_t flat) const;
    [[nodiscard]] std::vector<std::size_t> coordinates(std::size_t flat) const;
    [[nodiscard]] std::size_t flat_from_coordinates(const std::vector<std::size_t>& coords) const;
    [[nodiscard]] Assignment from_coordinates(const std::vector<std::size_t>& coords) const;
    [[nodiscard]] Assignment defaults() const;

    /// Sub-grid over the named axes, in this grid's axis order.
    [[nodiscard]] HyperGrid restrict_to(const std::vector<std::string>& names) const;

    friend bool operator==(const HyperGrid&, const HyperGrid&) = default;

private:
    std::vector<Axis> axes_;
    std::size_t size_ = 0;
};

std::vector<Assignment> enumerate_points(const HyperGrid& grid);
std::size_t flat_index(const HyperGrid& grid, const Assignment& assignment);

/// Grid file contents: the grid plus optional joint-importance requests.
struct GridConfig {
    HyperGrid grid;
    std::vector<AxisPair> joint;

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

GridConfig parse_grid_config(std::string_view text);
HyperGrid parse_grid(std::string_view text);
GridConfig load_grid_config(const std::string& path);
std::string serialize_grid(const GridConfig& config);

}  // namespace hpi
