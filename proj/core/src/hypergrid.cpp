// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/hypergrid.hpp"

#include "hpi/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace hpi {

std::string to_string(const Value& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&value)) {
        std::ostringstream os;
        os.precision(17);
        os << *d;
        // shortest form that still round-trips
        for (int p = 1; p <= 17; ++p) {
            std::ostringstream trial;
            trial.precision(p);
            trial << *d;
            if (std::stod(trial.str()) == *d) return trial.str();
        }
        return os.str();
    }
    return std::get<std::string>(value);
}

double as_double(const Value& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&value)) return *d;
    throw Error(Errc::invalid_params, "categorical value '" + std::get<std::string>(value) + "' used where a number is required");
}

ValueType type_of(const Value& value) noexcept {
    switch (value.index()) {
    case 0: return ValueType::integer;
    case 1: return ValueType::real;
    default: return ValueType::category;
    }
}

std::optional<std::size_t> Axis::find(const Value& value) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Value& c = values[i];
        if (c == value) return i;
        if (c.index() != 2 && value.index() != 2 && as_double(c) == as_double(value)) return i;
    }
    return std::nullopt;
}

const Value* Assignment::find(std::string_view name) const noexcept {
    for (const auto& b : bindings_) {
        if (b.name == name) return &b.value;
    }
    return nullptr;
}

const Value& Assignment::at(std::string_view name) const {
    if (const auto* v = find(name)) return *v;
    throw Error(Errc::unknown_axis, "assignment has no axis '" + std::string(name) + "'");
}

std::string to_string(const Assignment& assignment) {
    std::string out = "{";
    for (std::size_t i = 0; i < assignment.bindings().size(); ++i) {
        if (i) out += ", ";
        out += assignment.bindings()[i].name + "=" + to_string(assignment.bindings()[i].value);
    }
    return out + "}";
}

HyperGrid::HyperGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    std::set<std::string> names;
    size_ = 1;
    for (const auto& axis : axes_) {
        if (!names.insert(axis.name).second) throw Error(Errc::duplicate_axis, "axis '" + axis.name + "' declared twice");
        if (axis.values.empty()) throw Error(Errc::empty_axis, "axis '" + axis.name + "' has no candidates");
        const auto kind = axis.values.front().index();
        for (std::size_t i = 0; i < axis.values.size(); ++i) {
            if (axis.values[i].index() != kind) {
                throw Error(Errc::mixed_axis_types, "axis '" + axis.name + "' mixes value types");
            }
            for (std::size_t k = 0; k < i; ++k) {
                if (axis.values[k] == axis.values[i]) {
                    throw Error(Errc::duplicate_value,
                                "axis '" + axis.name + "' repeats candidate " + to_string(axis.values[i]));
                }
            }
        }
        if (axis.default_index >= axis.values.size()) {
            throw Error(Errc::default_not_in_values, "axis '" + axis.name + "' default out of range");
        }
        size_ *= axis.values.size();
    }
}

std::vector<std::size_t> HyperGrid::sizes() const {
    std::vector<std::size_t> out;
    out.reserve(axes_.size());
    for (const auto& a : axes_) out.push_back(a.size());
    return out;
}

std::vector<std::string> HyperGrid::names() const {
    std::vector<std::string> out;
    out.reserve(axes_.size());
    for (const auto& a : axes_) out.push_back(a.name);
    return out;
}

std::optional<std::size_t> HyperGrid::axis_index(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> HyperGrid::coordinates(std::size_t flat) const {
    if (flat >= size_) throw Error(Errc::index_out_of_range, "flat index " + std::to_string(flat) + " outside grid");
    std::vector<std::size_t> coords(axes_.size());
    for (std::size_t i = axes_.size(); i-- > 0;) {
        coords[i] = flat % axes_[i].size();
        flat /= axes_[i].size();
    }
    return coords;
}

std::size_t HyperGrid::flat_from_coordinates(const std::vector<std::size_t>& coords) const {
    if (coords.size() != axes_.size()) throw Error(Errc::index_out_of_range, "coordinate rank mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (coords[i] >= axes_[i].size()) throw Error(Errc::index_out_of_range, "coordinate outside axis '" + axes_[i].name + "'");
        flat = flat * axes_[i].size() + coords[i];
    }
    return flat;
}

Assignment HyperGrid::from_coordinates(const std::vector<std::size_t>& coords) const {
    std::vector<Binding> bindings;
    bindings.reserve(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) bindings.push_back({axes_[i].name, axes_[i].values.at(coords[i])});
    return Assignment(std::move(bindings));
}

Assignment HyperGrid::point(std::size_t flat) const { return from_coordinates(coordinates(flat)); }

Assignment HyperGrid::defaults() const {
    std::vector<std::size_t> coords;
    for (const auto& a : axes_) coords.push_back(a.default_index);
    return from_coordinates(coords);
}

HyperGrid HyperGrid::restrict_to(const std::vector<std::string>& names) const {
    std::vector<Axis> kept;
    for (const auto& n : names) {
        if (!axis_index(n)) throw Error(Errc::unknown_axis, "no axis '" + n + "' in grid");
    }
    for (const auto& a : axes_) {
        if (std::find(names.begin(), names.end(), a.name) != names.end()) kept.push_back(a);
    }
    return HyperGrid(std::move(kept));
}

std::vector<Assignment> enumerate_points(const HyperGrid& grid) {
    std::vector<Assignment> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(grid.point(i));
    return out;
}

std::size_t flat_index(const HyperGrid& grid, const Assignment& assignment) {
    std::vector<std::size_t> coords(grid.axis_count());
    std::vector<bool> seen(grid.axis_count(), false);
    for (const auto& b : assignment.bindings()) {
        const auto ax = grid.axis_index(b.name);
        if (!ax) throw Error(Errc::unknown_axis, "no axis '" + b.name + "' in grid");
        const auto idx = grid.axis(*ax).find(b.value);
        if (!idx) throw Error(Errc::unknown_value, to_string(b.value) + " is not a candidate of '" + b.name + "'");
        coords[*ax] = *idx;
        seen[*ax] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) throw Error(Errc::unknown_axis, "assignment lacks axis '" + grid.axis(i).name + "'");
    }
    return grid.flat_from_coordinates(coords);
}

namespace {

using detail::ordered_json;

Axis parse_axis(const std::string& name, const ordered_json& body) {
    if (!body.is_object()) throw Error(Errc::malformed_grid, "axis '" + name + "' must be an object with 'values'");
    auto values_it = body.find("values");
    if (values_it == body.end() || !values_it->is_array()) {
        throw Error(Errc::malformed_grid, "axis '" + name + "' needs a 'values' array");
    }
    for (const auto& [key, _] : body.items()) {
        if (key != "values" && key != "default") throw Error(Errc::malformed_grid, "axis '" + name + "' has unknown field '" + key + "'");
    }
    Axis axis;
    axis.name = name;
    bool any_real = false;
    bool any_number = false;
    bool any_string = false;
    for (const auto& v : *values_it) {
        axis.values.push_back(detail::value_from_json(v, name));
        any_real |= v.is_number_float();
        any_number |= v.is_number();
        any_string |= v.is_string();
    }
    if (any_number && any_string) throw Error(Errc::mixed_axis_types, "axis '" + name + "' mixes numbers and strings");
    // A real-valued axis may spell some candidates as integers ("1" next to "0.5").
    if (any_real) {
        for (auto& v : axis.values) v = as_double(v);
    }
    if (axis.values.empty()) throw Error(Errc::empty_axis, "axis '" + name + "' has no candidates");
    if (auto d = body.find("default"); d != body.end()) {
        const auto idx = axis.find(detail::value_from_json(*d, name));
        if (!idx) throw Error(Errc::default_not_in_values, "default " + d->dump() + " of axis '" + name + "' is not a candidate");
        axis.default_index = *idx;
    }
    return axis;
}

// ordered_json silently keeps the last of repeated keys, so repeated axis
// names are caught by a callback pass over the raw text.
void reject_duplicate_axis_keys(std::string_view text) {
    std::set<std::string> keys;
    bool in_axes = false;
    auto cb = [&](int depth, ordered_json::parse_event_t ev, ordered_json& parsed) {
        if (ev != ordered_json::parse_event_t::key) return true;
        if (depth == 1) {
            in_axes = parsed.get<std::string>() == "axes";
        } else if (depth == 2 && in_axes) {
            const auto k = parsed.get<std::string>();
            if (!keys.insert(k).second) throw Error(Errc::duplicate_axis, "axis '" + k + "' declared twice");
        }
        return true;
    };
    const auto parsed = ordered_json::parse(text, cb);
    (void)parsed;
}

}  // namespace

GridConfig parse_grid_config(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw Error(Errc::malformed_grid, ex.what());
    }
    if (!doc.is_object()) throw Error(Errc::malformed_grid, "grid document must be an object");
    auto axes_it = doc.find("axes");
    if (axes_it == doc.end() || !axes_it->is_object()) throw Error(Errc::malformed_grid, "grid document needs an 'axes' object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "axes" && key != "joint") throw Error(Errc::malformed_grid, "unknown top-level field '" + key + "'");
    }
    reject_duplicate_axis_keys(text);
    std::vector<Axis> axes;
    for (const auto& [name, body] : axes_it->items()) axes.push_back(parse_axis(name, body));
    GridConfig config{HyperGrid(std::move(axes)), {}};
    if (auto joint = doc.find("joint"); joint != doc.end()) {
        if (!joint->is_array()) throw Error(Errc::malformed_grid, "'joint' must be a list of name pairs");
        for (const auto& pair : *joint) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
                throw Error(Errc::malformed_grid, "joint entry " + pair.dump() + " is not a [name, name] pair");
            }
            AxisPair p{pair[0].get<std::string>(), pair[1].get<std::string>()};
            if (!config.grid.axis_index(p.first) || !config.grid.axis_index(p.second)) {
                throw Error(Errc::unknown_axis, "joint entry " + pair.dump() + " names an unknown axis");
            }
            if (p.first == p.second) throw Error(Errc::invalid_axes, "joint entry " + pair.dump() + " repeats an axis");
            config.joint.push_back(std::move(p));
        }
    }
    return config;
}

HyperGrid parse_grid(std::string_view text) { return parse_grid_config(text).grid; }

GridConfig load_grid_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::missing_file, "cannot open grid file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid_config(ss.str());
}

std::string serialize_grid(const GridConfig& config) {
    ordered_json axes = ordered_json::object();
    for (const auto& a : config.grid.axes()) {
        ordered_json values = ordered_json::array();
        for (const auto& v : a.values) values.push_back(detail::value_to_json(v));
        axes[a.name] = {{"values", values}, {"default", detail::value_to_json(a.default_value())}};
    }
    ordered_json doc = {{"axes", axes}};
    if (!config.joint.empty()) {
        ordered_json joint = ordered_json::array();
        for (const auto& [a, b] : config.joint) joint.push_back({a, b});
        doc["joint"] = joint;
    }
    return doc.dump(2) + "\n";
}

}  // namespace hpi
