// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

// Private helpers shared by the serializers. Not installed.

#pragma once

#include <json.hpp>

#include "hpi/error.hpp"
#include "hpi/hypergrid.hpp"

#include <string>

namespace hpi::detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json value_to_json(const Value& value) {
    return std::visit([](const auto& v) { return ordered_json(v); }, value);
}

inline Value value_from_json(const ordered_json& j, const std::string& where) {
    if (j.is_number_integer()) return Value{j.get<std::int64_t>()};
    if (j.is_number_float()) return Value{j.get<double>()};
    if (j.is_string()) return Value{j.get<std::string>()};
    throw Error(Errc::malformed_grid, where + ": candidate must be a number or string, got " + j.dump());
}

inline ordered_json assignment_to_json(const Assignment& assignment) {
    ordered_json out = ordered_json::object();
    for (const auto& b : assignment.bindings()) out[b.name] = value_to_json(b.value);
    return out;
}

/// Reads `{name: value}` against `grid`, snapping each value onto the axis's
/// stored candidate so that types match exactly.
inline Assignment assignment_from_json(const ordered_json& j, const HyperGrid& grid, Errc err) {
    if (!j.is_object()) throw Error(err, "assignment must be an object");
    std::vector<Binding> bindings;
    for (const auto& axis : grid.axes()) {
        auto it = j.find(axis.name);
        if (it == j.end()) throw Error(err, "assignment lacks axis '" + axis.name + "'");
        const Value v = value_from_json(*it, axis.name);
        const auto idx = axis.find(v);
        if (!idx) throw Error(Errc::unknown_value, "value " + it->dump() + " is not a candidate of '" + axis.name + "'");
        bindings.push_back({axis.name, axis.values[*idx]});
    }
    for (const auto& [key, _] : j.items()) {
        if (!grid.axis_index(key)) throw Error(Errc::unknown_axis, "assignment names unknown axis '" + key + "'");
    }
    return Assignment(std::move(bindings));
}

template <class T>
T require(const ordered_json& j, const char* key, Errc err) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(err, std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& ex) {
        throw Error(err, std::string("field '") + key + "': " + ex.what());
    }
}

}  // namespace hpi::detail
