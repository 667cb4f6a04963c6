// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/synth.hpp"

#include "hpi/error.hpp"
#include "hpi/random.hpp"

#include <cmath>

namespace hpi {

namespace {

double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }
double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double additive_term(std::size_t j, double x) {
    const double w = 2.0 / static_cast<double>(j + 1);
    switch (j % 3) {
        case 0: return w * 2.0 * x;
        case 1: return w * 2.0 * std::tanh(3.0 * x);
        default: return w * 3.0 * x * x * x;
    }
}

}  // namespace

std::string_view generator_name(Generator g) noexcept {
    switch (g) {
        case Generator::interaction: return "interaction";
        case Generator::additive: return "additive";
        case Generator::separable_noise: return "separable-noise";
    }
    return "?";
}

std::vector<std::string> generator_names() { return {"interaction", "additive", "separable-noise"}; }

Generator parse_generator(std::string_view name) {
    if (name == "interaction") return Generator::interaction;
    if (name == "additive") return Generator::additive;
    if (name == "separable-noise") return Generator::separable_noise;
    throw Error(Errc::invalid_config, "unknown generator '" + std::string(name) + "'");
}

Dataset synthesize(Generator generator, std::size_t rows, std::size_t dims, std::uint64_t seed) {
    if (rows < 2) throw Error(Errc::invalid_config, "need at least 2 rows");
    if (dims < 1) throw Error(Errc::invalid_config, "need at least 1 feature");
    if (generator == Generator::interaction && dims < 4) throw Error(Errc::invalid_config, "interaction needs d >= 4");

    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(generator)}));
    std::vector<double> weights(dims);
    if (generator == Generator::separable_noise) {
        for (auto& w : weights) w = rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    }

    std::vector<std::string> names;
    for (std::size_t j = 0; j < dims; ++j) names.push_back("x" + std::to_string(j));
    std::vector<double> x(rows * dims);
    std::vector<std::uint8_t> y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double* r = x.data() + i * dims;
        for (std::size_t j = 0; j < dims; ++j) r[j] = rng.uniform(-1.0, 1.0);
        double z = 0.0;
        switch (generator) {
            case Generator::interaction:
                z = 3.0 * sign(r[0]) * sign(r[1]) + 1.5 * sign(r[2]) * sign(r[3]) + (dims > 4 ? 0.5 * r[4] : 0.0);
                y[i] = rng.uniform() < logistic(z) ? 1 : 0;
                break;
            case Generator::additive:
                for (std::size_t j = 0; j < dims; ++j) z += additive_term(j, r[j]);
                y[i] = rng.uniform() < logistic(z) ? 1 : 0;
                break;
            case Generator::separable_noise:
                for (std::size_t j = 0; j < dims; ++j) z += weights[j] * r[j];
                y[i] = z + 0.1 * rng.normal() > 0.0 ? 1 : 0;
                break;
        }
    }
    return Dataset(std::move(names), std::move(x), std::move(y), "label");
}

}  // namespace hpi
