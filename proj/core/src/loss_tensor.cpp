// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/loss_tensor.hpp"

#include "hpi/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace hpi {

GridArray::GridArray(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    std::size_t n = 1;
    for (auto s : shape_) {
        if (s == 0) throw Error(Errc::invalid_axes, "grid array axis of length 0");
        n *= s;
    }
    if (n != values_.size()) throw Error(Errc::length_mismatch, "grid array shape does not match value count");
}

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) noexcept {
    return values.empty() ? 0.0 : pairwise_sum(values) / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) noexcept {
    if (values.empty()) return 0.0;
    // Shifting by the first value keeps constant inputs exactly at zero.
    const double origin = values[0];
    std::vector<double> d(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d[i] = values[i] - origin;
    const double m = mean(d);
    for (auto& x : d) x = (x - m) * (x - m);
    return mean(d);
}

std::vector<std::vector<double>> group_by_axes(const GridArray& array, std::vector<std::size_t> key_axes) {
    std::sort(key_axes.begin(), key_axes.end());
    if (std::adjacent_find(key_axes.begin(), key_axes.end()) != key_axes.end()) {
        throw Error(Errc::invalid_axes, "axes repeat");
    }
    if (!key_axes.empty() && key_axes.back() >= array.rank()) throw Error(Errc::invalid_axes, "axis outside array rank");

    const auto& shape = array.shape();
    // Stride of each input axis inside the key space (0 for non-key axes).
    std::vector<std::size_t> key_stride(shape.size(), 0);
    std::size_t stride = 1;
    for (std::size_t k = key_axes.size(); k-- > 0;) {
        key_stride[key_axes[k]] = stride;
        stride *= shape[key_axes[k]];
    }
    const std::size_t key_count = stride;
    std::vector<std::vector<double>> buckets(key_count);
    for (auto& b : buckets) b.reserve(array.size() / key_count);

    std::vector<std::size_t> coord(shape.size(), 0);
    std::size_t key = 0;
    for (std::size_t i = 0; i < array.size(); ++i) {
        buckets[key].push_back(array[i]);
        // Odometer increment, keeping `key` in step.
        for (std::size_t a = shape.size(); a-- > 0;) {
            key += key_stride[a];
            if (++coord[a] < shape[a]) break;
            key -= key_stride[a] * shape[a];
            coord[a] = 0;
        }
    }
    return buckets;
}

GridArray marginal_mean(const GridArray& array, std::vector<std::size_t> keep_axes) {
    const auto buckets = group_by_axes(array, keep_axes);
    std::sort(keep_axes.begin(), keep_axes.end());
    std::vector<std::size_t> out_shape;
    for (auto a : keep_axes) out_shape.push_back(array.shape()[a]);
    std::vector<double> out(buckets.size());
    for (std::size_t k = 0; k < buckets.size(); ++k) out[k] = mean(buckets[k]);
    return GridArray(std::move(out_shape), std::move(out));
}

LossTensor::LossTensor(std::size_t replicates, std::vector<std::string> axis_names, std::vector<std::size_t> axis_sizes)
    : replicates_(replicates), names_(std::move(axis_names)), sizes_(std::move(axis_sizes)) {
    if (replicates_ < 1) throw Error(Errc::invalid_config, "tensor needs at least one replicate");
    if (names_.size() != sizes_.size() || names_.empty()) throw Error(Errc::invalid_axes, "axis names and sizes disagree");
    grid_size_ = 1;
    for (auto s : sizes_) {
        if (s == 0) throw Error(Errc::invalid_axes, "axis of length 0");
        grid_size_ *= s;
    }
    values_.assign(replicates_ * grid_size_, 0.0);
    state_.assign(values_.size(), CellState::empty);
}

LossTensor::LossTensor(std::size_t replicates, const HyperGrid& grid) : LossTensor(replicates, grid.names(), grid.sizes()) {}

std::size_t LossTensor::offset(std::size_t replicate, std::size_t flat) const {
    if (replicate >= replicates_ || flat >= grid_size_) {
        throw Error(Errc::index_out_of_range, "cell (" + std::to_string(replicate) + ", " + std::to_string(flat) + ") outside tensor");
    }
    return replicate * grid_size_ + flat;
}

void LossTensor::set(std::size_t replicate, std::size_t flat, double loss) {
    const auto at = offset(replicate, flat);
    if (!std::isfinite(loss)) throw Error(Errc::non_finite_loss, "cell (" + std::to_string(replicate) + ", " + std::to_string(flat) + ") loss is not finite");
    if (state_[at] != CellState::empty) throw Error(Errc::double_write, "cell (" + std::to_string(replicate) + ", " + std::to_string(flat) + ") already written");
    values_[at] = loss;
    state_[at] = CellState::filled;
}

void LossTensor::set(std::size_t replicate, const HyperGrid& grid, const Assignment& point, double loss) {
    if (grid.names() != names_ || grid.sizes() != sizes_) throw Error(Errc::axis_mismatch, "grid does not match tensor axes");
    set(replicate, flat_index(grid, point), loss);
}

double LossTensor::get(std::size_t replicate, std::size_t flat) const {
    const auto at = offset(replicate, flat);
    if (state_[at] == CellState::empty) throw Error(Errc::incomplete_tensor, "cell read before it was written");
    return values_[at];
}

bool LossTensor::is_set(std::size_t replicate, std::size_t flat) const {
    return state_[offset(replicate, flat)] != CellState::empty;
}

CellState LossTensor::state(std::size_t replicate, std::size_t flat) const { return state_[offset(replicate, flat)]; }

bool LossTensor::complete() const noexcept {
    return std::none_of(state_.begin(), state_.end(), [](CellState s) { return s == CellState::empty; });
}

std::size_t LossTensor::filled_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(state_.begin(), state_.end(), [](CellState s) { return s == CellState::filled; }));
}

std::size_t LossTensor::imputed_count() const noexcept {
    return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), CellState::imputed));
}

void LossTensor::impute(std::size_t replicate, std::size_t flat) {
    const auto at = offset(replicate, flat);
    if (state_[at] != CellState::empty) throw Error(Errc::double_write, "imputing a written cell");
    std::vector<double> pool;
    for (std::size_t t = 0; t < replicates_; ++t) {
        if (state_[t * grid_size_ + flat] == CellState::filled) pool.push_back(values_[t * grid_size_ + flat]);
    }
    if (pool.empty()) {
        for (std::size_t k = 0; k < grid_size_; ++k) {
            if (state_[replicate * grid_size_ + k] == CellState::filled) pool.push_back(values_[replicate * grid_size_ + k]);
        }
    }
    if (pool.empty()) throw Error(Errc::incomplete_tensor, "no evaluated cell to impute from");
    values_[at] = mean(pool);
    state_[at] = CellState::imputed;
}

void LossTensor::set_imputed(std::size_t replicate, std::size_t flat, double loss) {
    set(replicate, flat, loss);
    state_[offset(replicate, flat)] = CellState::imputed;
}

GridArray LossTensor::replicate(std::size_t t) const {
    if (t >= replicates_) throw Error(Errc::index_out_of_range, "replicate index outside tensor");
    for (std::size_t k = 0; k < grid_size_; ++k) {
        if (state_[t * grid_size_ + k] == CellState::empty) throw Error(Errc::incomplete_tensor, "replicate " + std::to_string(t) + " is incomplete");
    }
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(t * grid_size_);
    return GridArray(sizes_, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(grid_size_)));
}

GridArray replicate_mean(const LossTensor& tensor) {
    if (!tensor.complete()) throw Error(Errc::incomplete_tensor, std::to_string(tensor.cell_count() - tensor.filled_count() - tensor.imputed_count()) + " cells missing");
    const std::size_t g = tensor.grid_size();
    const std::size_t T = tensor.replicates();
    std::vector<double> out(g);
    std::vector<double> column(T);
    for (std::size_t k = 0; k < g; ++k) {
        for (std::size_t t = 0; t < T; ++t) column[t] = tensor.raw_values()[t * g + k];
        out[k] = mean(column);
    }
    return GridArray(tensor.axis_sizes(), std::move(out));
}

namespace {

constexpr char kMagic[8] = {'H', 'P', 'I', 'L', 'T', 'N', 'S', 'R'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double d) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &d, sizeof bits);
        u64(bits);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void raw(const char* p, std::size_t n) { buf_.append(p, n); }
    [[nodiscard]] const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double d = 0.0;
        std::memcpy(&d, &bits, sizeof d);
        return d;
    }
    std::string str() {
        const auto n = u32();
        need(n);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::string_view raw(std::size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    [[nodiscard]] std::size_t position() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw Error(Errc::malformed_checkpoint, "checkpoint truncated");
    }
    std::string_view data_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

void save_checkpoint(const std::string& path, const LossTensor& tensor, const TensorHeader& header) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u64(header.master_seed);
    w.str(std::string(metric_name(header.metric)));
    w.u64(header.subsample_size);
    w.u64(tensor.replicates());
    w.u32(static_cast<std::uint32_t>(tensor.axis_names().size()));
    for (std::size_t a = 0; a < tensor.axis_names().size(); ++a) {
        w.str(tensor.axis_names()[a]);
        w.u64(tensor.axis_sizes()[a]);
    }
    for (std::size_t t = 0; t < tensor.replicates(); ++t) {
        for (std::size_t k = 0; k < tensor.grid_size(); ++k) w.u8(static_cast<std::uint8_t>(tensor.state(t, k)));
    }
    for (const double v : tensor.raw_values()) w.f64(v);
    Writer out;
    out.raw(w.data().data(), w.data().size());
    out.u64(fnv1a(w.data()));

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(Errc::io_error, "cannot write checkpoint '" + tmp + "'");
        f.write(out.data().data(), static_cast<std::streamsize>(out.data().size()));
        if (!f) throw Error(Errc::io_error, "short write to '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

LossTensor load_checkpoint(const std::string& path, TensorHeader* header) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::missing_file, "cannot open checkpoint '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof kMagic + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
        throw Error(Errc::malformed_checkpoint, "'" + path + "' is not a tensor checkpoint");
    }
    const std::string_view body(bytes.data(), bytes.size() - 8);
    Reader tail(std::string_view(bytes).substr(bytes.size() - 8));
    if (tail.u64() != fnv1a(body)) throw Error(Errc::malformed_checkpoint, "checksum mismatch in '" + path + "'");

    Reader r(body);
    r.raw(sizeof kMagic);
    if (r.u32() != kVersion) throw Error(Errc::malformed_checkpoint, "unsupported checkpoint version");
    TensorHeader h;
    h.master_seed = r.u64();
    h.metric = parse_metric(r.str());
    h.subsample_size = r.u64();
    const auto T = r.u64();
    const auto q = r.u32();
    std::vector<std::string> names;
    std::vector<std::size_t> sizes;
    for (std::uint32_t a = 0; a < q; ++a) {
        names.push_back(r.str());
        sizes.push_back(r.u64());
    }
    LossTensor tensor(T, names, sizes);
    std::vector<std::uint8_t> states(tensor.cell_count());
    for (auto& s : states) {
        s = r.u8();
        if (s > 2) throw Error(Errc::malformed_checkpoint, "bad cell state");
    }
    for (std::size_t k = 0; k < tensor.cell_count(); ++k) {
        const double v = r.f64();
        const auto t = k / tensor.grid_size();
        const auto flat = k % tensor.grid_size();
        if (states[k] == 1) tensor.set(t, flat, v);
        else if (states[k] == 2) tensor.set_imputed(t, flat, v);
    }
    if (r.position() != body.size()) throw Error(Errc::malformed_checkpoint, "trailing bytes in checkpoint");
    if (header) *header = h;
    return tensor;
}

}  // namespace hpi
