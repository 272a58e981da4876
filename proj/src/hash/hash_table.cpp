#include "diner/hash_table.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "diner/binary_io.hpp"
#include "diner/errors.hpp"
#include "diner/rng.hpp"

namespace diner {

namespace {
constexpr std::uint32_t no_slot = std::numeric_limits<std::uint32_t>::max();
}

template <typename Real>
Matrix<Real> SparseGrad<Real>::to_dense(std::size_t length) const {
    Matrix<Real> dense(length, values.cols());
    for (std::size_t s = 0; s < rows.size(); ++s) {
        auto src = values.row(s);
        auto dst = dense.row(rows[s]);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return dense;
}

template <typename Real>
HashTable<Real>::HashTable(std::size_t length, std::size_t width)
    : entries_(length, width),
      first_moment_(length, width),
      second_moment_(length, width),
      row_steps_(length, 0),
      slot_(length, no_slot) {
    if (length == 0 || width == 0) {
        throw ValidationError("hash table: length and width must be at least 1");
    }
}

template <typename Real>
HashTable<Real> HashTable<Real>::init(std::size_t length, std::size_t width,
                                      const HashInitConfig& cfg) {
    HashTable table(length, width);
    if (cfg.mode == HashInit::uniform) {
        if (!(cfg.low < cfg.high)) {
            throw ValidationError("hash table: uniform init needs low < high");
        }
        Rng rng = make_rng(cfg.seed, "hash-init");
        std::uniform_real_distribution<double> dist(cfg.low, cfg.high);
        for (Real& v : table.entries_.values()) {
            v = static_cast<Real>(dist(rng));
        }
    }
    return table;
}

template <typename Real>
void HashTable<Real>::check_index(std::size_t index) const {
    if (index >= length()) {
        throw IndexError("hash table: index " + std::to_string(index) + " outside [0, " +
                         std::to_string(length()) + ")");
    }
}

template <typename Real>
Matrix<Real> HashTable<Real>::lookup(std::span<const std::size_t> indices) const {
    const std::size_t w = width();
    Matrix<Real> out(w, indices.size());
    for (std::size_t c = 0; c < indices.size(); ++c) {
        check_index(indices[c]);
        const Real* src = entries_.row(indices[c]).data();
        for (std::size_t k = 0; k < w; ++k) {
            out(k, c) = src[k];
        }
    }
    return out;
}

template <typename Real>
SparseGrad<Real> HashTable<Real>::scatter_grad(std::span<const std::size_t> indices,
                                               const Matrix<Real>& grad) {
    if (grad.rows() != width() || grad.cols() != indices.size()) {
        throw DimensionError("scatter_grad: gradient " + grad.shape_string() + " vs expected " +
                             std::to_string(width()) + "x" + std::to_string(indices.size()));
    }
    for (std::size_t idx : indices) {
        check_index(idx);
    }
    SparseGrad<Real> out;
    out.rows.reserve(indices.size());
    for (std::size_t idx : indices) {
        if (slot_[idx] == no_slot) {
            slot_[idx] = static_cast<std::uint32_t>(out.rows.size());
            out.rows.push_back(idx);
        }
    }
    const std::size_t w = width();
    out.values = Matrix<Real>(out.rows.size(), w);
    for (std::size_t c = 0; c < indices.size(); ++c) {
        Real* dst = out.values.row(slot_[indices[c]]).data();
        for (std::size_t k = 0; k < w; ++k) {
            dst[k] += grad(k, c);
        }
    }
    for (std::size_t idx : out.rows) {
        slot_[idx] = no_slot;
    }
    return out;
}

template <typename Real>
void HashTable<Real>::apply_adam(const SparseGrad<Real>& grad) {
    if (grad.values.cols() != width() || grad.values.rows() != grad.rows.size()) {
        throw DimensionError("hash table apply_adam: gradient " + grad.values.shape_string() +
                             " for " + std::to_string(grad.rows.size()) + " rows of width " +
                             std::to_string(width()));
    }
    if (!all_finite(grad.values)) {
        throw NumericError("hash table apply_adam: non-finite gradient in hash table");
    }
    for (std::size_t s = 0; s < grad.rows.size(); ++s) {
        const std::size_t r = grad.rows[s];
        check_index(r);
        const std::uint64_t step = ++row_steps_[r];
        adam_update<Real>(entries_.row(r), grad.values.row(s), first_moment_.row(r),
                          second_moment_.row(r), step, adam);
    }
}

template <typename Real>
void HashTable<Real>::reset_optimizer() {
    first_moment_.fill(Real(0));
    second_moment_.fill(Real(0));
    std::fill(row_steps_.begin(), row_steps_.end(), 0);
}

template <typename Real>
HashTable<Real> HashTable<Real>::with_extra_columns(std::size_t extra) const {
    HashTable out(length(), width() + extra);
    out.adam = adam;
    out.row_steps_ = row_steps_;
    for (std::size_t r = 0; r < length(); ++r) {
        for (std::size_t k = 0; k < width(); ++k) {
            out.entries_(r, k) = entries_(r, k);
            out.first_moment_(r, k) = first_moment_(r, k);
            out.second_moment_(r, k) = second_moment_(r, k);
        }
    }
    return out;
}

template <typename Real>
void save_table(const HashTable<Real>& table, std::ostream& os) {
    binio::write_magic(os, "DINR");
    binio::write_le<std::uint32_t>(os, table_format_version);
    binio::write_le<std::uint64_t>(os, table.length());
    binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(table.width()));
    binio::write_le<std::uint8_t>(os, binio::dtype_tag<Real>());
    for (Real v : table.entries().values()) {
        binio::write_le<Real>(os, v);
    }
    if (!os) {
        throw FormatError("save_table: write failed");
    }
}

template <typename Real>
HashTable<Real> load_table(std::istream& is) {
    binio::expect_magic(is, "DINR");
    const auto version = binio::read_le<std::uint32_t>(is, "table version");
    if (version != table_format_version) {
        throw FormatError("load_table: unsupported version " + std::to_string(version));
    }
    const auto length = binio::read_le<std::uint64_t>(is, "table length");
    const auto width = binio::read_le<std::uint32_t>(is, "table width");
    const auto dtype = binio::read_le<std::uint8_t>(is, "table dtype");
    if (dtype != binio::dtype_f32 && dtype != binio::dtype_f64) {
        throw FormatError("load_table: unknown dtype tag " + std::to_string(dtype));
    }
    HashTable<Real> table(length, width);
    for (Real& v : table.entries().values()) {
        v = dtype == binio::dtype_f32 ? static_cast<Real>(binio::read_le<float>(is, "table entry"))
                                      : static_cast<Real>(binio::read_le<double>(is, "table entry"));
    }
    return table;
}

#define DINER_INSTANTIATE(Real)                                      \
    template struct SparseGrad<Real>;                                \
    template class HashTable<Real>;                                  \
    template void save_table(const HashTable<Real>&, std::ostream&); \
    template HashTable<Real> load_table<Real>(std::istream&);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner
