#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "diner/adam.hpp"
#include "diner/matrix.hpp"

namespace diner {

enum class HashInit { zeros, uniform };

struct HashInitConfig {
    HashInit mode = HashInit::zeros;
    double low = -1e-2;
    double high = 1e-2;
    std::uint64_t seed = 0;
};

/// Row gradients for the table rows touched by one batch, in order of first
/// appearance. Rows absent from `rows` have zero gradient.
template <typename Real>
struct SparseGrad {
    std::vector<std::size_t> rows;
    Matrix<Real> values; // rows.size() x width

    [[nodiscard]] Matrix<Real> to_dense(std::size_t length) const;
};

/// Collision-free learnable table with one row (a mapped coordinate of
/// width L) per signal element. Each row keeps its own Adam moments and
/// step count so a sparse update leaves untouched rows bit-identical.
template <typename Real>
class HashTable {
public:
    HashTable() = default;
    HashTable(std::size_t length, std::size_t width);

    static HashTable init(std::size_t length, std::size_t width, const HashInitConfig& cfg = {});

    [[nodiscard]] std::size_t length() const { return entries_.rows(); }
    [[nodiscard]] std::size_t width() const { return entries_.cols(); }

    [[nodiscard]] const Matrix<Real>& entries() const { return entries_; }
    [[nodiscard]] Matrix<Real>& entries() { return entries_; }
    [[nodiscard]] const Matrix<Real>& first_moment() const { return first_moment_; }
    [[nodiscard]] const Matrix<Real>& second_moment() const { return second_moment_; }
    [[nodiscard]] const std::vector<std::uint64_t>& row_steps() const { return row_steps_; }

    AdamConfig adam;

    /// Gathers rows into an L x batch matrix (column c = row indices[c]).
    [[nodiscard]] Matrix<Real> lookup(std::span<const std::size_t> indices) const;

    /// Accumulates the L x batch input gradient into per-row gradients.
    /// Duplicate indices sum in batch order. Cost is O(batch * L).
    [[nodiscard]] SparseGrad<Real> scatter_grad(std::span<const std::size_t> indices,
                                                const Matrix<Real>& grad);

    /// Adam update of the rows in `grad` only.
    void apply_adam(const SparseGrad<Real>& grad);

    /// Resets optimizer moments and step counters.
    void reset_optimizer();

    /// Copy with `extra` zero-valued columns appended.
    [[nodiscard]] HashTable with_extra_columns(std::size_t extra) const;

private:
    void check_index(std::size_t index) const;

    Matrix<Real> entries_;
    Matrix<Real> first_moment_;
    Matrix<Real> second_moment_;
    std::vector<std::uint64_t> row_steps_;
    // Per-row slot in the current SparseGrad; reset after each scatter.
    std::vector<std::uint32_t> slot_;
};

inline constexpr std::uint32_t table_format_version = 1;

/// Flat little-endian table blob: "DINR", version u32, N u64, L u32,
/// dtype u8, then N*L values row-major. Optimizer state is not stored.
template <typename Real>
void save_table(const HashTable<Real>& table, std::ostream& os);

/// Reads a table blob, converting from the stored dtype when necessary.
template <typename Real>
[[nodiscard]] HashTable<Real> load_table(std::istream& is);

} // namespace diner
