#pragma once

#include <cstddef>

#include "diner/matrix.hpp"

namespace diner {

/// Per axis: the coordinate itself (optional), then
/// sin(2^k pi x), cos(2^k pi x) for k = 0..K-1.
struct PositionalEncoding {
    std::size_t num_frequencies = 10;
    bool include_input = true;

    [[nodiscard]] std::size_t output_width(std::size_t d_in) const {
        return d_in * (2 * num_frequencies + (include_input ? 1 : 0));
    }

    friend bool operator==(const PositionalEncoding&, const PositionalEncoding&) = default;
};

/// `coords` is d_in x batch with entries in [-1, 1].
template <typename Real>
[[nodiscard]] Matrix<Real> encode(const PositionalEncoding& pe, const DenseMatrix& coords);

} // namespace diner
