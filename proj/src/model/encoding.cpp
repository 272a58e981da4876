#include "diner/encoding.hpp"

#include <cmath>
#include <numbers>

namespace diner {

template <typename Real>
Matrix<Real> encode(const PositionalEncoding& pe, const DenseMatrix& coords) {
    const std::size_t d_in = coords.rows();
    const std::size_t per_axis = 2 * pe.num_frequencies + (pe.include_input ? 1 : 0);
    Matrix<Real> out(d_in * per_axis, coords.cols());
    for (std::size_t a = 0; a < d_in; ++a) {
        std::size_t row = a * per_axis;
        if (pe.include_input) {
            for (std::size_t c = 0; c < coords.cols(); ++c) {
                out(row, c) = static_cast<Real>(coords(a, c));
            }
            ++row;
        }
        for (std::size_t k = 0; k < pe.num_frequencies; ++k) {
            const double freq = std::ldexp(std::numbers::pi, static_cast<int>(k));
            for (std::size_t c = 0; c < coords.cols(); ++c) {
                const double arg = freq * coords(a, c);
                out(row, c) = static_cast<Real>(std::sin(arg));
                out(row + 1, c) = static_cast<Real>(std::cos(arg));
            }
            row += 2;
        }
    }
    return out;
}

template Matrix<float> encode(const PositionalEncoding&, const DenseMatrix&);
template Matrix<double> encode(const PositionalEncoding&, const DenseMatrix&);

} // namespace diner
