#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace diner {

/// Dense row-major matrix. Columns are batch samples throughout the library,
/// rows are features.
template <typename Real>
class Matrix {
public:
    using value_type = Real;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, Real fill = Real(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    Real& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Real& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<Real> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const Real> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    [[nodiscard]] std::span<Real> values() { return data_; }
    [[nodiscard]] std::span<const Real> values() const { return data_; }

    void fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

    [[nodiscard]] std::string shape_string() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    [[nodiscard]] bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Real> data_;
};

using DenseMatrix = Matrix<double>;

template <typename Real>
[[nodiscard]] Matrix<Real> transpose(const Matrix<Real>& m) {
    Matrix<Real> out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(c, r) = m(r, c);
        }
    }
    return out;
}

template <typename To, typename From>
[[nodiscard]] Matrix<To> matrix_cast(const Matrix<From>& m) {
    Matrix<To> out(m.rows(), m.cols());
    auto src = m.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<To>(src[i]);
    }
    return out;
}

template <typename Real>
[[nodiscard]] bool all_finite(const Matrix<Real>& m);

/// Throws DimensionError naming both shapes unless they agree.
template <typename Real>
void require_same_shape(const Matrix<Real>& a, const Matrix<Real>& b, const char* what);

/// W * X + b with a fixed summation order: each output entry accumulates
/// k = 0..K-1 sequentially starting from +0, then adds the bias.
template <typename Real>
[[nodiscard]] Matrix<Real> linear_forward(const Matrix<Real>& weight, const Matrix<Real>& bias,
                                          const Matrix<Real>& input);

/// Gradients of a linear layer given dL/d(output).
template <typename Real>
struct LinearGrads {
    Matrix<Real> weight;
    Matrix<Real> bias;
    Matrix<Real> input;
};

template <typename Real>
[[nodiscard]] LinearGrads<Real> linear_backward(const Matrix<Real>& weight,
                                                const Matrix<Real>& input,
                                                const Matrix<Real>& grad_output,
                                                bool need_input_grad = true);

template <typename Real>
struct LossResult {
    Real loss = 0;
    Matrix<Real> grad;
};

/// Mean squared error over every entry; gradient 2(pred - target)/count.
template <typename Real>
[[nodiscard]] LossResult<Real> mse_loss(const Matrix<Real>& pred, const Matrix<Real>& target);

} // namespace diner
