#include "diner/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "diner/errors.hpp"

namespace diner {

namespace {

template <typename Real>
struct VecOf;
template <>
struct VecOf<double> {
    typedef double type __attribute__((vector_size(32)));
};
template <>
struct VecOf<float> {
    typedef float type __attribute__((vector_size(32)));
};
template <typename Real>
using Vec = typename VecOf<Real>::type;

template <typename Real>
inline Vec<Real> load(const Real* p) {
    Vec<Real> v;
    std::memcpy(&v, p, sizeof(v));
    return v;
}

template <typename Real>
inline void store(Real* p, const Vec<Real>& v) {
    std::memcpy(p, &v, sizeof(v));
}

// C = A * B for row-major blocks with leading dimensions. Every entry of C
// is accumulated from +0 over k = 0..p-1 in order, whatever the blocking,
// so results do not depend on matrix sizes or on batch composition.
template <typename Real>
void gemm(const Real* a, std::size_t lda, const Real* b, std::size_t ldb, Real* c,
          std::size_t ldc, std::size_t m, std::size_t p, std::size_t n) {
    constexpr std::size_t lanes = sizeof(Vec<Real>) / sizeof(Real);
    constexpr std::size_t rb = 4;
    constexpr std::size_t cb = 2 * lanes;
    // The current column panel of B is packed contiguously; walking B's rows
    // directly strides by whole rows and thrashes the cache.
    std::vector<Real> panel(p * cb);
    std::size_t j = 0;
    for (; j + cb <= n; j += cb) {
        for (std::size_t k = 0; k < p; ++k) {
            std::memcpy(panel.data() + k * cb, b + k * ldb + j, cb * sizeof(Real));
        }
        std::size_t i = 0;
        for (; i + rb <= m; i += rb) {
            Vec<Real> acc[rb][2] = {};
            for (std::size_t k = 0; k < p; ++k) {
                const Vec<Real> b0 = load(panel.data() + k * cb);
                const Vec<Real> b1 = load(panel.data() + k * cb + lanes);
                for (std::size_t ii = 0; ii < rb; ++ii) {
                    const Real av = a[(i + ii) * lda + k];
                    acc[ii][0] += av * b0;
                    acc[ii][1] += av * b1;
                }
            }
            for (std::size_t ii = 0; ii < rb; ++ii) {
                store(c + (i + ii) * ldc + j, acc[ii][0]);
                store(c + (i + ii) * ldc + j + lanes, acc[ii][1]);
            }
        }
        for (; i < m; ++i) {
            Vec<Real> acc0 = {};
            Vec<Real> acc1 = {};
            for (std::size_t k = 0; k < p; ++k) {
                const Real av = a[i * lda + k];
                acc0 += av * load(panel.data() + k * cb);
                acc1 += av * load(panel.data() + k * cb + lanes);
            }
            store(c + i * ldc + j, acc0);
            store(c + i * ldc + j + lanes, acc1);
        }
    }
    for (; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            Real acc = 0;
            for (std::size_t k = 0; k < p; ++k) {
                acc += a[i * lda + k] * b[k * ldb + j];
            }
            c[i * ldc + j] = acc;
        }
    }
}

} // namespace

template <typename Real>
bool all_finite(const Matrix<Real>& m) {
    for (Real v : m.values()) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

template <typename Real>
void require_same_shape(const Matrix<Real>& a, const Matrix<Real>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    }
}

template <typename Real>
Matrix<Real> linear_forward(const Matrix<Real>& weight, const Matrix<Real>& bias,
                            const Matrix<Real>& input) {
    if (weight.cols() != input.rows()) {
        throw DimensionError("linear_forward: weight " + weight.shape_string() +
                             " incompatible with input " + input.shape_string());
    }
    if (bias.rows() != weight.rows() || bias.cols() != 1) {
        throw DimensionError("linear_forward: bias " + bias.shape_string() +
                             " incompatible with weight " + weight.shape_string());
    }
    const std::size_t out_rows = weight.rows();
    const std::size_t inner = weight.cols();
    const std::size_t batch = input.cols();
    Matrix<Real> out(out_rows, batch);
    gemm(weight.values().data(), inner, input.values().data(), batch, out.values().data(), batch,
         out_rows, inner, batch);
    for (std::size_t r = 0; r < out_rows; ++r) {
        const Real b = bias(r, 0);
        for (Real& v : out.row(r)) {
            v += b;
        }
    }
    return out;
}

template <typename Real>
LinearGrads<Real> linear_backward(const Matrix<Real>& weight, const Matrix<Real>& input,
                                  const Matrix<Real>& grad_output, bool need_input_grad) {
    if (weight.cols() != input.rows() || grad_output.rows() != weight.rows() ||
        grad_output.cols() != input.cols()) {
        throw InternalError("linear_backward: inconsistent shapes weight " +
                            weight.shape_string() + ", input " + input.shape_string() +
                            ", grad " + grad_output.shape_string());
    }
    const std::size_t out_rows = weight.rows();
    const std::size_t inner = weight.cols();
    const std::size_t batch = input.cols();

    LinearGrads<Real> grads;
    grads.weight = Matrix<Real>(out_rows, inner);
    grads.bias = Matrix<Real>(out_rows, 1);

    // dW = G * X^T accumulates over the batch in column order.
    const Matrix<Real> input_t = transpose(input);
    gemm(grad_output.values().data(), batch, input_t.values().data(), inner,
         grads.weight.values().data(), inner, out_rows, batch, inner);
    for (std::size_t r = 0; r < out_rows; ++r) {
        Real gb = 0;
        for (Real g : grad_output.row(r)) {
            gb += g;
        }
        grads.bias(r, 0) = gb;
    }

    if (need_input_grad) {
        // dX = W^T * G accumulates over output rows in order.
        const Matrix<Real> weight_t = transpose(weight);
        grads.input = Matrix<Real>(inner, batch);
        gemm(weight_t.values().data(), out_rows, grad_output.values().data(), batch,
             grads.input.values().data(), batch, inner, out_rows, batch);
    }
    return grads;
}

template <typename Real>
LossResult<Real> mse_loss(const Matrix<Real>& pred, const Matrix<Real>& target) {
    require_same_shape(pred, target, "mse_loss");
    LossResult<Real> result;
    result.grad = Matrix<Real>(pred.rows(), pred.cols());
    if (pred.empty()) {
        return result;
    }
    const auto p = pred.values();
    const auto t = target.values();
    auto g = result.grad.values();
    const Real count = static_cast<Real>(p.size());
    Real sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Real d = p[i] - t[i];
        sum += d * d;
        g[i] = Real(2) * d / count;
    }
    result.loss = sum / count;
    return result;
}

#define DINER_INSTANTIATE(Real)                                                              \
    template bool all_finite(const Matrix<Real>&);                                           \
    template void require_same_shape(const Matrix<Real>&, const Matrix<Real>&, const char*); \
    template Matrix<Real> linear_forward(const Matrix<Real>&, const Matrix<Real>&,           \
                                         const Matrix<Real>&);                               \
    template LinearGrads<Real> linear_backward(const Matrix<Real>&, const Matrix<Real>&,     \
                                               const Matrix<Real>&, bool);                   \
    template LossResult<Real> mse_loss(const Matrix<Real>&, const Matrix<Real>&);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner
