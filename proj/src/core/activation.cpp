#include "diner/activation.hpp"

#include <cmath>

#include "diner/errors.hpp"

namespace diner {

std::string to_string(ActivationKind kind) {
    switch (kind) {
    case ActivationKind::relu:
        return "relu";
    case ActivationKind::sine:
        return "sine";
    case ActivationKind::identity:
        return "identity";
    }
    return "unknown";
}

ActivationKind parse_activation_kind(std::string_view name) {
    if (name == "relu" || name == "mlp") {
        return ActivationKind::relu;
    }
    if (name == "sine" || name == "siren") {
        return ActivationKind::sine;
    }
    if (name == "identity" || name == "linear") {
        return ActivationKind::identity;
    }
    throw ValidationError("unknown activation '" + std::string(name) + "'");
}

template <typename Real>
Matrix<Real> activation(const Activation& act, const Matrix<Real>& x) {
    if (!all_finite(x)) {
        throw NumericError("activation: non-finite input");
    }
    Matrix<Real> out(x.rows(), x.cols());
    auto src = x.values();
    auto dst = out.values();
    switch (act.kind) {
    case ActivationKind::relu:
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst[i] = src[i] > Real(0) ? src[i] : Real(0);
        }
        break;
    case ActivationKind::sine: {
        if (!(act.omega0 > 0)) {
            throw NumericError("activation: sine frequency must be positive");
        }
        const Real w0 = static_cast<Real>(act.omega0);
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst[i] = std::sin(w0 * src[i]);
        }
        break;
    }
    case ActivationKind::identity:
        std::copy(src.begin(), src.end(), dst.begin());
        break;
    }
    return out;
}

template <typename Real>
void activation_backward_inplace(const Activation& act, const Matrix<Real>& pre_activation,
                                 Matrix<Real>& grad) {
    if (!pre_activation.same_shape(grad)) {
        throw InternalError("activation_backward: cache " + pre_activation.shape_string() +
                            " vs grad " + grad.shape_string());
    }
    auto pre = pre_activation.values();
    auto g = grad.values();
    switch (act.kind) {
    case ActivationKind::relu:
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(pre[i] > Real(0))) {
                g[i] = Real(0);
            }
        }
        break;
    case ActivationKind::sine: {
        const Real w0 = static_cast<Real>(act.omega0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] *= w0 * std::cos(w0 * pre[i]);
        }
        break;
    }
    case ActivationKind::identity:
        break;
    }
}

template Matrix<float> activation(const Activation&, const Matrix<float>&);
template Matrix<double> activation(const Activation&, const Matrix<double>&);
template void activation_backward_inplace(const Activation&, const Matrix<float>&, Matrix<float>&);
template void activation_backward_inplace(const Activation&, const Matrix<double>&,
                                          Matrix<double>&);

} // namespace diner
