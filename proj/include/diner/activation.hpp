#pragma once

#include <string>
#include <string_view>

#include "diner/matrix.hpp"

namespace diner {

enum class ActivationKind { relu, sine, identity };

struct Activation {
    ActivationKind kind = ActivationKind::relu;
    double omega0 = 30.0; // sine only

    static Activation relu() { return {ActivationKind::relu, 30.0}; }
    static Activation sine(double omega0 = 30.0) { return {ActivationKind::sine, omega0}; }
    static Activation identity() { return {ActivationKind::identity, 30.0}; }

    friend bool operator==(const Activation&, const Activation&) = default;
};

[[nodiscard]] std::string to_string(ActivationKind kind);
[[nodiscard]] ActivationKind parse_activation_kind(std::string_view name);

/// Element-wise max(0,x), sin(omega0 x) or x. Throws NumericError on
/// non-finite input or a non-positive omega0.
template <typename Real>
[[nodiscard]] Matrix<Real> activation(const Activation& act, const Matrix<Real>& x);

/// Multiplies grad by the activation derivative evaluated at pre_activation.
/// ReLU uses the subgradient 0 at exactly 0.
template <typename Real>
void activation_backward_inplace(const Activation& act, const Matrix<Real>& pre_activation,
                                 Matrix<Real>& grad);

} // namespace diner
