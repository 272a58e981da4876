#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

#include "diner/matrix.hpp"

namespace diner {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

template <typename Real>
struct AdamState {
    Matrix<Real> first_moment;
    Matrix<Real> second_moment;
    std::uint64_t step_count = 0;
    AdamConfig config;

    static AdamState zeros_like(const Matrix<Real>& param, AdamConfig cfg = {}) {
        return {Matrix<Real>(param.rows(), param.cols()), Matrix<Real>(param.rows(), param.cols()),
                0, cfg};
    }
};

/// Bias-corrected Adam update for one contiguous block of parameters whose
/// moments have already seen `step - 1` updates.
template <typename Real>
void adam_update(std::span<Real> param, std::span<const Real> grad, std::span<Real> m,
                 std::span<Real> v, std::uint64_t step, const AdamConfig& cfg) {
    const Real b1 = static_cast<Real>(cfg.beta1);
    const Real b2 = static_cast<Real>(cfg.beta2);
    const Real lr = static_cast<Real>(cfg.lr);
    const Real eps = static_cast<Real>(cfg.eps);
    const Real c1 = static_cast<Real>(1.0 - std::pow(cfg.beta1, static_cast<double>(step)));
    const Real c2 = static_cast<Real>(1.0 - std::pow(cfg.beta2, static_cast<double>(step)));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const Real g = grad[i];
        m[i] = b1 * m[i] + (Real(1) - b1) * g;
        v[i] = b2 * v[i] + (Real(1) - b2) * g * g;
        const Real m_hat = m[i] / c1;
        const Real v_hat = v[i] / c2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

/// One Adam step on a dense parameter. Throws NumericError naming `label`
/// when the gradient holds non-finite values; param and state are then
/// left untouched.
template <typename Real>
void adam_step(Matrix<Real>& param, const Matrix<Real>& grad, AdamState<Real>& state,
               std::string_view label = "parameter");

} // namespace diner
