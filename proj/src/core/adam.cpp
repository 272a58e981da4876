#include "diner/adam.hpp"

#include <string>

#include "diner/errors.hpp"

namespace diner {

void AdamConfig::validate() const {
    if (!(lr >= 0) || !std::isfinite(lr)) {
        throw ValidationError("adam: learning rate must be finite and non-negative");
    }
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
        throw ValidationError("adam: betas must lie in [0, 1)");
    }
    if (!(eps > 0)) {
        throw ValidationError("adam: eps must be positive");
    }
}

template <typename Real>
void adam_step(Matrix<Real>& param, const Matrix<Real>& grad, AdamState<Real>& state,
               std::string_view label) {
    require_same_shape(param, grad, "adam_step");
    require_same_shape(param, state.first_moment, "adam_step (first moment)");
    require_same_shape(param, state.second_moment, "adam_step (second moment)");
    if (!all_finite(grad)) {
        throw NumericError("adam_step: non-finite gradient in " + std::string(label));
    }
    ++state.step_count;
    adam_update<Real>(param.values(), grad.values(), state.first_moment.values(),
                      state.second_moment.values(), state.step_count, state.config);
}

template void adam_step(Matrix<float>&, const Matrix<float>&, AdamState<float>&, std::string_view);
template void adam_step(Matrix<double>&, const Matrix<double>&, AdamState<double>&,
                        std::string_view);

} // namespace diner
