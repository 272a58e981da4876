#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "diner/activation.hpp"
#include "diner/matrix.hpp"

namespace diner {

/// Layer sizes of a coordinate network. `hidden_layers` counts the hidden
/// activations, so 2x64 means input -> 64 -> 64 -> output.
struct BackboneShape {
    std::size_t input_width = 2;
    std::size_t hidden_width = 64;
    std::size_t hidden_layers = 2;
    std::size_t output_width = 3;
    Activation hidden = Activation::relu();
};

template <typename Real>
struct Layer {
    Matrix<Real> weight; // out x in
    Matrix<Real> bias;   // out x 1

    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Hidden layers apply `hidden`; the last layer is linear.
template <typename Real>
struct Backbone {
    std::vector<Layer<Real>> layers;
    Activation hidden = Activation::relu();

    [[nodiscard]] std::size_t input_width() const { return layers.front().weight.cols(); }
    [[nodiscard]] std::size_t output_width() const { return layers.back().weight.rows(); }
    [[nodiscard]] std::size_t parameter_count() const;

    /// Throws ValidationError unless widths chain and there is at least one layer.
    void validate() const;

    friend bool operator==(const Backbone&, const Backbone&) = default;
};

/// MLP layers draw weights and biases from U(+-1/sqrt(fan_in)). Sine
/// backbones draw first-layer weights from U(+-1/fan_in) and later weights
/// from U(+-sqrt(6/fan_in)/omega0).
template <typename Real>
[[nodiscard]] Backbone<Real> make_backbone(const BackboneShape& shape, std::uint64_t seed);

template <typename Real>
struct LayerCache {
    Matrix<Real> pre_activation;
    Matrix<Real> post_activation;
};

template <typename Real>
struct ForwardTrace {
    Matrix<Real> input;
    std::vector<LayerCache<Real>> layers;

    [[nodiscard]] const Matrix<Real>& output() const { return layers.back().post_activation; }
};

template <typename Real>
[[nodiscard]] ForwardTrace<Real> backbone_forward(const Backbone<Real>& net, Matrix<Real> input);

/// Forward pass without keeping the intermediate layers.
template <typename Real>
[[nodiscard]] Matrix<Real> backbone_predict(const Backbone<Real>& net, const Matrix<Real>& input);

template <typename Real>
struct BackboneGrads {
    std::vector<Matrix<Real>> weight;
    std::vector<Matrix<Real>> bias;
    Matrix<Real> input; // empty unless requested
};

/// Reverse pass through a trace produced by backbone_forward on `net`.
template <typename Real>
[[nodiscard]] BackboneGrads<Real> backbone_backward(const Backbone<Real>& net,
                                                    const ForwardTrace<Real>& trace,
                                                    const Matrix<Real>& grad_output,
                                                    bool need_input_grad = true);

} // namespace diner
