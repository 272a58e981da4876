#include "diner/backbone.hpp"

#include <cmath>
#include <string>

#include "diner/errors.hpp"
#include "diner/rng.hpp"

namespace diner {

template <typename Real>
std::size_t Backbone<Real>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        n += layer.weight.size() + layer.bias.size();
    }
    return n;
}

template <typename Real>
void Backbone<Real>::validate() const {
    if (layers.empty()) {
        throw ValidationError("backbone: needs at least one layer");
    }
    for (std::size_t j = 0; j < layers.size(); ++j) {
        const auto& layer = layers[j];
        if (layer.bias.rows() != layer.weight.rows() || layer.bias.cols() != 1) {
            throw ValidationError("backbone: layer " + std::to_string(j) + " bias " +
                                  layer.bias.shape_string() + " does not match weight " +
                                  layer.weight.shape_string());
        }
        if (j > 0 && layers[j - 1].weight.rows() != layer.weight.cols()) {
            throw ValidationError("backbone: layer " + std::to_string(j) + " expects width " +
                                  std::to_string(layer.weight.cols()) + " but previous emits " +
                                  std::to_string(layers[j - 1].weight.rows()));
        }
    }
}

template <typename Real>
Backbone<Real> make_backbone(const BackboneShape& shape, std::uint64_t seed) {
    if (shape.input_width == 0 || shape.output_width == 0 ||
        (shape.hidden_layers > 0 && shape.hidden_width == 0)) {
        throw ValidationError("backbone: widths must be positive");
    }
    Backbone<Real> net;
    net.hidden = shape.hidden;
    Rng rng = make_rng(seed, "init");

    std::vector<std::size_t> widths{shape.input_width};
    for (std::size_t j = 0; j < shape.hidden_layers; ++j) {
        widths.push_back(shape.hidden_width);
    }
    widths.push_back(shape.output_width);

    const bool sine = shape.hidden.kind == ActivationKind::sine;
    for (std::size_t j = 0; j + 1 < widths.size(); ++j) {
        const std::size_t fan_in = widths[j];
        const double f = static_cast<double>(fan_in);
        double weight_bound = 1.0 / std::sqrt(f);
        if (sine) {
            weight_bound = j == 0 ? 1.0 / f : std::sqrt(6.0 / f) / shape.hidden.omega0;
        }
        const double bias_bound = 1.0 / std::sqrt(f);

        Layer<Real> layer{Matrix<Real>(widths[j + 1], fan_in), Matrix<Real>(widths[j + 1], 1)};
        std::uniform_real_distribution<double> wdist(-weight_bound, weight_bound);
        std::uniform_real_distribution<double> bdist(-bias_bound, bias_bound);
        for (Real& w : layer.weight.values()) {
            w = static_cast<Real>(wdist(rng));
        }
        for (Real& b : layer.bias.values()) {
            b = static_cast<Real>(bdist(rng));
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

template <typename Real>
ForwardTrace<Real> backbone_forward(const Backbone<Real>& net, Matrix<Real> input) {
    if (net.layers.empty() || input.rows() != net.input_width()) {
        throw DimensionError("backbone_forward: input " + input.shape_string() +
                             " does not match network input width " +
                             std::to_string(net.layers.empty() ? 0 : net.input_width()));
    }
    ForwardTrace<Real> trace;
    trace.input = std::move(input);
    trace.layers.reserve(net.layers.size());
    const Matrix<Real>* z = &trace.input;
    for (std::size_t j = 0; j < net.layers.size(); ++j) {
        const auto& layer = net.layers[j];
        LayerCache<Real> cache;
        cache.pre_activation = linear_forward(layer.weight, layer.bias, *z);
        if (j + 1 < net.layers.size()) {
            try {
                cache.post_activation = activation(net.hidden, cache.pre_activation);
            } catch (const NumericError& e) {
                throw NumericError("layer " + std::to_string(j) + ": " + e.what());
            }
        } else {
            cache.post_activation = cache.pre_activation;
        }
        trace.layers.push_back(std::move(cache));
        z = &trace.layers.back().post_activation;
    }
    return trace;
}

template <typename Real>
Matrix<Real> backbone_predict(const Backbone<Real>& net, const Matrix<Real>& input) {
    if (net.layers.empty() || input.rows() != net.input_width()) {
        throw DimensionError("backbone_predict: input " + input.shape_string() +
                             " does not match network input width");
    }
    Matrix<Real> z = input;
    for (std::size_t j = 0; j < net.layers.size(); ++j) {
        z = linear_forward(net.layers[j].weight, net.layers[j].bias, z);
        if (j + 1 < net.layers.size()) {
            z = activation(net.hidden, z);
        }
    }
    return z;
}

template <typename Real>
BackboneGrads<Real> backbone_backward(const Backbone<Real>& net, const ForwardTrace<Real>& trace,
                                      const Matrix<Real>& grad_output, bool need_input_grad) {
    const std::size_t depth = net.layers.size();
    if (trace.layers.size() != depth) {
        throw InternalError("backbone_backward: trace has " + std::to_string(trace.layers.size()) +
                            " layers, network has " + std::to_string(depth));
    }
    if (!grad_output.same_shape(trace.output())) {
        throw InternalError("backbone_backward: grad " + grad_output.shape_string() +
                            " vs output " + trace.output().shape_string());
    }
    BackboneGrads<Real> grads;
    grads.weight.resize(depth);
    grads.bias.resize(depth);

    Matrix<Real> delta = grad_output;
    for (std::size_t jj = depth; jj-- > 0;) {
        if (jj + 1 < depth) {
            activation_backward_inplace(net.hidden, trace.layers[jj].pre_activation, delta);
        }
        const Matrix<Real>& z_prev = jj == 0 ? trace.input : trace.layers[jj - 1].post_activation;
        const bool want_input = jj > 0 || need_input_grad;
        auto lg = linear_backward(net.layers[jj].weight, z_prev, delta, want_input);
        grads.weight[jj] = std::move(lg.weight);
        grads.bias[jj] = std::move(lg.bias);
        delta = std::move(lg.input);
    }
    if (need_input_grad) {
        grads.input = std::move(delta);
    }
    return grads;
}

#define DINER_INSTANTIATE(Real)                                                                 \
    template struct Backbone<Real>;                                                             \
    template Backbone<Real> make_backbone<Real>(const BackboneShape&, std::uint64_t);           \
    template ForwardTrace<Real> backbone_forward(const Backbone<Real>&, Matrix<Real>);          \
    template Matrix<Real> backbone_predict(const Backbone<Real>&, const Matrix<Real>&);         \
    template BackboneGrads<Real> backbone_backward(const Backbone<Real>&,                       \
                                                   const ForwardTrace<Real>&,                   \
                                                   const Matrix<Real>&, bool);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner
