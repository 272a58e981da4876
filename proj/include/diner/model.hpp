#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "diner/backbone.hpp"
#include "diner/encoding.hpp"
#include "diner/grid.hpp"
#include "diner/hash_table.hpp"
#include "diner/signal.hpp"

namespace diner {

/// Hash table of mapped coordinates feeding a backbone whose input width
/// equals the table width. Elements are addressed by flattened grid index
/// only; there is no interpolation between table rows.
template <typename Real>
struct DinerModel {
    HashTable<Real> table;
    Backbone<Real> backbone;
};

/// Coordinate network baseline: normalized grid coordinates, optionally
/// positionally encoded, into a backbone.
template <typename Real>
struct BaselineModel {
    GridIndexer grid;
    PositionalEncoding encoding;
    bool encoded = true; // false feeds raw normalized coordinates
    Backbone<Real> backbone;
};

template <typename Real>
using Model = std::variant<DinerModel<Real>, BaselineModel<Real>>;

enum class ModelKind { diner, positional, raw };

struct ModelSpec {
    ModelKind kind = ModelKind::diner;
    std::size_t hidden_width = 64;
    std::size_t hidden_layers = 2;
    Activation activation = Activation::relu();
    std::size_t table_width = 2;
    HashInitConfig hash_init{};
    std::size_t pe_frequencies = 10;
};

template <typename Real>
[[nodiscard]] Model<Real> make_model(const ModelSpec& spec, const GridIndexer& grid,
                                     std::size_t d_out, std::uint64_t seed);

template <typename Real>
[[nodiscard]] const Backbone<Real>& backbone_of(const Model<Real>& model);
template <typename Real>
[[nodiscard]] Backbone<Real>& backbone_of(Model<Real>& model);

/// Number of grid elements the model is bound to.
template <typename Real>
[[nodiscard]] std::size_t model_length(const Model<Real>& model);

/// Throws BindingError unless the model covers `signal` element-for-element.
template <typename Real>
void check_binding(const Model<Real>& model, const GridSignal& signal);

/// Backbone input for the given elements (input_width x batch).
template <typename Real>
[[nodiscard]] Matrix<Real> model_inputs(const Model<Real>& model,
                                        std::span<const std::size_t> indices);

/// Deterministic forward pass (d_out x batch).
template <typename Real>
[[nodiscard]] Matrix<Real> predict(const Model<Real>& model, std::span<const std::size_t> indices);

/// Prediction for every element, laid out on `grid`.
template <typename Real>
[[nodiscard]] GridSignal predict_signal(const Model<Real>& model, const GridIndexer& grid);

/// Evenly meshes the bounding box of the mapped coordinates (axis k spans
/// [min, max] of table column k) and evaluates the backbone there. A
/// degenerate axis collapses to one sample and a warning is printed.
/// Values are not clamped.
template <typename Real>
[[nodiscard]] GridSignal extract_learned_inr(const DinerModel<Real>& model,
                                             const std::vector<std::size_t>& resolution);

/// Adds `extra` zero columns to the table and matching zero input columns
/// to the first layer; predictions are unchanged bit for bit.
template <typename Real>
[[nodiscard]] DinerModel<Real> embed_width(const DinerModel<Real>& model, std::size_t extra);

/// DINER model whose table holds each element's normalized grid coordinate.
/// Trained with a frozen table it reproduces the raw-coordinate baseline.
template <typename Real>
[[nodiscard]] DinerModel<Real> coordinate_table_model(const GridIndexer& grid,
                                                      Backbone<Real> backbone);

} // namespace diner
