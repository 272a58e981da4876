#include "diner/model.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <string>

#include "diner/errors.hpp"

namespace diner {

template <typename Real>
Model<Real> make_model(const ModelSpec& spec, const GridIndexer& grid, std::size_t d_out,
                       std::uint64_t seed) {
    BackboneShape shape;
    shape.hidden_width = spec.hidden_width;
    shape.hidden_layers = spec.hidden_layers;
    shape.output_width = d_out;
    shape.hidden = spec.activation;
    switch (spec.kind) {
    case ModelKind::diner: {
        if (spec.table_width == 0) {
            throw ValidationError("model: hash table width must be at least 1");
        }
        shape.input_width = spec.table_width;
        HashInitConfig init = spec.hash_init;
        init.seed = seed;
        return DinerModel<Real>{HashTable<Real>::init(grid.size(), spec.table_width, init),
                                make_backbone<Real>(shape, seed)};
    }
    case ModelKind::positional: {
        PositionalEncoding pe{spec.pe_frequencies, true};
        shape.input_width = pe.output_width(grid.rank());
        return BaselineModel<Real>{grid, pe, true, make_backbone<Real>(shape, seed)};
    }
    case ModelKind::raw:
        shape.input_width = grid.rank();
        return BaselineModel<Real>{grid, PositionalEncoding{0, true}, false,
                                   make_backbone<Real>(shape, seed)};
    }
    throw ValidationError("model: unknown kind");
}

template <typename Real>
const Backbone<Real>& backbone_of(const Model<Real>& model) {
    return std::visit([](const auto& m) -> const Backbone<Real>& { return m.backbone; }, model);
}

template <typename Real>
Backbone<Real>& backbone_of(Model<Real>& model) {
    return std::visit([](auto& m) -> Backbone<Real>& { return m.backbone; }, model);
}

template <typename Real>
std::size_t model_length(const Model<Real>& model) {
    if (const auto* d = std::get_if<DinerModel<Real>>(&model)) {
        return d->table.length();
    }
    return std::get<BaselineModel<Real>>(model).grid.size();
}

template <typename Real>
void check_binding(const Model<Real>& model, const GridSignal& signal) {
    if (model_length(model) != signal.size()) {
        throw BindingError("model covers " + std::to_string(model_length(model)) +
                           " elements but the signal has " + std::to_string(signal.size()));
    }
    if (backbone_of(model).output_width() != signal.channels()) {
        throw BindingError("model emits " + std::to_string(backbone_of(model).output_width()) +
                           " channels but the signal has " + std::to_string(signal.channels()));
    }
    if (const auto* b = std::get_if<BaselineModel<Real>>(&model); b && b->grid != signal.grid()) {
        throw BindingError("baseline grid does not match the signal grid");
    }
}

template <typename Real>
Matrix<Real> model_inputs(const Model<Real>& model, std::span<const std::size_t> indices) {
    if (const auto* d = std::get_if<DinerModel<Real>>(&model)) {
        return d->table.lookup(indices);
    }
    const auto& b = std::get<BaselineModel<Real>>(model);
    DenseMatrix coords(b.grid.rank(), indices.size());
    for (std::size_t c = 0; c < indices.size(); ++c) {
        const auto x = b.grid.normalized(indices[c]);
        for (std::size_t a = 0; a < x.size(); ++a) {
            coords(a, c) = x[a];
        }
    }
    if (!b.encoded) {
        return matrix_cast<Real>(coords);
    }
    return encode<Real>(b.encoding, coords);
}

template <typename Real>
Matrix<Real> predict(const Model<Real>& model, std::span<const std::size_t> indices) {
    return backbone_predict(backbone_of(model), model_inputs(model, indices));
}

template <typename Real>
GridSignal predict_signal(const Model<Real>& model, const GridIndexer& grid) {
    if (grid.size() != model_length(model)) {
        throw BindingError("predict_signal: grid of " + std::to_string(grid.size()) +
                           " elements for a model of " + std::to_string(model_length(model)));
    }
    std::vector<std::size_t> all(grid.size());
    std::iota(all.begin(), all.end(), 0);
    const auto out = predict(model, all);
    return GridSignal(grid, transpose(matrix_cast<double>(out)));
}

template <typename Real>
GridSignal extract_learned_inr(const DinerModel<Real>& model,
                               const std::vector<std::size_t>& resolution) {
    const std::size_t width = model.table.width();
    if (resolution.size() != width) {
        throw DimensionError("extract_learned_inr: " + std::to_string(resolution.size()) +
                             " resolutions for a table of width " + std::to_string(width));
    }
    std::vector<double> lo(width), hi(width);
    std::vector<std::size_t> dims(width);
    for (std::size_t k = 0; k < width; ++k) {
        if (resolution[k] < 2) {
            throw ValidationError("extract_learned_inr: resolution must be at least 2 per axis");
        }
        double mn = static_cast<double>(model.table.entries()(0, k));
        double mx = mn;
        for (std::size_t r = 1; r < model.table.length(); ++r) {
            const double v = static_cast<double>(model.table.entries()(r, k));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        lo[k] = mn;
        hi[k] = mx;
        dims[k] = resolution[k];
        if (mn == mx) {
            std::cerr << "warning: mapped coordinate axis " << k
                      << " is degenerate; collapsing it to one sample\n";
            dims[k] = 1;
        }
    }
    const GridIndexer mesh(dims);
    Matrix<Real> points(width, mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const auto coord = mesh.unflatten(i);
        for (std::size_t k = 0; k < width; ++k) {
            const double t = dims[k] == 1 ? 0.0
                                          : static_cast<double>(coord[k]) /
                                                static_cast<double>(dims[k] - 1);
            points(k, i) = static_cast<Real>(dims[k] == 1 ? lo[k] : lo[k] + (hi[k] - lo[k]) * t);
        }
    }
    const auto out = backbone_predict(model.backbone, points);
    return GridSignal(mesh, transpose(matrix_cast<double>(out)));
}

template <typename Real>
DinerModel<Real> embed_width(const DinerModel<Real>& model, std::size_t extra) {
    if (extra == 0) {
        throw ValidationError("embed_width: extra dimensions must be at least 1");
    }
    DinerModel<Real> out{model.table.with_extra_columns(extra), model.backbone};
    const auto& w = model.backbone.layers.front().weight;
    Matrix<Real> wide(w.rows(), w.cols() + extra);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        for (std::size_t c = 0; c < w.cols(); ++c) {
            wide(r, c) = w(r, c);
        }
    }
    out.backbone.layers.front().weight = std::move(wide);
    return out;
}

template <typename Real>
DinerModel<Real> coordinate_table_model(const GridIndexer& grid, Backbone<Real> backbone) {
    if (backbone.input_width() != grid.rank()) {
        throw DimensionError("coordinate_table_model: backbone input width " +
                             std::to_string(backbone.input_width()) + " for a grid of rank " +
                             std::to_string(grid.rank()));
    }
    HashTable<Real> table(grid.size(), grid.rank());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.normalized(i);
        for (std::size_t a = 0; a < x.size(); ++a) {
            table.entries()(i, a) = static_cast<Real>(x[a]);
        }
    }
    return DinerModel<Real>{std::move(table), std::move(backbone)};
}

#define DINER_INSTANTIATE(Real)                                                                  \
    template Model<Real> make_model<Real>(const ModelSpec&, const GridIndexer&, std::size_t,     \
                                          std::uint64_t);                                        \
    template const Backbone<Real>& backbone_of(const Model<Real>&);                              \
    template Backbone<Real>& backbone_of(Model<Real>&);                                          \
    template std::size_t model_length(const Model<Real>&);                                       \
    template void check_binding(const Model<Real>&, const GridSignal&);                          \
    template Matrix<Real> model_inputs(const Model<Real>&, std::span<const std::size_t>);        \
    template Matrix<Real> predict(const Model<Real>&, std::span<const std::size_t>);             \
    template GridSignal predict_signal(const Model<Real>&, const GridIndexer&);                  \
    template GridSignal extract_learned_inr(const DinerModel<Real>&,                             \
                                            const std::vector<std::size_t>&);                    \
    template DinerModel<Real> embed_width(const DinerModel<Real>&, std::size_t);                 \
    template DinerModel<Real> coordinate_table_model(const GridIndexer&, Backbone<Real>);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner
