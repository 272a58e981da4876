#include <fstream>

#include "diner/binary_io.hpp"
#include "diner/checkpoint.hpp"
#include "diner/errors.hpp"

namespace diner {

namespace {

constexpr std::uint32_t checkpoint_version = 1;
constexpr std::uint8_t kind_diner = 0;
constexpr std::uint8_t kind_positional = 1;
constexpr std::uint8_t kind_raw = 2;

template <typename Real>
void write_matrix(std::ostream& os, const Matrix<Real>& m) {
    binio::write_le<std::uint64_t>(os, m.rows());
    binio::write_le<std::uint64_t>(os, m.cols());
    for (Real v : m.values()) {
        binio::write_le<Real>(os, v);
    }
}

template <typename Real>
Matrix<Real> read_matrix(std::istream& is, std::uint8_t dtype) {
    const auto rows = binio::read_le<std::uint64_t>(is, "matrix rows");
    const auto cols = binio::read_le<std::uint64_t>(is, "matrix cols");
    if (rows * cols > (std::uint64_t{1} << 32)) {
        throw FormatError("checkpoint: implausible matrix shape " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    }
    Matrix<Real> m(rows, cols);
    for (Real& v : m.values()) {
        v = dtype == binio::dtype_f32 ? static_cast<Real>(binio::read_le<float>(is, "matrix value"))
                                      : static_cast<Real>(binio::read_le<double>(is, "matrix value"));
    }
    return m;
}

template <typename Real>
void write_backbone(std::ostream& os, const Backbone<Real>& net) {
    binio::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(net.hidden.kind));
    binio::write_le<double>(os, net.hidden.omega0);
    binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers.size()));
    for (const auto& layer : net.layers) {
        write_matrix(os, layer.weight);
        write_matrix(os, layer.bias);
    }
}

template <typename Real>
Backbone<Real> read_backbone(std::istream& is, std::uint8_t dtype) {
    Backbone<Real> net;
    const auto kind = binio::read_le<std::uint8_t>(is, "activation tag");
    if (kind > static_cast<std::uint8_t>(ActivationKind::identity)) {
        throw FormatError("checkpoint: unknown activation tag " + std::to_string(kind));
    }
    net.hidden.kind = static_cast<ActivationKind>(kind);
    net.hidden.omega0 = binio::read_le<double>(is, "omega0");
    const auto count = binio::read_le<std::uint32_t>(is, "layer count");
    for (std::uint32_t j = 0; j < count; ++j) {
        Layer<Real> layer;
        layer.weight = read_matrix<Real>(is, dtype);
        layer.bias = read_matrix<Real>(is, dtype);
        net.layers.push_back(std::move(layer));
    }
    try {
        net.validate();
    } catch (const std::exception& e) {
        throw FormatError(std::string("checkpoint: inconsistent backbone: ") + e.what());
    }
    return net;
}

} // namespace

template <typename Real>
void save_checkpoint(const Model<Real>& model, const std::string& config_echo, std::ostream& os) {
    binio::write_magic(os, "DINC");
    binio::write_le<std::uint32_t>(os, checkpoint_version);
    if (const auto* d = std::get_if<DinerModel<Real>>(&model)) {
        binio::write_le<std::uint8_t>(os, kind_diner);
        binio::write_le<std::uint8_t>(os, binio::dtype_tag<Real>());
        binio::write_string(os, config_echo);
        save_table(d->table, os);
        write_backbone(os, d->backbone);
    } else {
        const auto& b = std::get<BaselineModel<Real>>(model);
        binio::write_le<std::uint8_t>(os, b.encoded ? kind_positional : kind_raw);
        binio::write_le<std::uint8_t>(os, binio::dtype_tag<Real>());
        binio::write_string(os, config_echo);
        binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(b.grid.rank()));
        for (const auto d : b.grid.dims()) {
            binio::write_le<std::uint64_t>(os, d);
        }
        binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(b.encoding.num_frequencies));
        binio::write_le<std::uint8_t>(os, b.encoding.include_input ? 1 : 0);
        write_backbone(os, b.backbone);
    }
    if (!os) {
        throw FormatError("save_checkpoint: write failed");
    }
}

template <typename Real>
Checkpoint<Real> load_checkpoint(std::istream& is) {
    binio::expect_magic(is, "DINC");
    const auto version = binio::read_le<std::uint32_t>(is, "checkpoint version");
    if (version != checkpoint_version) {
        throw FormatError("load_checkpoint: unsupported version " + std::to_string(version));
    }
    const auto kind = binio::read_le<std::uint8_t>(is, "model kind");
    const auto dtype = binio::read_le<std::uint8_t>(is, "checkpoint dtype");
    if (dtype != binio::dtype_f32 && dtype != binio::dtype_f64) {
        throw FormatError("load_checkpoint: unknown dtype tag " + std::to_string(dtype));
    }
    Checkpoint<Real> out;
    out.config_echo = binio::read_string(is, "config echo");
    if (kind == kind_diner) {
        auto table = load_table<Real>(is);
        auto net = read_backbone<Real>(is, dtype);
        if (net.input_width() != table.width()) {
            throw FormatError("load_checkpoint: table width " + std::to_string(table.width()) +
                              " does not feed a backbone of input width " +
                              std::to_string(net.input_width()));
        }
        out.model = DinerModel<Real>{std::move(table), std::move(net)};
    } else if (kind == kind_positional || kind == kind_raw) {
        const auto rank = binio::read_le<std::uint32_t>(is, "grid rank");
        std::vector<std::size_t> dims(rank);
        for (auto& d : dims) {
            d = binio::read_le<std::uint64_t>(is, "grid extent");
        }
        PositionalEncoding pe;
        pe.num_frequencies = binio::read_le<std::uint32_t>(is, "frequency count");
        pe.include_input = binio::read_le<std::uint8_t>(is, "include input") != 0;
        BaselineModel<Real> b{GridIndexer(dims), pe, kind == kind_positional,
                              read_backbone<Real>(is, dtype)};
        out.model = std::move(b);
    } else {
        throw FormatError("load_checkpoint: unknown model kind " + std::to_string(kind));
    }
    return out;
}

template <typename Real>
void save_checkpoint(const Model<Real>& model, const std::string& config_echo,
                     const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw FormatError("cannot write " + path.string());
    }
    save_checkpoint(model, config_echo, os);
}

template <typename Real>
Checkpoint<Real> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw FormatError("cannot open " + path.string());
    }
    return load_checkpoint<Real>(is);
}

#define DINER_INSTANTIATE(Real)                                                                  \
    template void save_checkpoint(const Model<Real>&, const std::string&, std::ostream&);        \
    template Checkpoint<Real> load_checkpoint<Real>(std::istream&);                              \
    template void save_checkpoint(const Model<Real>&, const std::string&,                        \
                                  const std::filesystem::path&);                                 \
    template Checkpoint<Real> load_checkpoint<Real>(const std::filesystem::path&);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner
