#include "diner/train.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "diner/adam.hpp"
#include "diner/errors.hpp"
#include "diner/rng.hpp"

namespace diner {

void TrainConfig::validate(std::size_t n) const {
    if (batch_size > n) {
        throw ValidationError("train: batch size " + std::to_string(batch_size) +
                              " exceeds signal length " + std::to_string(n));
    }
    if (log_every == 0) {
        throw ValidationError("train: log cadence must be at least 1");
    }
    AdamConfig{lr_net}.validate();
    AdamConfig{lr_hash}.validate();
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("metrics csv: bad number '" + s + "'");
    }
    return v;
}

} // namespace

void MetricsLog::write_csv(std::ostream& os) const {
    os << "epoch,wall_ms,loss,psnr_db\n";
    for (const auto& r : rows) {
        os << r.epoch << ',' << format_double(r.wall_ms) << ',' << format_double(r.loss) << ','
           << format_double(r.psnr_db) << '\n';
    }
}

MetricsLog MetricsLog::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "epoch,wall_ms,loss,psnr_db") {
        throw FormatError("metrics csv: unexpected header '" + line + "'");
    }
    MetricsLog log;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell[4];
        for (auto& c : cell) {
            if (!std::getline(ss, c, ',')) {
                throw FormatError("metrics csv: short row '" + line + "'");
            }
        }
        MetricsRow row;
        row.epoch = static_cast<std::size_t>(parse_double(cell[0]));
        row.wall_ms = parse_double(cell[1]);
        row.loss = parse_double(cell[2]);
        row.psnr_db = parse_double(cell[3]);
        log.rows.push_back(row);
    }
    return log;
}

template <typename Real>
std::vector<std::size_t> canonical_order(const Matrix<Real>& targets) {
    std::vector<std::size_t> order(targets.rows());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = targets.row(a);
        const auto rb = targets.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    return order;
}

namespace {

template <typename Real>
std::string first_non_finite_layer(const Backbone<Real>& net, const ForwardTrace<Real>& trace) {
    for (std::size_t j = 0; j < net.layers.size(); ++j) {
        if (!all_finite(net.layers[j].weight) || !all_finite(net.layers[j].bias)) {
            return "layer " + std::to_string(j) + " parameters";
        }
        if (!all_finite(trace.layers[j].post_activation)) {
            return "layer " + std::to_string(j) + " output";
        }
    }
    if (!all_finite(trace.input)) {
        return "network input";
    }
    return "loss";
}

template <typename Real>
Matrix<Real> gather_columns(const Matrix<Real>& src_rows, std::span<const std::size_t> idx) {
    // src_rows is N x d (row per element); result is d x batch.
    Matrix<Real> out(src_rows.cols(), idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
        for (std::size_t k = 0; k < src_rows.cols(); ++k) {
            out(k, c) = src_rows(idx[c], k);
        }
    }
    return out;
}

} // namespace

template <typename Real>
MetricsLog train(Model<Real>& model, const GridSignal& signal, const TrainConfig& cfg,
                 ForwardOperator<Real>* op) {
    check_binding(model, signal);
    const std::size_t n = signal.size();
    cfg.validate(n);
    if (op != nullptr && cfg.batch_size != 0 && cfg.batch_size != n) {
        throw ValidationError("train: a forward operator needs full-batch training");
    }

    MetricsLog log;
    log.seed = cfg.seed;
    log.precision = sizeof(Real) == 4 ? "f32" : "f64";

    Backbone<Real>& net = backbone_of(model);
    auto* diner = std::get_if<DinerModel<Real>>(&model);
    const bool update_table = diner != nullptr && !cfg.freeze_table;

    std::vector<AdamState<Real>> weight_state, bias_state;
    AdamConfig net_adam;
    net_adam.lr = cfg.lr_net;
    for (const auto& layer : net.layers) {
        weight_state.push_back(AdamState<Real>::zeros_like(layer.weight, net_adam));
        bias_state.push_back(AdamState<Real>::zeros_like(layer.bias, net_adam));
    }
    if (diner != nullptr) {
        diner->table.adam.lr = cfg.lr_hash;
    }

    const Matrix<Real> targets = matrix_cast<Real>(signal.attributes());
    const bool full_batch = cfg.batch_size == 0 || cfg.batch_size == n;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (op == nullptr && full_batch) {
        order = canonical_order(targets);
    }
    const Matrix<Real> full_targets = op == nullptr ? gather_columns(targets, order) : Matrix<Real>();
    // Baseline inputs never change, so the full-batch input is built once.
    Matrix<Real> cached_inputs;
    if (diner == nullptr && full_batch) {
        cached_inputs = model_inputs(model, order);
    }

    Rng shuffle_rng = make_rng(cfg.seed, "shuffle");
    const std::size_t batch = full_batch ? n : cfg.batch_size;
    const auto start = std::chrono::steady_clock::now();

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (!full_batch) {
            for (std::size_t i = n; i > 1; --i) {
                std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng() % i)]);
            }
        }
        double epoch_loss = 0.0;
        double epoch_psnr = 0.0;
        for (std::size_t begin = 0; begin < n; begin += batch) {
            const std::size_t count = std::min(batch, n - begin);
            const std::span<const std::size_t> idx(order.data() + begin, count);

            ForwardTrace<Real> trace;
            try {
                trace = backbone_forward(net, full_batch && diner == nullptr
                                                  ? cached_inputs
                                                  : model_inputs(model, idx));
            } catch (const NumericError& e) {
                throw NumericError("train: epoch " + std::to_string(epoch) + ": " + e.what());
            }
            Matrix<Real> grad_out(trace.output().rows(), trace.output().cols());
            double loss = 0.0;
            if (op != nullptr) {
                const auto eval = op->evaluate(trace.output(), grad_out);
                loss = eval.loss;
                epoch_psnr = eval.psnr_db;
            } else {
                auto res = mse_loss(trace.output(), full_batch ? full_targets
                                                               : gather_columns(targets, idx));
                loss = static_cast<double>(res.loss);
                grad_out = std::move(res.grad);
            }
            if (!std::isfinite(loss)) {
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   " (first offending: " + first_non_finite_layer(net, trace) + ")");
            }
            epoch_loss += loss * static_cast<double>(count);

            auto grads = backbone_backward(net, trace, grad_out, update_table);
            for (std::size_t j = 0; j < net.layers.size(); ++j) {
                const std::string label = "layer " + std::to_string(j);
                adam_step(net.layers[j].weight, grads.weight[j], weight_state[j],
                          label + " weight (epoch " + std::to_string(epoch) + ")");
                adam_step(net.layers[j].bias, grads.bias[j], bias_state[j],
                          label + " bias (epoch " + std::to_string(epoch) + ")");
            }
            if (update_table) {
                diner->table.apply_adam(diner->table.scatter_grad(idx, grads.input));
            }
        }
        epoch_loss /= static_cast<double>(n);
        if (op == nullptr) {
            epoch_psnr = psnr_from_mse(epoch_loss);
        }
        if (epoch % cfg.log_every == 0 || epoch == cfg.epochs) {
            MetricsRow row;
            row.epoch = epoch;
            if (cfg.record_time) {
                row.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
            }
            row.loss = epoch_loss;
            row.psnr_db = epoch_psnr;
            log.rows.push_back(row);
        }
    }
    return log;
}

template <typename Real>
double evaluate_psnr(const Model<Real>& model, const GridSignal& signal) {
    check_binding(model, signal);
    // Canonical order keeps the sum independent of the arrangement.
    const GridSignal pred = predict_signal(model, signal.grid());
    const auto& y = signal.attributes();
    const auto& p = pred.attributes();
    double sum = 0;
    for (const auto i : canonical_order(y)) {
        for (std::size_t c = 0; c < y.cols(); ++c) {
            const double d = p(i, c) - y(i, c);
            sum += d * d;
        }
    }
    return psnr_from_mse(sum / static_cast<double>(y.size()));
}

#define DINER_INSTANTIATE(Real)                                                             \
    template std::vector<std::size_t> canonical_order(const Matrix<Real>&);                 \
    template MetricsLog train(Model<Real>&, const GridSignal&, const TrainConfig&,          \
                              ForwardOperator<Real>*);                                      \
    template double evaluate_psnr(const Model<Real>&, const GridSignal&);

DINER_INSTANTIATE(float)
DINER_INSTANTIATE(double)

#undef DINER_INSTANTIATE

} // namespace diner
