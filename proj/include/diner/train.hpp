#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "diner/model.hpp"
#include "diner/signal.hpp"

namespace diner {

struct TrainConfig {
    std::size_t epochs = 3000;
    std::size_t batch_size = 0; // 0 = full batch
    std::uint64_t seed = 0;
    double lr_net = 1e-4;
    double lr_hash = 1e-4;
    bool freeze_table = false;
    std::size_t log_every = 1;
    bool record_time = true; // false writes wall_ms = 0 for byte-stable logs

    void validate(std::size_t n) const;
};

struct MetricsRow {
    std::size_t epoch = 0;
    double wall_ms = 0;
    double loss = 0;
    double psnr_db = 0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct MetricsLog {
    std::vector<MetricsRow> rows;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string precision = "f64";

    /// Header `epoch,wall_ms,loss,psnr_db`; values printed with round-trip
    /// precision.
    void write_csv(std::ostream& os) const;
    [[nodiscard]] static MetricsLog read_csv(std::istream& is);

    [[nodiscard]] double final_psnr() const { return rows.empty() ? 0.0 : rows.back().psnr_db; }
};

struct OperatorEval {
    double loss = 0;
    double psnr_db = 0;
};

/// Differentiable physical process applied to the full prediction
/// (d_out x N, columns in flattened index order).
template <typename Real>
class ForwardOperator {
public:
    virtual ~ForwardOperator() = default;
    virtual OperatorEval evaluate(const Matrix<Real>& prediction, Matrix<Real>& grad) = 0;
};

/// Joint Adam optimization of the backbone and (for DINER) the hash table.
///
/// Full-batch epochs visit elements in a canonical order: sorted by target
/// attribute vector, ties by index. Every reduction over the batch therefore
/// sees the same sequence of (table row, target) pairs for any rearrangement
/// of the signal, and zero-initialized DINER runs on permuted signals are
/// bit-identical. Mini-batch epochs shuffle with the seed's "shuffle" stream.
///
/// With `op`, the loss comes from the operator, the batch is always the full
/// grid in index order and `signal` only supplies the shape.
template <typename Real>
MetricsLog train(Model<Real>& model, const GridSignal& signal, const TrainConfig& cfg,
                 ForwardOperator<Real>* op = nullptr);

/// PSNR of the model's full prediction against the signal.
template <typename Real>
[[nodiscard]] double evaluate_psnr(const Model<Real>& model, const GridSignal& signal);

/// Indices sorted by target attributes (lexicographic), ties by index.
template <typename Real>
[[nodiscard]] std::vector<std::size_t> canonical_order(const Matrix<Real>& targets);

} // namespace diner
