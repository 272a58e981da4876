#include "diner/grid.hpp"

#include <string>

#include "diner/errors.hpp"

namespace diner {

GridIndexer::GridIndexer(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw ValidationError("grid: needs at least one axis");
    }
    size_ = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (dims_[k] == 0) {
            throw ValidationError("grid: axis " + std::to_string(k) + " has zero extent");
        }
        size_ *= dims_[k];
    }
}

std::size_t GridIndexer::flatten(std::span<const std::size_t> coord) const {
    if (coord.size() != dims_.size()) {
        throw DimensionError("flatten: coordinate has " + std::to_string(coord.size()) +
                             " axes, grid has " + std::to_string(dims_.size()));
    }
    std::size_t index = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (coord[k] >= dims_[k]) {
            throw IndexError("flatten: axis " + std::to_string(k) + " coordinate " +
                             std::to_string(coord[k]) + " outside [0, " +
                             std::to_string(dims_[k]) + ")");
        }
        index = index * dims_[k] + coord[k];
    }
    return index;
}

std::vector<std::size_t> GridIndexer::unflatten(std::size_t index) const {
    if (index >= size_) {
        throw IndexError("unflatten: index " + std::to_string(index) + " outside [0, " +
                         std::to_string(size_) + ")");
    }
    std::vector<std::size_t> coord(dims_.size());
    for (std::size_t k = dims_.size(); k-- > 0;) {
        coord[k] = index % dims_[k];
        index /= dims_[k];
    }
    return coord;
}

std::vector<double> GridIndexer::normalized(std::size_t index) const {
    const auto coord = unflatten(index);
    std::vector<double> out(coord.size());
    for (std::size_t k = 0; k < coord.size(); ++k) {
        out[k] = dims_[k] == 1 ? 0.0
                               : -1.0 + 2.0 * static_cast<double>(coord[k]) /
                                            static_cast<double>(dims_[k] - 1);
    }
    return out;
}

} // namespace diner
