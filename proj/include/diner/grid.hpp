#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace diner {

/// Row-major flattening of integer grid coordinates. The last axis varies
/// fastest, so an image is indexed (row, column).
class GridIndexer {
public:
    GridIndexer() = default;
    explicit GridIndexer(std::vector<std::size_t> dims);

    [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
    [[nodiscard]] std::size_t rank() const { return dims_.size(); }
    [[nodiscard]] std::size_t size() const { return size_; }

    /// Throws IndexError naming the offending axis.
    [[nodiscard]] std::size_t flatten(std::span<const std::size_t> coord) const;
    [[nodiscard]] std::vector<std::size_t> unflatten(std::size_t index) const;

    /// Coordinates of `index` mapped affinely onto [-1, 1] per axis; a
    /// single-sample axis maps to 0.
    [[nodiscard]] std::vector<double> normalized(std::size_t index) const;

    friend bool operator==(const GridIndexer&, const GridIndexer&) = default;

private:
    std::vector<std::size_t> dims_;
    std::size_t size_ = 0;
};

} // namespace diner
