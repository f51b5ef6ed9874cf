#include "qlp/grid.hpp"

#include "qlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qlp {

Grid::Grid(int dim, int cells_per_axis, double box_length)
    : dim_(dim), n_(cells_per_axis), length_(box_length) {
    if (dim != 1 && dim != 2) {
        throw Error("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (cells_per_axis <= 0) {
        throw Error("grid needs a positive cell count");
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw Error("grid box length must be positive and finite");
    }
    dx_ = box_length / cells_per_axis;
    size_ = dim == 2 ? static_cast<std::size_t>(n_) * n_ : static_cast<std::size_t>(n_);
}

double Grid::cell_volume() const noexcept {
    return dim_ == 2 ? dx_ * dx_ : dx_;
}

double Grid::distance(Point a, Point b) const noexcept {
    auto axis = [this](double d) {
        d = std::fmod(std::abs(d), length_);
        return std::min(d, length_ - d);
    };
    const double dxv = axis(a.x - b.x);
    const double dyv = dim_ == 2 ? axis(a.y - b.y) : 0.0;
    return std::hypot(dxv, dyv);
}

} // namespace qlp
