#pragma once

#include <array>
#include <cstddef>

namespace qlp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform periodic grid on the torus [0, L)^dim, dim in {1, 2}.
///
/// Cell c carries the sample at its lower-left node x_c = (i * dx, j * dx).
/// Flat index is i + N * j (axis 0 fastest). Every index operation wraps
/// modulo N per axis.
class Grid {
public:
    Grid() = default;
    Grid(int dim, int cells_per_axis, double box_length);

    int dim() const noexcept { return dim_; }
    int cells_per_axis() const noexcept { return n_; }
    double box_length() const noexcept { return length_; }
    double spacing() const noexcept { return dx_; }
    std::size_t size() const noexcept { return size_; }
    double cell_volume() const noexcept;

    int wrap(int i) const noexcept {
        int r = i % n_;
        return r < 0 ? r + n_ : r;
    }
    std::size_t index(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(wrap(i)) +
               (dim_ == 2 ? static_cast<std::size_t>(n_) * static_cast<std::size_t>(wrap(j)) : 0);
    }
    std::array<int, 2> coords(std::size_t idx) const noexcept {
        return {static_cast<int>(idx % n_), dim_ == 2 ? static_cast<int>(idx / n_) : 0};
    }
    std::size_t neighbor(std::size_t idx, int axis, int offset) const noexcept {
        auto c = coords(idx);
        c[axis] += offset;
        return index(c[0], c[1]);
    }
    Point node(std::size_t idx) const noexcept {
        auto c = coords(idx);
        return {c[0] * dx_, c[1] * dx_};
    }
    /// Midpoint of the face between idx and its +1 neighbour along axis.
    Point face(std::size_t idx, int axis) const noexcept {
        Point p = node(idx);
        (axis == 0 ? p.x : p.y) += 0.5 * dx_;
        return p;
    }

    /// Minimal-image distance on the torus.
    double distance(Point a, Point b) const noexcept;

    bool operator==(const Grid& other) const noexcept {
        return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
    }

private:
    int dim_ = 1;
    int n_ = 1;
    double length_ = 1.0;
    double dx_ = 1.0;
    std::size_t size_ = 1;
};

} // namespace qlp
