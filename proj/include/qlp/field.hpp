#pragma once

#include "qlp/grid.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace qlp {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const noexcept { return hi - lo; }
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    bool contains(const Interval& other) const noexcept { return other.lo >= lo && other.hi <= hi; }
    bool operator==(const Interval&) const = default;
};

/// dim x dim real matrix, dim <= 2. For dim = 1 only xx is used.
struct Matrix2 {
    double xx = 0.0;
    double xy = 0.0;
    double yx = 0.0;
    double yy = 0.0;

    static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Matrix2 scalar(double c) { return {c, 0.0, 0.0, c}; }

    Matrix2 operator+(const Matrix2& o) const { return {xx + o.xx, xy + o.xy, yx + o.yx, yy + o.yy}; }
    Matrix2 operator-(const Matrix2& o) const { return {xx - o.xx, xy - o.xy, yx - o.yx, yy - o.yy}; }
    Matrix2 operator*(double s) const { return {xx * s, xy * s, yx * s, yy * s}; }
    bool operator==(const Matrix2&) const = default;

    double frobenius(int dim) const noexcept {
        return dim == 1 ? std::abs(xx) : std::sqrt(xx * xx + xy * xy + yx * yx + yy * yy);
    }
    /// xi^T A xi.
    double quadratic(int dim, double xi0, double xi1) const noexcept {
        return dim == 1 ? xx * xi0 * xi0 : xi0 * (xx * xi0 + xy * xi1) + xi1 * (yx * xi0 + yy * xi1);
    }
    /// Smallest eigenvalue of the symmetric part.
    double min_sym_eigenvalue(int dim) const noexcept;
    bool diagonal(int dim) const noexcept { return dim == 1 || (xy == 0.0 && yx == 0.0); }
    bool finite() const noexcept {
        return std::isfinite(xx) && std::isfinite(xy) && std::isfinite(yx) && std::isfinite(yy);
    }
};

/// Real samples, one per grid cell.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(Grid grid, std::vector<double> values);
    static ScalarField constant(const Grid& grid, double c);
    static ScalarField from_function(const Grid& grid, const std::function<double(Point)>& f);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    double sup_norm() const noexcept;
    double mean() const noexcept;
    /// Cyclic shift by k cells along axis (result(c) = this(c - k e_axis)).
    ScalarField shifted(int axis, int k) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Per-cell matrices, e.g. a frozen coefficient A(x).
struct MatrixField {
    Grid grid;
    std::vector<Matrix2> values;

    static MatrixField constant(const Grid& grid, const Matrix2& m) {
        return {grid, std::vector<Matrix2>(grid.size(), m)};
    }
    double min_ellipticity() const noexcept;
    double sup_frobenius() const noexcept;
    bool diagonal() const noexcept;
};

/// Face-centred vector samples. comp[a][c] lives on the face between cell c
/// and its +1 neighbour along axis a (the normal component on that face).
struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;

    static VectorField zero(const Grid& grid);
    double magnitude(std::size_t c) const noexcept {
        const double a = comp[0][c];
        const double b = grid.dim() == 2 ? comp[1][c] : 0.0;
        return std::sqrt(a * a + b * b);
    }
};

/// Time-indexed sequence of frames over one grid. vector_rank 0 stores one
/// value per cell; vector_rank = dim stores dim components per cell, laid out
/// component-major within a frame.
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    SpaceTimeField(Grid grid, int vector_rank);

    void push_frame(double t, std::vector<double> data);
    void push_scalar(double t, const ScalarField& f) { push_frame(t, {f.values().begin(), f.values().end()}); }
    void push_vector(double t, const VectorField& v);

    const Grid& grid() const noexcept { return grid_; }
    int vector_rank() const noexcept { return rank_; }
    int components() const noexcept { return rank_ == 0 ? 1 : rank_; }
    std::size_t frame_count() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    std::span<const double> times() const noexcept { return times_; }
    double time(std::size_t k) const noexcept { return times_[k]; }

    std::span<const double> frame(std::size_t k) const noexcept { return frames_[k]; }
    std::span<const double> component(std::size_t k, int c) const noexcept {
        return std::span<const double>(frames_[k]).subspan(c * grid_.size(), grid_.size());
    }
    ScalarField scalar(std::size_t k) const;
    VectorField vector(std::size_t k) const;
    /// |f| at cell c of frame k (absolute value for scalars, Euclidean norm otherwise).
    double magnitude(std::size_t k, std::size_t c) const noexcept;

    /// Largest |f| over all frames.
    double sup_norm() const noexcept;
    /// Frames with index >= first (shares nothing with *this).
    SpaceTimeField tail(std::size_t first) const;
    /// Frame-wise difference; grids and times must agree.
    SpaceTimeField minus(const SpaceTimeField& other) const;
    /// Linear interpolation in time, clamped to [t0, tM].
    std::vector<double> sample_at(double t) const;

private:
    Grid grid_;
    int rank_ = 0;
    std::vector<double> times_;
    std::vector<std::vector<double>> frames_;
};

/// [min, max] over all samples; throws on an empty field.
Interval essential_range(const ScalarField& f);
Interval essential_range(const SpaceTimeField& f);
/// Range over frames with index >= first_frame.
Interval essential_range(const SpaceTimeField& f, std::size_t first_frame);

} // namespace qlp
