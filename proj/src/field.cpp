#include "qlp/field.hpp"

#include "qlp/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace qlp {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw Error(std::string(what) + ": non-finite sample");
        }
    }
}

} // namespace

double Matrix2::min_sym_eigenvalue(int dim) const noexcept {
    if (dim == 1) {
        return xx;
    }
    const double off = 0.5 * (xy + yx);
    const double mean = 0.5 * (xx + yy);
    const double half_gap = std::hypot(0.5 * (xx - yy), off);
    return mean - half_gap;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error("scalar field size does not match grid");
    }
    require_finite(values_, "scalar field");
}

ScalarField ScalarField::constant(const Grid& grid, double c) {
    return ScalarField(grid, std::vector<double>(grid.size(), c));
}

ScalarField ScalarField::from_function(const Grid& grid, const std::function<double(Point)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t c = 0; c < v.size(); ++c) {
        v[c] = f(grid.node(c));
    }
    return ScalarField(grid, std::move(v));
}

double ScalarField::sup_norm() const noexcept {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double ScalarField::mean() const noexcept {
    double s = 0.0;
    for (double v : values_) {
        s += v;
    }
    return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
}

ScalarField ScalarField::shifted(int axis, int k) const {
    std::vector<double> out(values_.size());
    for (std::size_t c = 0; c < values_.size(); ++c) {
        out[grid_.neighbor(c, axis, k)] = values_[c];
    }
    return ScalarField(grid_, std::move(out));
}

double MatrixField::min_ellipticity() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : values) {
        m = std::min(m, a.min_sym_eigenvalue(grid.dim()));
    }
    return m;
}

double MatrixField::sup_frobenius() const noexcept {
    double m = 0.0;
    for (const auto& a : values) {
        m = std::max(m, a.frobenius(grid.dim()));
    }
    return m;
}

bool MatrixField::diagonal() const noexcept {
    return std::all_of(values.begin(), values.end(), [this](const Matrix2& a) { return a.diagonal(grid.dim()); });
}

VectorField VectorField::zero(const Grid& grid) {
    VectorField v{grid, {}};
    for (int a = 0; a < grid.dim(); ++a) {
        v.comp[a].assign(grid.size(), 0.0);
    }
    return v;
}

SpaceTimeField::SpaceTimeField(Grid grid, int vector_rank) : grid_(grid), rank_(vector_rank) {
    if (vector_rank != 0 && vector_rank != grid.dim()) {
        throw Error("vector rank must be 0 or the grid dimension");
    }
}

void SpaceTimeField::push_frame(double t, std::vector<double> data) {
    if (data.size() != static_cast<std::size_t>(components()) * grid_.size()) {
        throw Error("frame size does not match grid and rank");
    }
    if (!(t >= 0.0) || (!times_.empty() && !(t > times_.back()))) {
        throw Error("frame times must be non-negative and strictly increasing");
    }
    require_finite(data, "space-time frame");
    times_.push_back(t);
    frames_.push_back(std::move(data));
}

void SpaceTimeField::push_vector(double t, const VectorField& v) {
    std::vector<double> data;
    data.reserve(grid_.size() * components());
    for (int a = 0; a < components(); ++a) {
        data.insert(data.end(), v.comp[a].begin(), v.comp[a].end());
    }
    push_frame(t, std::move(data));
}

ScalarField SpaceTimeField::scalar(std::size_t k) const {
    return ScalarField(grid_, {frames_[k].begin(), frames_[k].begin() + static_cast<std::ptrdiff_t>(grid_.size())});
}

VectorField SpaceTimeField::vector(std::size_t k) const {
    VectorField v{grid_, {}};
    for (int a = 0; a < grid_.dim(); ++a) {
        if (a < components()) {
            auto s = component(k, a);
            v.comp[a].assign(s.begin(), s.end());
        } else {
            v.comp[a].assign(grid_.size(), 0.0);
        }
    }
    return v;
}

double SpaceTimeField::magnitude(std::size_t k, std::size_t c) const noexcept {
    const auto& f = frames_[k];
    if (rank_ <= 1) {
        return std::abs(f[c]);
    }
    const double a = f[c];
    const double b = f[c + grid_.size()];
    return std::sqrt(a * a + b * b);
}

double SpaceTimeField::sup_norm() const noexcept {
    double m = 0.0;
    for (std::size_t k = 0; k < frames_.size(); ++k) {
        for (std::size_t c = 0; c < grid_.size(); ++c) {
            m = std::max(m, magnitude(k, c));
        }
    }
    return m;
}

SpaceTimeField SpaceTimeField::tail(std::size_t first) const {
    SpaceTimeField out(grid_, rank_);
    for (std::size_t k = first; k < frames_.size(); ++k) {
        out.times_.push_back(times_[k]);
        out.frames_.push_back(frames_[k]);
    }
    return out;
}

SpaceTimeField SpaceTimeField::minus(const SpaceTimeField& other) const {
    if (!(grid_ == other.grid_) || rank_ != other.rank_ || times_ != other.times_) {
        throw Error("space-time fields are not on a common grid");
    }
    SpaceTimeField out(grid_, rank_);
    out.times_ = times_;
    out.frames_.resize(frames_.size());
    for (std::size_t k = 0; k < frames_.size(); ++k) {
        out.frames_[k].resize(frames_[k].size());
        for (std::size_t i = 0; i < frames_[k].size(); ++i) {
            out.frames_[k][i] = frames_[k][i] - other.frames_[k][i];
        }
    }
    return out;
}

std::vector<double> SpaceTimeField::sample_at(double t) const {
    if (times_.empty()) {
        throw Error("cannot sample an empty space-time field");
    }
    if (t <= times_.front()) {
        return frames_.front();
    }
    if (t >= times_.back()) {
        return frames_.back();
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
    std::vector<double> out(frames_[k].size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (1.0 - w) * frames_[k - 1][i] + w * frames_[k][i];
    }
    return out;
}

Interval essential_range(const ScalarField& f) {
    if (f.size() == 0) {
        throw Error("essential range of an empty field");
    }
    const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
    return {*lo, *hi};
}

Interval essential_range(const SpaceTimeField& f, std::size_t first_frame) {
    if (f.frame_count() <= first_frame || f.grid().size() == 0) {
        throw Error("essential range of an empty field");
    }
    Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t k = first_frame; k < f.frame_count(); ++k) {
        for (double v : f.frame(k)) {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    }
    return r;
}

Interval essential_range(const SpaceTimeField& f) {
    return essential_range(f, 0);
}

} // namespace qlp
