#include "qlp/stencil.hpp"

#include "qlp/errors.hpp"

#include <array>

namespace qlp {

namespace {

struct Tap {
    std::size_t cell;
    double weight;
};

// Flux through face (c, axis) as a linear combination of cell values. At most
// 2 normal taps + 4 transverse taps.
struct FaceStencil {
    std::array<Tap, 6> taps{};
    int count = 0;
    void add(std::size_t cell, double w) {
        if (w != 0.0) {
            taps[count++] = {cell, w};
        }
    }
};

Matrix2 face_coefficient(const MatrixField& a, std::size_t c, int axis) {
    const std::size_t nb = a.grid.neighbor(c, axis, 1);
    return (a.values[c] + a.values[nb]) * 0.5;
}

FaceStencil face_stencil(const MatrixField& a, std::size_t c, int axis) {
    const Grid& g = a.grid;
    const double h = g.spacing();
    const Matrix2 af = face_coefficient(a, c, axis);
    const std::size_t up = g.neighbor(c, axis, 1);
    FaceStencil s;
    if (g.dim() == 1) {
        s.add(up, af.xx / h);
        s.add(c, -af.xx / h);
        return s;
    }
    const int other = 1 - axis;
    const double normal = axis == 0 ? af.xx : af.yy;
    const double cross = axis == 0 ? af.xy : af.yx;
    s.add(up, normal / h);
    s.add(c, -normal / h);
    if (cross != 0.0) {
        const double w = cross / (4.0 * h);
        s.add(g.neighbor(c, other, 1), w);
        s.add(g.neighbor(c, other, -1), -w);
        s.add(g.neighbor(up, other, 1), w);
        s.add(g.neighbor(up, other, -1), -w);
    }
    return s;
}

} // namespace

VectorField face_gradient(const Grid& grid, std::span<const double> u) {
    if (u.size() != grid.size()) {
        throw Error("face_gradient: size mismatch");
    }
    VectorField g = VectorField::zero(grid);
    const double inv = 1.0 / grid.spacing();
    for (int a = 0; a < grid.dim(); ++a) {
        for (std::size_t c = 0; c < grid.size(); ++c) {
            g.comp[a][c] = (u[grid.neighbor(c, a, 1)] - u[c]) * inv;
        }
    }
    return g;
}

VectorField face_flux(const MatrixField& a, std::span<const double> u) {
    const Grid& g = a.grid;
    if (u.size() != g.size() || a.values.size() != g.size()) {
        throw Error("face_flux: size mismatch");
    }
    VectorField f = VectorField::zero(g);
    for (int axis = 0; axis < g.dim(); ++axis) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            const FaceStencil s = face_stencil(a, c, axis);
            double v = 0.0;
            for (int i = 0; i < s.count; ++i) {
                v += s.taps[i].weight * u[s.taps[i].cell];
            }
            f.comp[axis][c] = v;
        }
    }
    return f;
}

std::vector<double> divergence(const VectorField& f) {
    const Grid& g = f.grid;
    const double inv = 1.0 / g.spacing();
    std::vector<double> d(g.size(), 0.0);
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            d[c] += (f.comp[a][c] - f.comp[a][g.neighbor(c, a, -1)]) * inv;
        }
    }
    return d;
}

VectorField add(const VectorField& f, const VectorField& g) {
    VectorField out = f;
    for (int a = 0; a < f.grid.dim(); ++a) {
        for (std::size_t c = 0; c < out.comp[a].size(); ++c) {
            out.comp[a][c] += g.comp[a][c];
        }
    }
    return out;
}

Eigen::SparseMatrix<double> assemble_operator(const MatrixField& a) {
    const Grid& g = a.grid;
    const double inv = 1.0 / g.spacing();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.size() * (g.dim() == 1 ? 4 : 24));
    for (int axis = 0; axis < g.dim(); ++axis) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            const FaceStencil s = face_stencil(a, c, axis);
            const std::size_t up = g.neighbor(c, axis, 1);
            for (int i = 0; i < s.count; ++i) {
                const auto col = static_cast<Eigen::Index>(s.taps[i].cell);
                trip.emplace_back(static_cast<Eigen::Index>(c), col, s.taps[i].weight * inv);
                trip.emplace_back(static_cast<Eigen::Index>(up), col, -s.taps[i].weight * inv);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::SparseMatrix<double> l(n, n);
    l.setFromTriplets(trip.begin(), trip.end());
    return l;
}

} // namespace qlp
