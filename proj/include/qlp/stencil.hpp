#pragma once

#include "qlp/field.hpp"

#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace qlp {

/// Finite-volume stencil in conservation form on the periodic grid.
///
/// Fluxes live on cell faces. The face coefficient is the arithmetic mean of
/// the two adjacent cells. In 2-D the transverse derivative on a face is the
/// average of the two centred differences of the adjacent cells, which is only
/// used when the coefficient has off-diagonal entries.

/// Normal face differences (u[c + e_a] - u[c]) / dx.
VectorField face_gradient(const Grid& grid, std::span<const double> u);

/// Face flux A_f grad u, including cross-derivative terms.
VectorField face_flux(const MatrixField& a, std::span<const double> u);

/// Cell divergence of a face field.
std::vector<double> divergence(const VectorField& f);

/// f + g on faces.
VectorField add(const VectorField& f, const VectorField& g);

/// Sparse L with L u = divergence(face_flux(a, u)).
Eigen::SparseMatrix<double> assemble_operator(const MatrixField& a);

} // namespace qlp
