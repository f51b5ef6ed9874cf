#pragma once

#include "qlp/grid.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace qlp {

/// Real-to-complex discrete Fourier transform on a periodic grid (FFTW).
///
/// A Spectrum holds the transform of one real field. Fourier multipliers are
/// applied through `apply`, which hands the callback the physical wavenumber
/// k = 2 pi m / L of each retained mode and whether the mode is a Nyquist mode.
class Spectrum {
public:
    struct Mode {
        double kx;
        double ky;
        bool nyquist;  ///< on the Nyquist line of some axis
    };
    using Multiplier = std::function<std::complex<double>(const Mode&)>;

    Spectrum(const Grid& grid, std::span<const double> values);

    const Grid& grid() const noexcept { return grid_; }
    /// Inverse transform of (multiplier * spectrum), normalised.
    std::vector<double> apply(const Multiplier& multiplier) const;

private:
    Grid grid_;
    std::vector<std::complex<double>> coeffs_;
};

} // namespace qlp
