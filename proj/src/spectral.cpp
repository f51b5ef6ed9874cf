#include "qlp/spectral.hpp"

#include "qlp/errors.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>

namespace qlp {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (p == nullptr) {
        throw Error("fftw_malloc failed");
    }
    return FftwBuffer<T>(p);
}

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {
        if (plan_ == nullptr) {
            throw Error("FFTW plan creation failed");
        }
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

std::size_t spectral_size(const Grid& g) {
    const std::size_t half = static_cast<std::size_t>(g.cells_per_axis() / 2 + 1);
    return g.dim() == 2 ? half * static_cast<std::size_t>(g.cells_per_axis()) : half;
}

} // namespace

Spectrum::Spectrum(const Grid& grid, std::span<const double> values) : grid_(grid) {
    if (values.size() != grid.size()) {
        throw Error("spectrum input size does not match grid");
    }
    const int n = grid.cells_per_axis();
    const std::size_t ns = spectral_size(grid);
    auto in = fftw_buffer<double>(grid.size());
    auto out = fftw_buffer<fftw_complex>(ns);
    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = std::make_unique<Plan>(grid.dim() == 1 ? fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE)
                                                      : fftw_plan_dft_r2c_2d(n, n, in.get(), out.get(), FFTW_ESTIMATE));
    }
    std::memcpy(in.get(), values.data(), sizeof(double) * grid.size());
    plan->execute();
    coeffs_.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        coeffs_[i] = {out[i][0], out[i][1]};
    }
}

std::vector<double> Spectrum::apply(const Multiplier& multiplier) const {
    const int n = grid_.cells_per_axis();
    const int half = n / 2 + 1;
    const std::size_t ns = coeffs_.size();
    const double k0 = 2.0 * std::numbers::pi / grid_.box_length();
    const bool even = n % 2 == 0;

    auto in = fftw_buffer<fftw_complex>(ns);
    auto out = fftw_buffer<double>(grid_.size());
    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = std::make_unique<Plan>(grid_.dim() == 1 ? fftw_plan_dft_c2r_1d(n, in.get(), out.get(), FFTW_ESTIMATE)
                                                       : fftw_plan_dft_c2r_2d(n, n, in.get(), out.get(), FFTW_ESTIMATE));
    }
    const int rows = grid_.dim() == 2 ? n : 1;
    for (int j = 0; j < rows; ++j) {
        const int mj = j <= n / 2 ? j : j - n;
        for (int i = 0; i < half; ++i) {
            Mode mode{k0 * i, grid_.dim() == 2 ? k0 * mj : 0.0,
                      (even && i == n / 2) || (grid_.dim() == 2 && even && j == n / 2)};
            const std::size_t s = static_cast<std::size_t>(j) * half + i;
            const std::complex<double> v = multiplier(mode) * coeffs_[s];
            in[s][0] = v.real();
            in[s][1] = v.imag();
        }
    }
    plan->execute();
    const double norm = 1.0 / static_cast<double>(grid_.size());
    std::vector<double> result(grid_.size());
    for (std::size_t c = 0; c < grid_.size(); ++c) {
        result[c] = out[c] * norm;
    }
    return result;
}

} // namespace qlp
