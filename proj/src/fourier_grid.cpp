#include "nsalpha/fourier_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

namespace nsalpha {

namespace {

struct PlanPair {
    fftw_plan forward;
    fftw_plan inverse;
};

// FFTW planning is not thread safe; execution with the new-array interface is.
PlanPair shared_plans(int n) {
    static std::mutex mutex;
    static std::map<int, PlanPair> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
    const std::size_t complex_size = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    std::vector<double> real(real_size);
    std::vector<Complex> spec(complex_size);
    auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p{fftw_plan_dft_r2c_3d(n, n, n, real.data(), cspec, flags),
               fftw_plan_dft_c2r_3d(n, n, n, cspec, real.data(), flags)};
    cache.emplace(n, p);
    return p;
}

}  // namespace

FourierGrid::FourierGrid(const BoxSpec& box)
    : box_(box), n_(box.n()), nz_(static_cast<std::size_t>(box.n() / 2 + 1)) {
    const PlanPair plans = shared_plans(n_);
    forward_ = plans.forward;
    inverse_ = plans.inverse;
    spectrum_.resize(static_cast<std::size_t>(n_) * n_ * nz_);
    grid_index_.resize(box_.size());
    for (std::size_t s = 0; s < box_.size(); ++s) {
        const Wavevector& k = box_.mode(s).k;
        const std::size_t ix = static_cast<std::size_t>((k.k1 + n_) % n_);
        const std::size_t iy = static_cast<std::size_t>((k.k2 + n_) % n_);
        grid_index_[s] = (ix * n_ + iy) * nz_ + static_cast<std::size_t>(k.k3);
    }
}

void FourierGrid::to_physical(std::span<const Complex> coeffs, std::span<double> out) {
    std::fill(spectrum_.begin(), spectrum_.end(), Complex{});
    for (std::size_t s = 0; s < coeffs.size(); ++s) spectrum_[grid_index_[s]] = coeffs[s];
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_), reinterpret_cast<fftw_complex*>(spectrum_.data()),
                         out.data());
}

void FourierGrid::to_spectral(std::span<const double> values, std::span<Complex> coeffs) {
    // r2c does not modify its input, but the FFTW signature is non-const.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), const_cast<double*>(values.data()),
                         reinterpret_cast<fftw_complex*>(spectrum_.data()));
    const double scale = 1.0 / static_cast<double>(grid_size());
    for (std::size_t s = 0; s < coeffs.size(); ++s) coeffs[s] = spectrum_[grid_index_[s]] * scale;
    coeffs[box_.zero_slot()] = Complex{};
}

}  // namespace nsalpha
