#pragma once

#include <span>
#include <vector>

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// Transforms between retained half-spectrum coefficients and the N^3 collocation grid.
///
/// Plans are shared per resolution and created under a lock; execution uses
/// caller-owned buffers, so distinct instances may run concurrently.
class FourierGrid {
public:
    explicit FourierGrid(const BoxSpec& box);

    std::size_t grid_size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    /// Scalar synthesis: out(x) = sum_k c(k) exp(i k.x); c indexed by box slot.
    void to_physical(std::span<const Complex> coeffs, std::span<double> out);
    /// Scalar analysis truncated to the retained set; writes one value per slot.
    void to_spectral(std::span<const double> values, std::span<Complex> coeffs);

private:
    BoxSpec box_;
    int n_;
    std::size_t nz_;
    std::vector<std::size_t> grid_index_;  // slot -> offset in the complex half grid
    std::vector<Complex> spectrum_;
    void* forward_ = nullptr;
    void* inverse_ = nullptr;
};

}  // namespace nsalpha
