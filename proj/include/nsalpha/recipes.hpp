#pragma once

#include <cstdint>

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// Divergence-free forcing on the modes (1,0,0), (0,1,1), (1,1,0), (0,2,1), scaled to |f| = magnitude.
SpectralField low_mode_forcing(const BoxSpec& box, double magnitude);

/// Random divergence-free field on the lowest `dims` real eigen-directions with
/// amplitudes ~ N(0,1) / (1 + lambda), scaled to |u| = norm.
SpectralField random_low_field(const BoxSpec& box, std::uint64_t seed, double norm, std::size_t dims = 60);

}  // namespace nsalpha
