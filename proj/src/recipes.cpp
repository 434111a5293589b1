#include "nsalpha/recipes.hpp"

#include <random>

#include "nsalpha/eigenbasis.hpp"
#include "nsalpha/operators.hpp"

namespace nsalpha {

SpectralField low_mode_forcing(const BoxSpec& box, double magnitude) {
    if (magnitude == 0.0) {
        SpectralField zero(box);
        zero.mark_divergence_free(true);
        return zero;
    }
    SpectralField f = trigonometric_field(box, {1, 0, 0}, {0.0, 1.0, 0.5}, {0.0, 0.3, 0.0});
    f += trigonometric_field(box, {0, 1, 1}, {1.0, 0.0, 0.0}, {0.0, 0.4, -0.4});
    f += trigonometric_field(box, {1, 1, 0}, {0.0, 0.0, 0.7}, {0.5, -0.5, 0.0});
    f += trigonometric_field(box, {0, 2, 1}, {0.6, 0.0, 0.0}, {0.0, 0.0, 0.0});
    f = leray_project(f);
    f *= magnitude / norm_h(f);
    return f;
}

SpectralField random_low_field(const BoxSpec& box, std::uint64_t seed, double norm, std::size_t dims) {
    const Eigenbasis basis(box);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    SpectralField u(box);
    for (std::size_t i = 0; i < dims && i < basis.dimension(); ++i) basis.add(u, i, n(rng) / (1.0 + basis[i].lambda));
    u = leray_project(u);
    if (norm == 0.0) return SpectralField(leray_project(SpectralField(box)));
    u *= norm / norm_h(u);
    return u;
}

}  // namespace nsalpha
