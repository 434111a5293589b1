#pragma once

#include <vector>

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// One real, H-normalised Stokes eigenfunction sqrt(2/|Omega|) {cos|sin}(k.x) e.
struct RealEigenmode {
    Wavevector k;         // canonical representative of {k, -k}
    int polarization;     // 0 or 1
    bool sine;            // false: cos(k.x), true: sin(k.x)
    double lambda;
    RVec3 direction;      // unit vector orthogonal to k
};

/// Real orthonormal eigenbasis of A on the retained divergence-free space.
///
/// Order: ascending lambda, then (k1,k2,k3) lexicographic, then polarization,
/// then cos before sin. A conjugate pair (k, polarization) spans two real dimensions.
class Eigenbasis {
public:
    explicit Eigenbasis(const BoxSpec& box);

    const BoxSpec& box() const { return box_; }
    std::size_t dimension() const { return modes_.size(); }
    const RealEigenmode& operator[](std::size_t i) const { return modes_[i]; }

    /// (u, w_i)
    double pairing(const SpectralField& u, std::size_t i) const;
    /// w_i as a field.
    SpectralField field(std::size_t i) const;
    /// u += amplitude * w_i
    void add(SpectralField& u, std::size_t i, double amplitude) const;

private:
    BoxSpec box_;
    std::vector<RealEigenmode> modes_;
    double amplitude_;  // sqrt(2 / volume)
};

/// P_m: keeps the first m real eigen-directions; m beyond dimension() is the identity.
SpectralField galerkin_project(const SpectralField& u, std::size_t m);
SpectralField galerkin_project(const Eigenbasis& basis, const SpectralField& u, std::size_t m);

}  // namespace nsalpha
