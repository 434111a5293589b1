#include "nsalpha/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "nsalpha/error.hpp"
#include "nsalpha/operators.hpp"

namespace nsalpha {

namespace {

bool canonical(const Wavevector& k) {
    return k.k3 > 0 || (k.k3 == 0 && k.k2 > 0) || (k.k3 == 0 && k.k2 == 0 && k.k1 > 0);
}

RVec3 cross(const RVec3& a, const RVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

RVec3 normalized(const RVec3& a) {
    const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    return {a[0] / n, a[1] / n, a[2] / n};
}

std::pair<RVec3, RVec3> polarizations(const RVec3& kvec) {
    int axis = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(kvec[i]) < std::abs(kvec[axis])) axis = i;
    }
    RVec3 e{};
    e[axis] = 1.0;
    const RVec3 khat = normalized(kvec);
    const RVec3 p1 = normalized(cross(khat, e));
    const RVec3 p2 = cross(khat, p1);
    return {p1, p2};
}

}  // namespace

Eigenbasis::Eigenbasis(const BoxSpec& box) : box_(box), amplitude_(std::sqrt(2.0 / box.volume())) {
    for (const ModeInfo& m : box.modes()) {
        if (m.weight == 0.0 || !canonical(m.k)) continue;
        const auto [p1, p2] = polarizations(m.kvec);
        for (int pol = 0; pol < 2; ++pol) {
            for (bool sine : {false, true}) {
                modes_.push_back({m.k, pol, sine, m.lambda, pol == 0 ? p1 : p2});
            }
        }
    }
    std::stable_sort(modes_.begin(), modes_.end(), [](const RealEigenmode& a, const RealEigenmode& b) {
        return std::tie(a.lambda, a.k, a.polarization, a.sine) < std::tie(b.lambda, b.k, b.polarization, b.sine);
    });
}

double Eigenbasis::pairing(const SpectralField& u, std::size_t i) const {
    const RealEigenmode& w = modes_[i];
    const CVec3& c = u[box_.slot(w.k)];
    const Complex dot = c[0] * w.direction[0] + c[1] * w.direction[1] + c[2] * w.direction[2];
    const double scale = box_.volume() * amplitude_;
    return w.sine ? -scale * dot.imag() : scale * dot.real();
}

void Eigenbasis::add(SpectralField& u, std::size_t i, double amplitude) const {
    const RealEigenmode& w = modes_[i];
    const std::size_t s = box_.slot(w.k);
    const Complex factor = w.sine ? Complex(0.0, -0.5 * amplitude * amplitude_) : Complex(0.5 * amplitude * amplitude_, 0.0);
    for (int c = 0; c < 3; ++c) u[s][c] += factor * w.direction[c];
    if (w.k.k3 == 0) {
        const std::size_t p = box_.partner_slot(s);
        for (int c = 0; c < 3; ++c) u[p][c] += std::conj(factor) * w.direction[c];
    }
}

SpectralField Eigenbasis::field(std::size_t i) const {
    SpectralField f(box_);
    add(f, i, 1.0);
    f.mark_divergence_free(true);
    return f;
}

SpectralField galerkin_project(const Eigenbasis& basis, const SpectralField& u, std::size_t m) {
    if (m == 0) throw Error(ErrorKind::precondition, "Galerkin projector needs m >= 1");
    if (m >= basis.dimension()) return leray_project(u);
    SpectralField out(u.box());
    for (std::size_t i = 0; i < m; ++i) basis.add(out, i, basis.pairing(u, i));
    out.mark_divergence_free(true);
    return out;
}

SpectralField galerkin_project(const SpectralField& u, std::size_t m) {
    return galerkin_project(Eigenbasis(u.box()), u, m);
}

}  // namespace nsalpha
