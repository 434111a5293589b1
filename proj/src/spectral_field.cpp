#include "nsalpha/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nsalpha/error.hpp"

namespace nsalpha {

namespace {

int dealias_cutoff(int n) { return (n + 2) / 3 - 1; }  // ceil(n/3) - 1

}  // namespace

BoxSpec::BoxSpec(RVec3 lengths, int n) {
    for (double l : lengths) {
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw Error(ErrorKind::configuration, "box lengths must be positive and finite");
        }
    }
    if (n < 4 || n % 2 != 0) {
        std::ostringstream msg;
        msg << "resolution must be even and >= 4, got " << n;
        throw Error(ErrorKind::configuration, msg.str());
    }
    auto g = std::make_shared<Geometry>();
    g->lengths = lengths;
    g->n = n;
    g->cutoff = dealias_cutoff(n);
    g->volume = lengths[0] * lengths[1] * lengths[2];
    const int K = g->cutoff;
    const int side = 2 * K + 1;
    g->modes.resize(static_cast<std::size_t>(side) * side * (K + 1));
    g->partner.assign(g->modes.size(), 0);
    g->lambda1 = std::numeric_limits<double>::infinity();
    g->lambda_max = 0.0;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = -K; k2 <= K; ++k2) {
            for (int k3 = 0; k3 <= K; ++k3) {
                const std::size_t s = (static_cast<std::size_t>(k1 + K) * side + (k2 + K)) * (K + 1) + k3;
                ModeInfo& m = g->modes[s];
                m.k = {k1, k2, k3};
                m.kvec = {two_pi * k1 / lengths[0], two_pi * k2 / lengths[1], two_pi * k3 / lengths[2]};
                m.lambda = m.kvec[0] * m.kvec[0] + m.kvec[1] * m.kvec[1] + m.kvec[2] * m.kvec[2];
                m.weight = k3 > 0 ? 2.0 : 1.0;
                if (m.k.is_zero()) {
                    m.weight = 0.0;
                    g->zero_slot = s;
                } else {
                    g->lambda1 = std::min(g->lambda1, m.lambda);
                    g->lambda_max = std::max(g->lambda_max, m.lambda);
                }
                if (k3 == 0) {
                    g->partner[s] = (static_cast<std::size_t>(-k1 + K) * side + (-k2 + K)) * (K + 1);
                } else {
                    g->partner[s] = s;
                }
            }
        }
    }
    geom_ = std::move(g);
}

bool BoxSpec::retains(const Wavevector& k) const {
    const int K = cutoff();
    return !k.is_zero() && std::abs(k.k1) <= K && std::abs(k.k2) <= K && std::abs(k.k3) <= K;
}

std::size_t BoxSpec::slot(const Wavevector& k) const {
    if (!retains(k) || k.k3 < 0) {
        std::ostringstream msg;
        msg << "wavevector (" << k.k1 << "," << k.k2 << "," << k.k3 << ") is not a stored retained mode";
        throw Error(ErrorKind::invalid_mode, msg.str());
    }
    const int K = cutoff();
    const int side = 2 * K + 1;
    return (static_cast<std::size_t>(k.k1 + K) * side + (k.k2 + K)) * (K + 1) + k.k3;
}

RVec3 BoxSpec::kvec(const Wavevector& k) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto& l = lengths();
    return {two_pi * k.k1 / l[0], two_pi * k.k2 / l[1], two_pi * k.k3 / l[2]};
}

SpectralField::SpectralField(BoxSpec box) : box_(std::move(box)), coeffs_(box_.size(), CVec3{}) {}

CVec3 SpectralField::at(const Wavevector& k) const {
    if (k.k3 >= 0) return coeffs_[box_.slot(k)];
    const CVec3& c = coeffs_[box_.slot({-k.k1, -k.k2, -k.k3})];
    return {std::conj(c[0]), std::conj(c[1]), std::conj(c[2])};
}

void SpectralField::set(const Wavevector& k, const CVec3& value) {
    const CVec3 conj_value{std::conj(value[0]), std::conj(value[1]), std::conj(value[2])};
    if (k.k3 < 0) {
        set({-k.k1, -k.k2, -k.k3}, conj_value);
        return;
    }
    const std::size_t s = box_.slot(k);
    coeffs_[s] = value;
    if (k.k3 == 0) coeffs_[box_.partner_slot(s)] = conj_value;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (!(box_ == other.box_)) throw Error(ErrorKind::dimension, "box mismatch in field addition");
    for (std::size_t s = 0; s < coeffs_.size(); ++s) {
        for (int c = 0; c < 3; ++c) coeffs_[s][c] += other.coeffs_[s][c];
    }
    divergence_free_ = divergence_free_ && other.divergence_free_;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    axpy(-1.0, other);
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) {
        for (auto& x : c) x *= s;
    }
    return *this;
}

void SpectralField::axpy(double s, const SpectralField& other) {
    if (!(box_ == other.box_)) throw Error(ErrorKind::dimension, "box mismatch in field update");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        for (int c = 0; c < 3; ++c) coeffs_[i][c] += s * other.coeffs_[i][c];
    }
    divergence_free_ = divergence_free_ && other.divergence_free_;
}

bool SpectralField::all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const CVec3& c) {
        return std::isfinite(c[0].real()) && std::isfinite(c[0].imag()) && std::isfinite(c[1].real()) &&
               std::isfinite(c[1].imag()) && std::isfinite(c[2].real()) && std::isfinite(c[2].imag());
    });
}

double SpectralField::reality_defect() const {
    double worst = std::abs(coeffs_[box_.zero_slot()][0]) + std::abs(coeffs_[box_.zero_slot()][1]) +
                   std::abs(coeffs_[box_.zero_slot()][2]);
    for (std::size_t s = 0; s < coeffs_.size(); ++s) {
        if (box_.mode(s).k.k3 != 0) continue;
        const CVec3& a = coeffs_[s];
        const CVec3& b = coeffs_[box_.partner_slot(s)];
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(a[c] - std::conj(b[c])));
    }
    return worst;
}

double SpectralField::divergence_defect() const {
    double worst = 0.0;
    for (std::size_t s = 0; s < coeffs_.size(); ++s) {
        const ModeInfo& m = box_.mode(s);
        if (m.weight == 0.0) continue;
        const Complex d = m.kvec[0] * coeffs_[s][0] + m.kvec[1] * coeffs_[s][1] + m.kvec[2] * coeffs_[s][2];
        worst = std::max(worst, std::abs(d) / std::sqrt(m.lambda));
    }
    return worst;
}

SpectralField trigonometric_field(const BoxSpec& box, const Wavevector& k, const RVec3& cos_amp,
                                  const RVec3& sin_amp) {
    // cos(k.x) a + sin(k.x) b  ->  c(k) = (a - i b) / 2
    SpectralField f(box);
    CVec3 c;
    for (int i = 0; i < 3; ++i) c[i] = Complex(0.5 * cos_amp[i], -0.5 * sin_amp[i]);
    f.set(k, c);
    return f;
}

}  // namespace nsalpha
