#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace nsalpha {

using Complex = std::complex<double>;
using CVec3 = std::array<Complex, 3>;
using RVec3 = std::array<double, 3>;

/// Integer wavevector (k1, k2, k3).
struct Wavevector {
    int k1 = 0;
    int k2 = 0;
    int k3 = 0;

    bool is_zero() const { return k1 == 0 && k2 == 0 && k3 == 0; }
    friend bool operator==(const Wavevector&, const Wavevector&) = default;
    friend auto operator<=>(const Wavevector&, const Wavevector&) = default;
};

/// One stored Fourier slot of the half spectrum (k3 >= 0).
struct ModeInfo {
    Wavevector k;
    RVec3 kvec;        // 2*pi*(k1/L1, k2/L2, k3/L3)
    double lambda;     // |kvec|^2, the Stokes eigenvalue
    double weight;     // 2 for k3 > 0 (implicit conjugate), 1 on the k3 = 0 plane, 0 at k = 0
};

/// Periodic box (0,L1)x(0,L2)x(0,L3) with N collocation points per direction.
///
/// Fields keep the dealiased cube |k_i| <= cutoff() with cutoff = ceil(N/3) - 1,
/// stored as a half spectrum k3 in [0, cutoff]. Conjugate partners with k3 > 0
/// are implicit; on the k3 = 0 plane both k and -k are stored explicitly.
class BoxSpec {
public:
    BoxSpec(RVec3 lengths, int n);

    const RVec3& lengths() const { return geom_->lengths; }
    int n() const { return geom_->n; }
    int cutoff() const { return geom_->cutoff; }
    double volume() const { return geom_->volume; }

    /// Number of stored coefficient slots, zero mode slot included.
    std::size_t size() const { return geom_->modes.size(); }
    /// All stored slots. The zero mode slot has weight 0 and lambda 0 and is never populated.
    std::span<const ModeInfo> modes() const { return geom_->modes; }
    const ModeInfo& mode(std::size_t slot) const { return geom_->modes[slot]; }
    std::size_t zero_slot() const { return geom_->zero_slot; }

    /// True when k lies in the retained (dealiased) set, zero mode excluded.
    bool retains(const Wavevector& k) const;
    /// Slot of a stored wavevector (k3 >= 0, retained). Throws invalid_mode otherwise.
    std::size_t slot(const Wavevector& k) const;
    /// Slot holding the conjugate partner of a k3 = 0 slot.
    std::size_t partner_slot(std::size_t slot) const { return geom_->partner[slot]; }

    RVec3 kvec(const Wavevector& k) const;
    /// Smallest Stokes eigenvalue over retained modes.
    double lambda1() const { return geom_->lambda1; }
    double lambda_max() const { return geom_->lambda_max; }

    friend bool operator==(const BoxSpec& a, const BoxSpec& b) {
        return a.geom_ == b.geom_ || (a.geom_->n == b.geom_->n && a.geom_->lengths == b.geom_->lengths);
    }

private:
    struct Geometry {
        RVec3 lengths;
        int n;
        int cutoff;
        double volume;
        double lambda1;
        double lambda_max;
        std::size_t zero_slot;
        std::vector<ModeInfo> modes;
        std::vector<std::size_t> partner;
    };
    std::shared_ptr<const Geometry> geom_;
};

/// Divergence-free-capable, zero-mean periodic vector field in Fourier space.
///
/// Convention: u(x) = sum_k c(k) exp(i kvec.x) over the full spectrum.
class SpectralField {
public:
    explicit SpectralField(BoxSpec box);

    const BoxSpec& box() const { return box_; }
    std::span<CVec3> coefficients() { return coeffs_; }
    std::span<const CVec3> coefficients() const { return coeffs_; }
    CVec3& operator[](std::size_t slot) { return coeffs_[slot]; }
    const CVec3& operator[](std::size_t slot) const { return coeffs_[slot]; }

    /// Coefficient of any retained wavevector, using conjugate symmetry for k3 < 0.
    CVec3 at(const Wavevector& k) const;
    /// Set the coefficient at k and its conjugate partner at -k.
    void set(const Wavevector& k, const CVec3& value);

    bool divergence_free() const { return divergence_free_; }
    void mark_divergence_free(bool flag) { divergence_free_ = flag; }

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);
    /// this += s * other
    void axpy(double s, const SpectralField& other);

    bool all_finite() const;
    /// max |c(-k) - conj c(k)| over the k3 = 0 plane.
    double reality_defect() const;
    /// max |k . c(k)| / |k|.
    double divergence_defect() const;

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

private:
    BoxSpec box_;
    std::vector<CVec3> coeffs_;
    bool divergence_free_ = false;
};

/// Real field cos(k.x) a + sin(k.x) b as Fourier coefficients (not projected).
SpectralField trigonometric_field(const BoxSpec& box, const Wavevector& k, const RVec3& cos_amp,
                                  const RVec3& sin_amp);

}  // namespace nsalpha
