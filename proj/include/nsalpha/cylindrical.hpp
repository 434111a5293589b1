#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

/// Phi(u) = phi((u, v_1), ..., (u, v_k)) with Phi'(u) = sum_j d_j phi(...) v_j.
///
/// phi and its gradient are expected to be bounded; the factories below saturate
/// with tanh instead of using compact support.
class CylindricalFunctional {
public:
    using Phi = std::function<double(std::span<const double>)>;
    using Gradient = std::function<void(std::span<const double>, std::span<double>)>;

    CylindricalFunctional(std::string id, std::vector<SpectralField> tests, Phi phi, Gradient gradient);

    const std::string& id() const { return id_; }
    std::size_t arity() const { return tests_.size(); }
    const std::vector<SpectralField>& tests() const { return tests_; }

    std::vector<double> pairings(const SpectralField& u) const;
    double operator()(const SpectralField& u) const;
    /// Phi'(u) as a field.
    SpectralField derivative(const SpectralField& u) const;
    /// <g, Phi'(u)> = sum_j d_j phi (g, v_j)
    double directional(const SpectralField& u, const SpectralField& g) const;

    /// tanh((u, v) / s)
    static CylindricalFunctional tanh_linear(const SpectralField& v, double s, std::string id = "tanh_lin");
    /// tanh((u, v)^2 / s^2)
    static CylindricalFunctional tanh_quadratic(const SpectralField& v, double s, std::string id = "tanh_quad");
    /// (u, v)^2 / 2 (unbounded; for analytic checks)
    static CylindricalFunctional quadratic(const SpectralField& v, std::string id = "quad");
    /// c, independent of u
    static CylindricalFunctional constant(const SpectralField& v, double c, std::string id = "const");

private:
    void check(const SpectralField& u) const;

    std::string id_;
    std::vector<SpectralField> tests_;
    Phi phi_;
    Gradient gradient_;
};

/// Six functionals: tanh-saturated linear and quadratic forms of the pairings with
/// the three lowest real eigenmodes, saturation scale s.
std::vector<CylindricalFunctional> default_dictionary(const BoxSpec& box, double s = 1.0);

}  // namespace nsalpha
