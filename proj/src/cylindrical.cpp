#include "nsalpha/cylindrical.hpp"

#include <cmath>

#include "nsalpha/eigenbasis.hpp"
#include "nsalpha/error.hpp"
#include "nsalpha/operators.hpp"

namespace nsalpha {

CylindricalFunctional::CylindricalFunctional(std::string id, std::vector<SpectralField> tests, Phi phi,
                                             Gradient gradient)
    : id_(std::move(id)), tests_(std::move(tests)), phi_(std::move(phi)), gradient_(std::move(gradient)) {
    if (tests_.empty()) throw Error(ErrorKind::configuration, "cylindrical functional '" + id_ + "' has no test fields");
    for (const auto& v : tests_) {
        if (!(v.box() == tests_.front().box()))
            throw Error(ErrorKind::dimension, "test fields of '" + id_ + "' live on different boxes");
    }
}

void CylindricalFunctional::check(const SpectralField& u) const {
    if (!(u.box() == tests_.front().box()))
        throw Error(ErrorKind::dimension, "field and test fields of '" + id_ + "' live on different boxes");
}

std::vector<double> CylindricalFunctional::pairings(const SpectralField& u) const {
    check(u);
    std::vector<double> out;
    out.reserve(tests_.size());
    for (const auto& v : tests_) out.push_back(inner_product(u, v));
    return out;
}

double CylindricalFunctional::operator()(const SpectralField& u) const { return phi_(pairings(u)); }

SpectralField CylindricalFunctional::derivative(const SpectralField& u) const {
    const std::vector<double> x = pairings(u);
    std::vector<double> g(x.size());
    gradient_(x, g);
    SpectralField out(u.box());
    for (std::size_t j = 0; j < g.size(); ++j) out.axpy(g[j], tests_[j]);
    return out;
}

double CylindricalFunctional::directional(const SpectralField& u, const SpectralField& g) const {
    const std::vector<double> x = pairings(u);
    std::vector<double> grad(x.size());
    gradient_(x, grad);
    double sum = 0.0;
    for (std::size_t j = 0; j < grad.size(); ++j) sum += grad[j] * inner_product(g, tests_[j]);
    return sum;
}

CylindricalFunctional CylindricalFunctional::tanh_linear(const SpectralField& v, double s, std::string id) {
    return {std::move(id), {v}, [s](std::span<const double> x) { return std::tanh(x[0] / s); },
            [s](std::span<const double> x, std::span<double> g) {
                const double c = std::cosh(x[0] / s);
                g[0] = 1.0 / (s * c * c);
            }};
}

CylindricalFunctional CylindricalFunctional::tanh_quadratic(const SpectralField& v, double s, std::string id) {
    const double s2 = s * s;
    return {std::move(id), {v}, [s2](std::span<const double> x) { return std::tanh(x[0] * x[0] / s2); },
            [s2](std::span<const double> x, std::span<double> g) {
                const double c = std::cosh(x[0] * x[0] / s2);
                g[0] = 2.0 * x[0] / (s2 * c * c);
            }};
}

CylindricalFunctional CylindricalFunctional::quadratic(const SpectralField& v, std::string id) {
    return {std::move(id), {v}, [](std::span<const double> x) { return 0.5 * x[0] * x[0]; },
            [](std::span<const double> x, std::span<double> g) { g[0] = x[0]; }};
}

CylindricalFunctional CylindricalFunctional::constant(const SpectralField& v, double c, std::string id) {
    return {std::move(id), {v}, [c](std::span<const double>) { return c; },
            [](std::span<const double>, std::span<double> g) { g[0] = 0.0; }};
}

std::vector<CylindricalFunctional> default_dictionary(const BoxSpec& box, double s) {
    const Eigenbasis basis(box);
    std::vector<CylindricalFunctional> out;
    for (std::size_t i = 0; i < 3; ++i) {
        out.push_back(CylindricalFunctional::tanh_linear(basis.field(i), s, "tanh_lin_e" + std::to_string(i + 1)));
    }
    for (std::size_t i = 0; i < 3; ++i) {
        out.push_back(
            CylindricalFunctional::tanh_quadratic(basis.field(i), s, "tanh_quad_e" + std::to_string(i + 1)));
    }
    return out;
}

}  // namespace nsalpha
