#include "nsalpha/psi.hpp"

#include <cmath>
#include <sstream>

#include "nsalpha/error.hpp"

namespace nsalpha {

PsiFunction::PsiFunction(std::string name, std::function<double(double)> value,
                         std::function<double(double)> derivative, double sup_derivative)
    : name_(std::move(name)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      sup_derivative_(sup_derivative) {
    if (!std::isfinite(sup_derivative_) || sup_derivative_ < 0.0) {
        throw Error(ErrorKind::invalid_psi, "psi '" + name_ + "' needs a finite nonnegative derivative bound");
    }
}

PsiFunction PsiFunction::identity() {
    return {"r", [](double r) { return r; }, [](double) { return 1.0; }, 1.0};
}

PsiFunction PsiFunction::saturating() {
    return {"r/(1+r)", [](double r) { return r / (1.0 + r); },
            [](double r) { return 1.0 / ((1.0 + r) * (1.0 + r)); }, 1.0};
}

PsiFunction PsiFunction::tanh() {
    return {"tanh(r)", [](double r) { return std::tanh(r); },
            [](double r) {
                const double c = std::cosh(r);
                return 1.0 / (c * c);
            },
            1.0};
}

PsiFunction PsiFunction::constant(double c) {
    return {"const", [c](double) { return c; }, [](double) { return 0.0; }, 0.0};
}

void PsiFunction::certify(double r_max, int samples) const {
    for (int i = 0; i <= samples; ++i) {
        const double r = r_max * static_cast<double>(i) / samples;
        const double v = value_(r);
        const double d = derivative_(r);
        if (!std::isfinite(v) || !std::isfinite(d) || v < 0.0 || d < 0.0 ||
            d > sup_derivative_ * (1.0 + 1e-12) + 1e-300) {
            std::ostringstream msg;
            msg << "psi '" << name_ << "' leaves the admissible class at r = " << r << " (psi = " << v
                << ", psi' = " << d << ", declared sup psi' = " << sup_derivative_ << ")";
            throw Error(ErrorKind::invalid_psi, msg.str());
        }
    }
}

}  // namespace nsalpha
