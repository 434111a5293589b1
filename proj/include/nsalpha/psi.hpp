#pragma once

#include <functional>
#include <string>

namespace nsalpha {

/// Member of the class Psi: C^1 on [0, inf), nonnegative, with bounded derivative.
class PsiFunction {
public:
    PsiFunction(std::string name, std::function<double(double)> value, std::function<double(double)> derivative,
                double sup_derivative);

    static PsiFunction identity();
    static PsiFunction saturating();  // r / (1 + r)
    static PsiFunction tanh();
    static PsiFunction constant(double c);

    double operator()(double r) const { return value_(r); }
    double derivative(double r) const { return derivative_(r); }
    double sup_derivative() const { return sup_derivative_; }
    const std::string& name() const { return name_; }

    /// Dense sampling on [0, r_max]: psi >= 0, psi' >= 0, psi' <= declared sup.
    /// Throws invalid_psi on failure.
    void certify(double r_max, int samples = 4096) const;

private:
    std::string name_;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    double sup_derivative_;
};

}  // namespace nsalpha
