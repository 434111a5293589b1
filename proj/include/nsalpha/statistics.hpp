#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsalpha/cylindrical.hpp"
#include "nsalpha/ensemble.hpp"
#include "nsalpha/psi.hpp"

namespace nsalpha {

/// max over grid intervals in [ta, tb] of
///   | (m(t_{i+1}) - m(t_i)) / h - (G(t_i) + G(t_{i+1})) / 2 |,
/// m(t) = int Phi d mu_t, G(t) = int <F(u), Phi'(u)> d mu_t, F the model right-hand side.
struct LiouvilleResidual {
    double residual = 0.0;
    double scale = 0.0;  // max |G|
    std::size_t intervals = 0;
};
LiouvilleResidual liouville_residual(const EnsembleMeasure& rho, const CylindricalFunctional& phi, double ta,
                                     double tb);
/// Same for several functionals, sharing the right-hand side evaluations.
std::vector<LiouvilleResidual> liouville_residuals(const EnsembleMeasure& rho,
                                                  const std::vector<CylindricalFunctional>& phis, double ta,
                                                  double tb);

/// Signed worst value over grid intervals in [ta, tb] of
///   1/2 d/dt int psi(|u|^2) + nu int psi'(|u|^2) ||u||^2 - int psi'(|u|^2) (g, u),
/// with the time derivative by differences and the rest by interval midpoint averages.
/// The inequality asks for <= 0; Galerkin dynamics give equality up to discretisation.
struct StrengthenedEnergyResidual {
    double worst = 0.0;       // signed maximum
    double worst_abs = 0.0;   // maximum magnitude (equality defect)
    double scale = 0.0;       // max of the dissipation + work magnitudes
    bool holds(double tolerance = 1e-6) const { return worst <= tolerance * std::max(scale, 1e-300); }
};
StrengthenedEnergyResidual mean_strengthened_energy_residual(const EnsembleMeasure& rho, const PsiFunction& psi,
                                                             double ta, double tb);

/// Per member, max over intervals of the relative trapezoid defect of the equation
///   |(w_{i+1} - w_i)/h - (F(w_i) + F(w_{i+1}))/2|_{D(A)'} / max_i |F(w_i)|_{D(A)'}.
std::vector<double> equation_residuals(const EnsembleMeasure& rho);

struct VfDiagnostics {
    // (i) carried by solutions
    std::vector<double> member_residuals;
    double carried_tolerance = 0.0;
    std::vector<std::size_t> failing_members;
    bool carried = false;
    // (ii) locally bounded mean energy
    double sup_mean_energy = 0.0;
    bool bounded_energy = false;
    // (iii) right continuity at t0 for every psi: delta_1 <= 0.75 delta_2 + 1e-10 scale
    struct Continuity {
        std::string psi;
        double delta1 = 0.0;
        double delta2 = 0.0;
        bool passed = false;
    };
    std::vector<Continuity> continuity;
    bool right_continuous = false;

    bool passed() const { return carried && bounded_energy && right_continuous; }
};
VfDiagnostics vf_diagnostics(const EnsembleMeasure& rho, const std::vector<PsiFunction>& psis,
                             double carried_tolerance = 1e-2);
std::vector<PsiFunction> default_psi_list();

struct ConvergenceSetup {
    std::vector<double> alphas;  // nonincreasing, positive
    InitialMeasureSpec mu0;
    std::size_t members = 64;
    std::vector<double> times;
    double nu = 0.1;
    std::shared_ptr<const SpectralField> forcing;
    SolverConfig config;  // t_end is taken from max(times)
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t metric_modes = 32;
    double pass_fraction = 0.8;
};

struct ConvergenceReport {
    std::vector<double> alphas;
    std::vector<std::string> functionals;
    std::vector<double> times;
    /// moments[a][f][t]; the reference (alpha = 0) row is kept separately.
    std::vector<std::vector<std::vector<double>>> moments;
    std::vector<std::vector<double>> reference;  // [f][t]
    std::vector<std::vector<std::vector<double>>> gaps;  // |moments - reference|
    std::vector<double> successive;  // max over (f, t) of |m(alpha_i) - m(alpha_{i+1})|
    std::vector<double> semidistance;  // to the reference ensemble
    std::size_t monotone_cells = 0;
    std::size_t cells = 0;
    bool gaps_decrease = false;
    bool semidistance_nonincreasing = false;
    bool passed() const { return gaps_decrease && semidistance_nonincreasing; }
};
ConvergenceReport convergence_experiment(const ConvergenceSetup& setup,
                                         const std::vector<CylindricalFunctional>& functionals);

struct StationaryReport {
    double spinup = 0.0;
    double spacing = 0.0;
    std::vector<double> windows;
    std::vector<double> taus;
    std::vector<std::string> functionals;
    /// residual[w] = max over (f, tau) | int Phi o sigma_tau d rho_W - int Phi d rho_W |
    std::vector<double> residual;
    /// mean_energy[w][k]: int |u|^2 d(Pi_t rho_W) at t = 0 and t = tau_k
    std::vector<std::vector<double>> mean_energy;
    bool nonincreasing = false;
};
/// Window-translate ensembles {sigma_{spinup + j h} u : j h <= W} of a single trajectory.
StationaryReport stationary_from_trajectory(const Trajectory& traj, double spinup, const std::vector<double>& windows,
                                            const std::vector<double>& taus,
                                            const std::vector<CylindricalFunctional>& functionals);
StationaryReport stationary_experiment(const SpectralField& w0, const PhysParams& p, SolverConfig cfg, double spinup,
                                       const std::vector<double>& windows, const std::vector<double>& taus,
                                       const std::vector<CylindricalFunctional>& functionals);

}  // namespace nsalpha
