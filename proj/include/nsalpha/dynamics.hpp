#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nsalpha/operators.hpp"
#include "nsalpha/psi.hpp"
#include "nsalpha/spectral_field.hpp"

namespace nsalpha {

enum class Model { ns_alpha, nse_galerkin };
enum class Scheme { if_midpoint, if_rk4 };

std::string to_string(Model m);
std::string to_string(Scheme s);
Model parse_model(const std::string& s);
Scheme parse_scheme(const std::string& s);

/// Viscosity, filter length and time-independent forcing, with lambda_1 and R_0 derived.
class PhysParams {
public:
    PhysParams(double nu, double alpha, SpectralField forcing);

    double nu() const { return nu_; }
    double alpha() const { return alpha_; }
    const SpectralField& forcing() const { return forcing_; }
    const BoxSpec& box() const { return forcing_.box(); }
    double lambda1() const { return forcing_.box().lambda1(); }
    /// |f| (constant in time, so equal to the L^inf(I;H) norm)
    double forcing_norm() const { return forcing_norm_; }
    /// R_0 = |f| / (lambda_1 nu)
    double r0() const { return forcing_norm_ / (lambda1() * nu_); }

private:
    double nu_;
    double alpha_;
    SpectralField forcing_;
    double forcing_norm_;
};

struct SolverConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    Scheme scheme = Scheme::if_midpoint;
    int save_stride = 1;
    Model model = Model::ns_alpha;
    /// Switches the advection term off (linear Stokes dynamics); used by analytic checks.
    bool nonlinear = true;

    void validate() const;
    long long steps() const;
};

/// Filter length actually used by the model (NSE-Galerkin ignores alpha).
double model_alpha(const PhysParams& p, Model model);
/// (1 + alpha^2 A)^{-1/2} f, the forcing seen by the w-variable.
SpectralField effective_forcing(const PhysParams& p, Model model);
/// (1 + alpha^2 A)^{-1/2} B(u, v) in rotational form with u = filter^{-1/2} w, v = filter^{+1/2} w.
SpectralField nonlinear_term(const SpectralField& w, const PhysParams& p, Model model);
/// dw/dt = g - nu A w - N(w)
SpectralField time_derivative(const SpectralField& w, const PhysParams& p, const SolverConfig& cfg);

/// Time-sampled solution path on a uniform grid; an immutable view that shares storage,
/// so restriction and time shift are cheap.
class Trajectory {
public:
    Trajectory(double t0, double spacing, std::vector<SpectralField> states, PhysParams params, SolverConfig config);

    std::size_t size() const { return count_; }
    double t0() const { return t0_; }
    double spacing() const { return spacing_; }
    double time(std::size_t i) const { return t0_ + static_cast<double>(i) * spacing_; }
    double t_end() const { return time(count_ - 1); }
    const SpectralField& state(std::size_t i) const { return (*states_)[first_ + i]; }
    const SpectralField& operator[](std::size_t i) const { return state(i); }
    const PhysParams& params() const { return params_; }
    const SolverConfig& config() const { return config_; }
    const BoxSpec& box() const { return state(0).box(); }

    struct GridPoint {
        std::size_t index;
        double rounding;  // |t - time(index)|
    };
    /// Nearest grid point (ties round half away from zero). Throws range outside the span.
    GridPoint locate(double t) const;

    /// sigma_tau: (sigma_tau u)(t) = u(t + tau), kept on the same left endpoint.
    Trajectory shifted(double tau) const;
    /// Pi_J for J = [ta, tb] (nearest grid points).
    Trajectory restricted(double ta, double tb) const;
    /// Same path with every state replaced (planted defects, scaling).
    Trajectory with_states(std::vector<SpectralField> states) const;

    /// Filtered velocity u = (1 + alpha^2 A)^{-1/2} w.
    SpectralField velocity(std::size_t i) const;

    bool same_grid(const Trajectory& other) const;

private:
    Trajectory(std::shared_ptr<const std::vector<SpectralField>> states, std::size_t first, std::size_t count,
               double t0, double spacing, PhysParams params, SolverConfig config);

    std::shared_ptr<const std::vector<SpectralField>> states_;
    std::size_t first_;
    std::size_t count_;
    double t0_;
    double spacing_;
    PhysParams params_;
    SolverConfig config_;
};

/// Advance one time step. Linear part (viscosity and forcing) is integrated exactly.
SpectralField step(const SpectralField& w, const PhysParams& p, const SolverConfig& cfg, double t = 0.0);

/// S(t) w0 on [t0, t0 + t_end]; bit-deterministic.
Trajectory solve(const SpectralField& w0, const PhysParams& p, const SolverConfig& cfg, double t0 = 0.0);

/// Per recorded interval: 1/2|w|^2 + nu int ||w||^2 - int (g, w), LHS - RHS, trapezoid quadrature.
std::vector<double> energy_equality_residual(const Trajectory& traj);
/// Running sum of the per-interval residuals; entry i covers [t_0, t_i].
std::vector<double> cumulative_energy_residual(const Trajectory& traj);

/// Constants of the a-priori envelope Y_J(R).
struct AprioriEnvelope {
    /// Value of M frozen from the calibration suite (see calibrate_constant_m).
    static constexpr double calibrated_m = 64.0;

    double radius = 0.0;
    double m = calibrated_m;
    double c = 1.0;

    void validate(const PhysParams& p) const;
};

struct AprioriReport {
    double slack_energy = 0.0;    // exponential H bound
    double slack_dissipation = 0.0;  // L^2(t',t;V) bound
    double slack_dual = 0.0;      // L^2(t',t;D(A)') bound on dw/dt
    double scale_energy = 0.0;
    double scale_dissipation = 0.0;
    double scale_dual = 0.0;
    double max_norm = 0.0;        // max_t |w(t)|
    bool absorbing_ball = true;   // |w(t)| <= R (1 + 1e-8) for all t
    std::size_t pairs = 0;

    bool passed(double tolerance = 1e-8) const;
};

/// Evaluates the three a-priori estimates over every recorded pair t' < t.
AprioriReport apriori_check(const Trajectory& traj, const AprioriEnvelope& env);

/// Smallest M (real, not rounded) for which the dissipation and dual bounds hold on traj.
double required_constant_m(const Trajectory& traj, double c = 1.0);
/// Smallest power of two >= 1 covering required_constant_m over a suite.
double calibrate_constant_m(std::span<const Trajectory> suite, double c = 1.0);

/// max over t' < t of psi(|w(t)|^2) - psi(|w(t')|^2) - |f|/(lambda_1 nu) sup psi' (t - t').
double strengthened_energy_check(const Trajectory& traj, const PsiFunction& psi);

struct FbNorm {
    double l2b_v = 0.0;     // sup over unit windows of int ||z||^2
    double linf_h = 0.0;    // sup |z|
    double l2b_dual = 0.0;  // sup over unit windows of int ||dz/dt||_{D(A)'}^2
    double total() const { return l2b_v + linf_h + l2b_dual; }
};

/// F^b_I norm with window suprema taken on the saved grid.
FbNorm fb_norm(const Trajectory& traj);

}  // namespace nsalpha
