#include "nsalpha/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "nsalpha/error.hpp"
#include "nsalpha/operators.hpp"

namespace nsalpha {

namespace {

struct IndexRange {
    std::size_t first;
    std::size_t last;
};

IndexRange index_range(const Trajectory& grid, double ta, double tb) {
    if (tb < ta) throw Error(ErrorKind::range, "interval is reversed");
    return {grid.locate(ta).index, grid.locate(tb).index};
}

}  // namespace

std::vector<LiouvilleResidual> liouville_residuals(const EnsembleMeasure& rho,
                                                  const std::vector<CylindricalFunctional>& phis, double ta,
                                                  double tb) {
    const Trajectory& grid = rho.grid();
    const auto [first, last] = index_range(grid, ta, tb);
    const double h = grid.spacing();
    const std::size_t count = last - first + 1;
    std::vector<std::vector<double>> m(phis.size(), std::vector<double>(count, 0.0));
    std::vector<std::vector<double>> g(phis.size(), std::vector<double>(count, 0.0));
    // Accumulate member by member (ascending), evaluating the right-hand side once per state.
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const Trajectory& u = rho.member(i);
        const double w = rho.weight(i);
        for (std::size_t k = 0; k < count; ++k) {
            const SpectralField& x = u[first + k];
            const SpectralField rhs = time_derivative(x, u.params(), u.config());
            for (std::size_t f = 0; f < phis.size(); ++f) {
                m[f][k] += w * phis[f](x);
                g[f][k] += w * phis[f].directional(x, rhs);
            }
        }
    }
    std::vector<LiouvilleResidual> out(phis.size());
    for (std::size_t f = 0; f < phis.size(); ++f) {
        for (double x : g[f]) out[f].scale = std::max(out[f].scale, std::abs(x));
        for (std::size_t k = 0; k + 1 < count; ++k) {
            const double r = std::abs((m[f][k + 1] - m[f][k]) / h - 0.5 * (g[f][k] + g[f][k + 1]));
            out[f].residual = std::max(out[f].residual, r);
            ++out[f].intervals;
        }
    }
    return out;
}

LiouvilleResidual liouville_residual(const EnsembleMeasure& rho, const CylindricalFunctional& phi, double ta,
                                     double tb) {
    return liouville_residuals(rho, {phi}, ta, tb).front();
}

StrengthenedEnergyResidual mean_strengthened_energy_residual(const EnsembleMeasure& rho, const PsiFunction& psi,
                                                             double ta, double tb) {
    const Trajectory& grid = rho.grid();
    const auto [first, last] = index_range(grid, ta, tb);
    const double h = grid.spacing();
    double max_energy = 0.0;
    for (const auto& u : rho.members())
        for (std::size_t k = first; k <= last; ++k) max_energy = std::max(max_energy, norm_h2(u[k]));
    psi.certify(max_energy);

    const SpectralField g = effective_forcing(grid.params(), grid.config().model);
    const double nu = grid.params().nu();
    std::vector<double> value;   // int psi(|u|^2)
    std::vector<double> balance; // int psi'(|u|^2) (nu ||u||^2 - (g, u))
    StrengthenedEnergyResidual out;
    for (std::size_t k = first; k <= last; ++k) {
        value.push_back(rho.integrate([&](const Trajectory& u) { return psi(norm_h2(u[k])); }));
        double magnitude = 0.0;
        balance.push_back(rho.integrate([&](const Trajectory& u) {
            const double d = psi.derivative(norm_h2(u[k]));
            const double dissipation = nu * norm_v2(u[k]);
            const double work = inner_product(g, u[k]);
            magnitude += d * (dissipation + std::abs(work)) / static_cast<double>(rho.size());
            return d * (dissipation - work);
        }));
        out.scale = std::max(out.scale, magnitude);
    }
    out.worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < value.size(); ++i) {
        const double r = 0.5 * (value[i + 1] - value[i]) / h + 0.5 * (balance[i] + balance[i + 1]);
        out.worst = std::max(out.worst, r);
        out.worst_abs = std::max(out.worst_abs, std::abs(r));
    }
    if (value.size() < 2) out.worst = 0.0;
    return out;
}

std::vector<double> equation_residuals(const EnsembleMeasure& rho) {
    std::vector<double> out;
    for (const auto& u : rho.members()) {
        const double h = u.spacing();
        std::vector<SpectralField> rhs;
        double scale = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            rhs.push_back(time_derivative(u[k], u.params(), u.config()));
            scale = std::max(scale, norm_dadual(rhs.back()));
        }
        double worst = 0.0;
        for (std::size_t k = 0; k + 1 < u.size(); ++k) {
            SpectralField defect = u[k + 1] - u[k];
            defect *= 1.0 / h;
            defect.axpy(-0.5, rhs[k]);
            defect.axpy(-0.5, rhs[k + 1]);
            worst = std::max(worst, norm_dadual(defect));
        }
        out.push_back(scale > 0.0 ? worst / scale : worst);
    }
    return out;
}

std::vector<PsiFunction> default_psi_list() {
    return {PsiFunction::identity(), PsiFunction::saturating(), PsiFunction::tanh()};
}

VfDiagnostics vf_diagnostics(const EnsembleMeasure& rho, const std::vector<PsiFunction>& psis,
                             double carried_tolerance) {
    VfDiagnostics out;
    out.carried_tolerance = carried_tolerance;
    out.member_residuals = equation_residuals(rho);
    for (std::size_t i = 0; i < out.member_residuals.size(); ++i) {
        if (!(out.member_residuals[i] <= carried_tolerance)) out.failing_members.push_back(i);
    }
    out.carried = out.failing_members.empty();

    const Trajectory& grid = rho.grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out.sup_mean_energy =
            std::max(out.sup_mean_energy, rho.integrate([k](const Trajectory& u) { return norm_h2(u[k]); }));
    }
    out.bounded_energy = std::isfinite(out.sup_mean_energy);

    out.right_continuous = true;
    for (const auto& psi : psis) {
        VfDiagnostics::Continuity c;
        c.psi = psi.name();
        if (grid.size() >= 3) {
            auto mean = [&](std::size_t k) {
                return rho.integrate([&](const Trajectory& u) { return psi(norm_h2(u[k])); });
            };
            const double m0 = mean(0);
            c.delta1 = std::abs(mean(1) - m0);
            c.delta2 = std::abs(mean(2) - m0);
            c.passed = c.delta1 <= 0.75 * c.delta2 + 1e-10 * std::max(1.0, std::abs(m0));
        } else {
            c.passed = true;
        }
        out.right_continuous = out.right_continuous && c.passed;
        out.continuity.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------

ConvergenceReport convergence_experiment(const ConvergenceSetup& setup,
                                         const std::vector<CylindricalFunctional>& functionals) {
    if (setup.alphas.empty()) throw Error(ErrorKind::configuration, "alpha list is empty");
    for (std::size_t i = 0; i < setup.alphas.size(); ++i) {
        if (!(setup.alphas[i] > 0.0))
            throw Error(ErrorKind::configuration, "alpha values must be positive; the alpha = 0 reference is implicit");
        if (i > 0 && setup.alphas[i] > setup.alphas[i - 1])
            throw Error(ErrorKind::configuration, "alpha list must be nonincreasing");
    }
    if (setup.times.empty()) throw Error(ErrorKind::configuration, "no projection times");
    if (functionals.empty()) throw Error(ErrorKind::configuration, "empty functional dictionary");
    if (!setup.forcing) throw Error(ErrorKind::configuration, "forcing missing");

    SolverConfig cfg = setup.config;
    cfg.t_end = *std::max_element(setup.times.begin(), setup.times.end());
    const BoxSpec& box = setup.forcing->box();
    const TrajectoryMetric metric(box, setup.metric_modes);

    ConvergenceReport r;
    r.alphas = setup.alphas;
    r.times = setup.times;
    for (const auto& f : functionals) r.functionals.push_back(f.id());

    auto moments_of = [&](const EnsembleMeasure& rho) {
        std::vector<std::vector<double>> m(functionals.size(), std::vector<double>(setup.times.size()));
        for (std::size_t f = 0; f < functionals.size(); ++f)
            for (std::size_t t = 0; t < setup.times.size(); ++t) m[f][t] = moment(rho, functionals[f], setup.times[t]);
        return m;
    };

    SolverConfig ref_cfg = cfg;
    ref_cfg.model = Model::nse_galerkin;
    const EnsembleMeasure reference =
        push_initial(setup.mu0, setup.members, PhysParams(setup.nu, 0.0, *setup.forcing), ref_cfg, setup.seed,
                     setup.threads);
    r.reference = moments_of(reference);

    cfg.model = Model::ns_alpha;
    for (double alpha : setup.alphas) {
        const EnsembleMeasure rho =
            push_initial(setup.mu0, setup.members, PhysParams(setup.nu, alpha, *setup.forcing), cfg, setup.seed,
                         setup.threads);
        r.moments.push_back(moments_of(rho));
        r.semidistance.push_back(ensemble_semidistance(rho, reference, metric));
    }

    r.gaps.resize(r.moments.size());
    for (std::size_t a = 0; a < r.moments.size(); ++a) {
        r.gaps[a] = r.moments[a];
        for (std::size_t f = 0; f < functionals.size(); ++f)
            for (std::size_t t = 0; t < setup.times.size(); ++t)
                r.gaps[a][f][t] = std::abs(r.moments[a][f][t] - r.reference[f][t]);
    }
    for (std::size_t a = 0; a + 1 < r.moments.size(); ++a) {
        double d = 0.0;
        for (std::size_t f = 0; f < functionals.size(); ++f)
            for (std::size_t t = 0; t < setup.times.size(); ++t)
                d = std::max(d, std::abs(r.moments[a][f][t] - r.moments[a + 1][f][t]));
        r.successive.push_back(d);
    }

    r.cells = functionals.size() * setup.times.size();
    for (std::size_t f = 0; f < functionals.size(); ++f) {
        for (std::size_t t = 0; t < setup.times.size(); ++t) {
            bool decreasing = true;
            for (std::size_t a = 0; a + 1 < r.gaps.size(); ++a)
                decreasing = decreasing && r.gaps[a + 1][f][t] < r.gaps[a][f][t];
            if (decreasing) ++r.monotone_cells;
        }
    }
    r.gaps_decrease = static_cast<double>(r.monotone_cells) >= setup.pass_fraction * static_cast<double>(r.cells);
    r.semidistance_nonincreasing = true;
    for (std::size_t a = 0; a + 1 < r.semidistance.size(); ++a)
        r.semidistance_nonincreasing = r.semidistance_nonincreasing && r.semidistance[a + 1] <= r.semidistance[a];
    return r;
}

// ---------------------------------------------------------------------------

StationaryReport stationary_from_trajectory(const Trajectory& traj, double spinup, const std::vector<double>& windows,
                                            const std::vector<double>& taus,
                                            const std::vector<CylindricalFunctional>& functionals) {
    if (windows.empty()) throw Error(ErrorKind::configuration, "no averaging windows");
    const double h = traj.spacing();
    const double tau_max = taus.empty() ? 0.0 : *std::max_element(taus.begin(), taus.end());
    const double w_max = *std::max_element(windows.begin(), windows.end());
    const double needed = spinup + w_max + tau_max;
    if (needed > traj.t_end() - traj.t0() + 1e-9 * std::max(1.0, needed)) {
        std::ostringstream msg;
        msg << "spin-up + window + shift = " << needed << " exceeds the trajectory span " << traj.t_end() - traj.t0();
        throw Error(ErrorKind::range, msg.str());
    }

    StationaryReport r;
    r.spinup = spinup;
    r.spacing = h;
    r.windows = windows;
    r.taus = taus;
    for (const auto& f : functionals) r.functionals.push_back(f.id());

    const Trajectory settled = traj.shifted(spinup);
    const double t0 = settled.t0();
    for (double window : windows) {
        const auto translates = static_cast<std::size_t>(std::llround(window / h));
        std::vector<Trajectory> members;
        members.reserve(translates + 1);
        for (std::size_t j = 0; j <= translates; ++j) {
            members.push_back(settled.shifted(static_cast<double>(j) * h).restricted(t0, t0 + tau_max));
        }
        const EnsembleMeasure rho(std::move(members));
        double worst = 0.0;
        std::vector<double> energy{rho.time_project(t0).integrate([](const SpectralField& u) { return norm_h2(u); })};
        for (double tau : taus) {
            const EnsembleMeasure moved = rho.shifted(tau);
            for (const auto& phi : functionals) {
                worst = std::max(worst, std::abs(moment(moved, phi, t0) - moment(rho, phi, t0)));
            }
            energy.push_back(rho.time_project(t0 + tau).integrate([](const SpectralField& u) { return norm_h2(u); }));
        }
        r.residual.push_back(worst);
        r.mean_energy.push_back(std::move(energy));
    }
    r.nonincreasing = true;
    for (std::size_t i = 0; i + 1 < r.residual.size(); ++i)
        r.nonincreasing = r.nonincreasing && r.residual[i + 1] <= r.residual[i];
    return r;
}

StationaryReport stationary_experiment(const SpectralField& w0, const PhysParams& p, SolverConfig cfg, double spinup,
                                       const std::vector<double>& windows, const std::vector<double>& taus,
                                       const std::vector<CylindricalFunctional>& functionals) {
    if (p.forcing_norm() == 0.0) throw Error(ErrorKind::precondition, "the stationary experiment needs a forced run");
    if (windows.empty()) throw Error(ErrorKind::configuration, "no averaging windows");
    const double tau_max = taus.empty() ? 0.0 : *std::max_element(taus.begin(), taus.end());
    const double span = spinup + *std::max_element(windows.begin(), windows.end()) + tau_max;
    const double h = cfg.dt * cfg.save_stride;
    cfg.t_end = std::ceil(span / h - 1e-9) * h;
    return stationary_from_trajectory(solve(w0, p, cfg), spinup, windows, taus, functionals);
}

}  // namespace nsalpha
