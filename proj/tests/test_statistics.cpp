#include <doctest.h>

#include <cmath>

#include "nsalpha/error.hpp"
#include "nsalpha/statistics.hpp"
#include "support/fixtures.hpp"

using namespace nsalpha;
using namespace nsalpha::testing;

namespace {

SolverConfig config(double dt, double t_end, int stride = 1, Model model = Model::ns_alpha) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.save_stride = stride;
    cfg.model = model;
    return cfg;
}

}  // namespace

TEST_CASE("Liouville residual") {
    const BoxSpec box = cube();
    const Eigenbasis basis(box);

    SUBCASE("constant functional") {
        const PhysParams p(0.1, 0.0, low_mode_forcing(box, 1.0));
        const EnsembleMeasure rho = push_initial(InitialMeasureSpec::gaussian(box, 6, 1.0), 3, p,
                                                 config(0.02, 0.4, 1, Model::nse_galerkin), 1);
        CHECK(liouville_residual(rho, CylindricalFunctional::constant(basis.field(0), 2.0), 0.0, 0.4).residual <= 1e-12);
    }

    SUBCASE("linear dynamics against the closed-form scalar ODE") {
        // x(t) = (u(t), e_1) solves x' = -nu lambda_1 x + (f, e_1) when the nonlinearity is off.
        const double nu = 0.3;
        const SpectralField e1 = basis.field(0);
        const SpectralField f = 0.8 * e1 + low_mode_forcing(box, 0.5);
        const PhysParams p(nu, 0.0, f);
        SolverConfig cfg = config(0.05, 1.0, 1, Model::nse_galerkin);
        cfg.nonlinear = false;
        const SpectralField u0 = 1.7 * e1 + random_low_field(box, 3, 1.0);
        const EnsembleMeasure rho({solve(u0, p, cfg)});
        const auto phi = CylindricalFunctional::quadratic(e1);
        const LiouvilleResidual got = liouville_residual(rho, phi, 0.0, 1.0);

        const double lambda = basis[0].lambda;
        const double g1 = inner_product(p.forcing(), e1);
        const double x0 = inner_product(u0, e1);
        const double xs = g1 / (nu * lambda);
        auto x = [&](double t) { return xs + (x0 - xs) * std::exp(-nu * lambda * t); };
        auto dx = [&](double t) { return -nu * lambda * (x(t) - xs); };
        double expected = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double a = 0.05 * i;
            const double b = 0.05 * (i + 1);
            const double r = (0.5 * x(b) * x(b) - 0.5 * x(a) * x(a)) / 0.05 - 0.5 * (x(a) * dx(a) + x(b) * dx(b));
            expected = std::max(expected, std::abs(r));
        }
        CHECK(got.intervals == 20);
        CHECK(std::abs(got.residual - expected) <= 1e-8);
    }

    SUBCASE("second-order decay on an NSE-Galerkin ensemble") {
        const PhysParams p(0.1, 0.0, low_mode_forcing(box, 1.0));
        const auto dict = default_dictionary(box);
        std::vector<double> worst;
        for (double dt : {1e-2, 5e-3, 2.5e-3}) {
            const EnsembleMeasure rho = push_initial(InitialMeasureSpec::gaussian(box, 6, 1.0), 4, p,
                                                     config(dt, 0.3, 1, Model::nse_galerkin), 8);
            double w = 0.0;
            const auto batch = liouville_residuals(rho, dict, 0.0, 0.3);
            for (std::size_t f = 0; f < dict.size(); ++f) {
                w = std::max(w, batch[f].residual);
                if (dt == 1e-2) CHECK(liouville_residual(rho, dict[f], 0.0, 0.3).residual == batch[f].residual);
            }
            worst.push_back(w);
        }
        CHECK(std::log2(worst[0] / worst[2]) / 2.0 >= 1.8);
    }

    SUBCASE("errors") {
        const PhysParams p(0.1, 0.0, SpectralField(box));
        const EnsembleMeasure rho({solve(random_low_field(box, 1, 1.0), p, config(0.1, 0.5))});
        const BoxSpec other({1.0, 1.0, 1.0}, 16);
        CHECK_THROWS_AS(liouville_residual(rho, CylindricalFunctional::quadratic(SpectralField(other)), 0.0, 0.5),
                        Error);
        CHECK_THROWS_AS(liouville_residual(rho, CylindricalFunctional::quadratic(basis.field(0)), 0.4, 0.1), Error);
    }
}

TEST_CASE("mean strengthened energy") {
    const BoxSpec box = cube();

    SUBCASE("psi = r, unforced single member: the energy equality") {
        const PhysParams p(0.1, 0.2, SpectralField(box));
        const Trajectory t = solve(random_low_field(box, 4, 5.0), p, config(0.01, 0.5));
        const StrengthenedEnergyResidual r = mean_strengthened_energy_residual(EnsembleMeasure({t}), PsiFunction::identity(), 0.0, 0.5);
        double expected = -1e300;
        for (double x : energy_equality_residual(t)) expected = std::max(expected, x / 0.01);
        CHECK(r.worst == doctest::Approx(expected).epsilon(1e-9));
    }

    SUBCASE("psi constant") {
        const PhysParams p(0.1, 0.2, low_mode_forcing(box, 1.0));
        const EnsembleMeasure rho({solve(random_low_field(box, 4, 5.0), p, config(0.01, 0.3))});
        const StrengthenedEnergyResidual r = mean_strengthened_energy_residual(rho, PsiFunction::constant(1.0), 0.0, 0.3);
        CHECK(r.worst == 0.0);
        CHECK(r.worst_abs == 0.0);
    }

    SUBCASE("16-member ensemble, psi = r/(1+r)") {
        const PhysParams p(0.1, 0.2, low_mode_forcing(box, 1.0));
        const EnsembleMeasure rho =
            push_initial(InitialMeasureSpec::gaussian(box, 6, 1.0), 16, p, config(0.005, 0.3), 21);
        for (const auto& psi : default_psi_list()) {
            const StrengthenedEnergyResidual r = mean_strengthened_energy_residual(rho, psi, 0.0, 0.3);
            CAPTURE(psi.name());
            CHECK(r.holds());
        }
    }

    SUBCASE("invalid psi") {
        const PhysParams p(0.1, 0.2, SpectralField(box));
        const EnsembleMeasure rho({solve(random_low_field(box, 4, 5.0), p, config(0.01, 0.1))});
        const PsiFunction bad("sqrt", [](double r) { return std::sqrt(r); },
                              [](double r) { return 0.5 / std::sqrt(r); }, 10.0);
        CHECK_THROWS_AS(mean_strengthened_energy_residual(rho, bad, 0.0, 0.1), Error);
    }
}

TEST_CASE("Vishik-Fursikov diagnostics") {
    const BoxSpec box = cube();
    const PhysParams p(0.1, 0.2, low_mode_forcing(box, 1.0));

    const EnsembleMeasure rho = push_initial(InitialMeasureSpec::gaussian(box, 6, 1.0), 6, p, config(0.01, 1.0, 10), 3);
    const VfDiagnostics ok = vf_diagnostics(rho, default_psi_list());
    CHECK(ok.carried);
    CHECK(ok.bounded_energy);
    CHECK(ok.right_continuous);
    CHECK(ok.passed());
    CHECK(ok.continuity.size() == 3);

    // Plant a frozen non-solution in slot 4.
    const Trajectory& victim = rho.member(4);
    const Trajectory frozen = victim.with_states(std::vector<SpectralField>(victim.size(), victim[0]));
    const VfDiagnostics bad = vf_diagnostics(rho.with_member(4, frozen), default_psi_list());
    CHECK_FALSE(bad.carried);
    REQUIRE(bad.failing_members.size() == 1);
    CHECK(bad.failing_members[0] == 4);
    CHECK(bad.member_residuals[4] == doctest::Approx(1.0));

    const PhysParams rest(0.1, 0.2, SpectralField(box));
    const VfDiagnostics zero =
        vf_diagnostics(push_initial(InitialMeasureSpec::dirac(SpectralField(box)), 1, rest, config(0.1, 1.0), 0),
                       default_psi_list());
    CHECK(zero.passed());
    CHECK(zero.sup_mean_energy == 0.0);
}

TEST_CASE("convergence experiment") {
    const BoxSpec box = cube();
    ConvergenceSetup s;
    s.mu0 = InitialMeasureSpec::gaussian(box, 6, 1.0);
    s.members = 3;
    s.times = {0.2, 0.4};
    s.forcing = std::make_shared<const SpectralField>(low_mode_forcing(box, 1.0));
    s.config = config(0.02, 0.4, 5);
    s.seed = 9;
    s.threads = 1;
    const auto dict = default_dictionary(box);

    SUBCASE("singleton alpha list") {
        s.alphas = {0.2};
        const ConvergenceReport r = convergence_experiment(s, dict);
        CHECK(r.successive.empty());
        CHECK(r.gaps.size() == 1);
        CHECK(r.cells == 12);
        CHECK(r.monotone_cells == 12);  // vacuous
    }

    SUBCASE("duplicate alpha values give a zero difference") {
        s.alphas = {0.2, 0.2, 0.1};
        const ConvergenceReport r = convergence_experiment(s, dict);
        REQUIRE(r.successive.size() == 2);
        CHECK(r.successive[0] == 0.0);
        CHECK(r.successive[1] > 0.0);
        CHECK(r.semidistance[0] == r.semidistance[1]);
    }

    SUBCASE("dirac initial measure: gaps shrink with alpha") {
        s.mu0 = InitialMeasureSpec::dirac(random_low_field(box, 5, 3.0, 12));
        s.alphas = {0.4, 0.2, 0.1};
        const ConvergenceReport r = convergence_experiment(s, dict);
        CHECK(r.gaps_decrease);
        CHECK(r.semidistance_nonincreasing);
        CHECK(r.passed());
        for (const auto& row : r.reference)
            for (double m : row) CHECK(std::isfinite(m));
    }

    SUBCASE("validation") {
        s.alphas = {};
        CHECK_THROWS_AS(convergence_experiment(s, dict), Error);
        s.alphas = {0.1, 0.2};
        CHECK_THROWS_AS(convergence_experiment(s, dict), Error);
        s.alphas = {0.2, 0.0};
        CHECK_THROWS_AS(convergence_experiment(s, dict), Error);
        s.alphas = {0.2};
        CHECK_THROWS_AS(convergence_experiment(s, {}), Error);
    }
}

TEST_CASE("stationarity surrogate") {
    const BoxSpec box = cube();
    const Eigenbasis basis(box);
    const auto dict = default_dictionary(box);

    SUBCASE("exactly periodic input") {
        const PhysParams p(0.1, 0.2, SpectralField(box));
        const int period = 17;  // grid points
        std::vector<SpectralField> states;
        for (int k = 0; k < 200; ++k) {
            const double phase = 2.0 * std::numbers::pi * (k % period) / period;
            SpectralField u(box);
            basis.add(u, 0, 2.0 * std::cos(phase));
            basis.add(u, 1, std::sin(2.0 * phase));
            basis.add(u, 2, 0.5 + std::cos(3.0 * phase));
            states.push_back(u);
        }
        const Trajectory t(0.0, 0.1, std::move(states), p, config(0.1, 19.9));
        const double P = 0.1 * period;
        const StationaryReport r = stationary_from_trajectory(t, 2.0, {P, 2 * P}, {0.0, P, 2 * P, 3 * P}, dict);
        for (double x : r.residual) CHECK(x <= 1e-10);
        for (const auto& e : r.mean_energy)
            for (double x : e) CHECK(x == doctest::Approx(e[0]).epsilon(1e-12));

        const StationaryReport zero = stationary_from_trajectory(t, 0.0, {1.0, 3.0}, {0.0}, dict);
        for (double x : zero.residual) CHECK(x == 0.0);

        CHECK_THROWS_AS(stationary_from_trajectory(t, 10.0, {10.0}, {0.5}, dict), Error);
    }

    SUBCASE("forced run, short windows") {
        const PhysParams p(0.05, 0.2, low_mode_forcing(box, 1.0));
        const StationaryReport r =
            stationary_experiment(random_low_field(box, 1, 1.0), p, config(0.01, 1.0, 10), 5.0, {2.5, 5.0, 10.0},
                                  {0.5, 1.0}, dict);
        REQUIRE(r.residual.size() == 3);
        for (double x : r.residual) CHECK(std::isfinite(x));
        CHECK(r.mean_energy[0].size() == 3);
    }

    SUBCASE("unforced run is rejected") {
        const PhysParams p(0.05, 0.2, SpectralField(box));
        CHECK_THROWS_AS(stationary_experiment(random_low_field(box, 1, 1.0), p, config(0.01, 1.0, 10), 1.0, {1.0},
                                              {0.5}, dict),
                        Error);
    }
}
