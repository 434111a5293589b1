// Command-line driver: simulate | ensemble | converge | stationary | verify.
//
// Exit codes: 0 all contracts pass, 1 a contract failed, 2 usage or configuration error,
// 3 numerical divergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsalpha/config.hpp"
#include "nsalpha/error.hpp"
#include "nsalpha/io.hpp"
#include "nsalpha/operators.hpp"
#include "nsalpha/statistics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nsalpha;

namespace {

enum Exit { pass = 0, contract_failure = 1, usage_error = 2, divergence = 3 };

struct Context {
    RunConfig config;
    std::string hash;
    fs::path out;
};

void write_json(const Context& ctx, const std::string& name, json body) {
    body["config_hash"] = ctx.hash;
    body["code_version"] = code_version;
    atomic_write(ctx.out / name, body.dump(2) + "\n");
}

void write_csv(const Context& ctx, const std::string& name, const CsvTable& table) {
    atomic_write(ctx.out / name, table.render(ctx.hash));
}

std::string fmt(double x) { return format_double(x); }

SpectralField initial_state(const RunConfig& c, const BoxSpec& box) {
    const InitialMeasureSpec mu0 = c.initial_measure(box);
    std::mt19937_64 rng(member_seed(c.seed, 0));
    return mu0.sample(rng, Eigenbasis(box));
}

struct TrajectoryChecks {
    json report;
    bool passed = true;
};

TrajectoryChecks check_trajectory(const Trajectory& traj, double tolerance_scale) {
    TrajectoryChecks out;
    const PhysParams& p = traj.params();

    const std::vector<double> cumulative = cumulative_energy_residual(traj);
    double worst_energy = 0.0;
    for (double r : cumulative) worst_energy = std::max(worst_energy, std::abs(r));

    AprioriEnvelope env;
    env.radius = std::max(p.r0(), norm_h(traj[0]));
    const AprioriReport a = apriori_check(traj, env);
    const bool apriori_ok = a.passed(1e-8 * tolerance_scale);

    json streng = json::object();
    bool streng_ok = true;
    double scale = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) scale = std::max(scale, norm_h2(traj[i]));
    for (const auto& psi : default_psi_list()) {
        const double v = strengthened_energy_check(traj, psi);
        const bool ok = v <= 1e-8 * tolerance_scale * std::max(1.0, scale);
        streng[psi.name()] = {{"worst_violation", v}, {"passed", ok}};
        streng_ok = streng_ok && ok;
    }
    out.report = {
        {"energy_equality", {{"max_abs_cumulative_residual", worst_energy}}},
        {"apriori",
         {{"M", env.m},
          {"c", env.c},
          {"R", env.radius},
          {"R0", p.r0()},
          {"slack_energy", a.slack_energy},
          {"slack_dissipation", a.slack_dissipation},
          {"slack_dual", a.slack_dual},
          {"scale_energy", a.scale_energy},
          {"scale_dissipation", a.scale_dissipation},
          {"scale_dual", a.scale_dual},
          {"max_norm", a.max_norm},
          {"absorbing_ball", a.absorbing_ball},
          {"pairs", a.pairs},
          {"passed", apriori_ok}}},
        {"strengthened_energy", streng},
    };
    out.passed = apriori_ok && streng_ok;
    return out;
}

CsvTable energy_table(const Trajectory& traj) {
    CsvTable t;
    t.columns = {"t", "norm_H", "norm_V", "energy_residual_cumulative"};
    const std::vector<double> cumulative = cumulative_energy_residual(traj);
    for (std::size_t i = 0; i < traj.size(); ++i)
        t.add({fmt(traj.time(i)), fmt(norm_h(traj[i])), fmt(norm_v(traj[i])), fmt(cumulative[i])});
    return t;
}

int cmd_simulate(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const BoxSpec box = c.box();
    const PhysParams p = c.params(box);
    const Trajectory traj = solve(initial_state(c, box), p, c.solver);
    save_trajectory(ctx.out / "trajectory.nsat", traj, ctx.hash);
    write_csv(ctx, "energy.csv", energy_table(traj));
    const TrajectoryChecks checks = check_trajectory(traj, c.tolerance_scale);
    json body = checks.report;
    body["snapshots"] = traj.size();
    body["passed"] = checks.passed;
    write_json(ctx, "simulate.json", body);
    std::printf("simulate: %zu snapshots, a-priori %s, strengthened energy %s\n", traj.size(),
                body["apriori"]["passed"].get<bool>() ? "pass" : "FAIL", checks.passed ? "pass" : "see report");
    return checks.passed ? pass : contract_failure;
}

int cmd_verify(const Context& ctx, const std::string& input) {
    const RunConfig& c = ctx.config;
    Trajectory traj = [&] {
        if (!input.empty()) return load_trajectory(input);
        const BoxSpec box = c.box();
        return solve(initial_state(c, box), c.params(box), c.solver);
    }();
    const TrajectoryChecks checks = check_trajectory(traj, c.tolerance_scale);
    json body = checks.report;
    body["source"] = input.empty() ? "config" : input;
    body["passed"] = checks.passed;
    write_json(ctx, "verify.json", body);
    std::printf("verify: %s\n", checks.passed ? "pass" : "FAIL");
    return checks.passed ? pass : contract_failure;
}

int cmd_ensemble(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const BoxSpec box = c.box();
    const PhysParams p = c.params(box);
    const InitialMeasureSpec mu0 = c.initial_measure(box);
    EnsembleMeasure rho = push_initial(mu0, c.members, p, c.solver, c.seed, c.threads);
    if (c.planted_defect) {
        const Trajectory& m = rho.member(0);
        rho = rho.with_member(0, m.with_states(std::vector<SpectralField>(m.size(), m[0])));
    }

    json members = json::array();
    for (std::size_t i = 0; i < rho.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "member_%04zu.nsat", i);
        save_trajectory(ctx.out / "members" / name, rho.member(i), ctx.hash);
        members.push_back({{"file", std::string("members/") + name},
                           {"weight", rho.weight(i)},
                           {"seed", member_seed(c.seed, i)}});
    }
    write_json(ctx, "manifest.json",
               {{"master_seed", c.seed},
                {"sampler",
                 {{"kind", to_string(mu0.kind)},
                  {"pairs", mu0.pairs},
                  {"sigma", mu0.sigma},
                  {"radius", mu0.radius},
                  {"mean_energy", mu0.mean_energy()}}},
                {"seed_derivation", "splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)"},
                {"planted_defect", c.planted_defect},
                {"members", members}});

    const VfDiagnostics vf = vf_diagnostics(rho, default_psi_list(), 1e-2 * c.tolerance_scale);
    const MeanEnergyBound meb = mean_energy_bound(rho);
    json continuity = json::array();
    for (const auto& x : vf.continuity)
        continuity.push_back({{"psi", x.psi}, {"delta1", x.delta1}, {"delta2", x.delta2}, {"passed", x.passed}});
    const bool ok = vf.passed() && meb.holds(1e-8 * c.tolerance_scale);
    write_json(ctx, "vf_report.json",
               {{"carried", {{"passed", vf.carried},
                             {"tolerance", vf.carried_tolerance},
                             {"member_residuals", vf.member_residuals},
                             {"failing_members", vf.failing_members}}},
                {"mean_energy", {{"passed", vf.bounded_energy}, {"sup", vf.sup_mean_energy}}},
                {"right_continuity", {{"passed", vf.right_continuous}, {"probes", continuity}}},
                {"mean_energy_bound", {{"initial", meb.initial}, {"sup", meb.sup}, {"bound", meb.bound},
                                       {"passed", meb.holds(1e-8 * c.tolerance_scale)}}},
                {"passed", ok}});

    CsvTable moments;
    moments.columns = {"t", "functional", "value"};
    const auto dict = c.functionals(box);
    for (std::size_t k = 0; k < rho.grid().size(); ++k)
        for (const auto& phi : dict) moments.add({fmt(rho.grid().time(k)), phi.id(), fmt(moment(rho, phi, rho.grid().time(k)))});
    write_csv(ctx, "moments.csv", moments);

    std::printf("ensemble: %zu members; carried %s, mean energy %s, right-continuity %s\n", rho.size(),
                vf.carried ? "pass" : "FAIL", vf.bounded_energy && meb.holds() ? "pass" : "FAIL",
                vf.right_continuous ? "pass" : "FAIL");
    return ok ? pass : contract_failure;
}

int cmd_converge(const Context& ctx) {
    const RunConfig& c = ctx.config;
    if (c.alphas.size() < 2 || c.alphas.back() != 0.0)
        throw Error(ErrorKind::configuration, "converge needs an alpha list ending with the alpha = 0 reference");
    std::vector<double> alphas(c.alphas.begin(), c.alphas.end() - 1);
    for (double a : alphas)
        if (!(a > 0.0)) throw Error(ErrorKind::configuration, "only the last alpha entry may be 0");
    const BoxSpec box = c.box();

    ConvergenceSetup s;
    s.alphas = alphas;
    s.mu0 = c.initial_measure(box);
    s.members = c.members;
    s.times = c.times;
    s.nu = c.nu;
    s.forcing = std::make_shared<const SpectralField>(c.forcing(box));
    s.config = c.solver;
    s.seed = c.seed;
    s.threads = c.threads;
    s.metric_modes = c.metric_modes;
    const ConvergenceReport r = convergence_experiment(s, c.functionals(box));

    CsvTable table;
    table.columns = {"alpha", "t", "functional", "moment", "gap"};
    for (std::size_t a = 0; a < r.alphas.size(); ++a)
        for (std::size_t f = 0; f < r.functionals.size(); ++f)
            for (std::size_t t = 0; t < r.times.size(); ++t)
                table.add({fmt(r.alphas[a]), fmt(r.times[t]), r.functionals[f], fmt(r.moments[a][f][t]),
                           fmt(r.gaps[a][f][t])});
    for (std::size_t f = 0; f < r.functionals.size(); ++f)
        for (std::size_t t = 0; t < r.times.size(); ++t)
            table.add({"0", fmt(r.times[t]), r.functionals[f], fmt(r.reference[f][t]), "0"});
    write_csv(ctx, "convergence.csv", table);
    write_json(ctx, "convergence.json",
               {{"alphas", r.alphas},
                {"times", r.times},
                {"functionals", r.functionals},
                {"moments", r.moments},
                {"reference", r.reference},
                {"gaps", r.gaps},
                {"successive_differences", r.successive},
                {"semidistance", r.semidistance},
                {"metric_modes", c.metric_modes},
                {"monotone_cells", r.monotone_cells},
                {"cells", r.cells},
                {"gaps_decrease", r.gaps_decrease},
                {"semidistance_nonincreasing", r.semidistance_nonincreasing},
                {"note", "phi are tanh-saturated (bounded, bounded gradient) rather than compactly supported"},
                {"passed", r.passed()}});
    std::printf("converge: %zu/%zu cells with strictly decreasing reference gap, semidistance %s\n",
                r.monotone_cells, r.cells, r.semidistance_nonincreasing ? "nonincreasing" : "NOT monotone");
    return r.passed() ? pass : contract_failure;
}

int cmd_stationary(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const BoxSpec box = c.box();
    const StationaryReport r = stationary_experiment(initial_state(c, box), c.params(box), c.solver, c.spinup,
                                                     c.windows, c.taus, c.functionals(box));
    CsvTable residuals;
    residuals.columns = {"window", "residual"};
    CsvTable energy;
    energy.columns = {"window", "t", "mean_energy"};
    for (std::size_t w = 0; w < r.windows.size(); ++w) {
        residuals.add({fmt(r.windows[w]), fmt(r.residual[w])});
        energy.add({fmt(r.windows[w]), "0", fmt(r.mean_energy[w][0])});
        for (std::size_t k = 0; k < r.taus.size(); ++k)
            energy.add({fmt(r.windows[w]), fmt(r.taus[k]), fmt(r.mean_energy[w][k + 1])});
    }
    write_csv(ctx, "stationary.csv", residuals);
    write_csv(ctx, "stationary_energy.csv", energy);
    write_json(ctx, "stationary.json",
               {{"spinup", r.spinup},
                {"spacing", r.spacing},
                {"windows", r.windows},
                {"taus", r.taus},
                {"functionals", r.functionals},
                {"residual", r.residual},
                {"mean_energy", r.mean_energy},
                {"note", "time averages of one orbit stand in for an invariant measure"},
                {"passed", r.nonincreasing}});
    std::printf("stationary: residual");
    for (double x : r.residual) std::printf(" %.4e", x);
    std::printf(" -> %s\n", r.nonincreasing ? "nonincreasing" : "NOT monotone");
    return r.nonincreasing ? pass : contract_failure;
}

int exit_code(const Error& e) {
    return e.kind() == ErrorKind::diverged ? divergence : usage_error;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral NS-alpha / Galerkin NSE simulator with statistical-solution checks"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    double tolerance_scale = 1.0;
    auto* opt_config = app.add_option("--config", config_path, "JSON run configuration")->envname("NSALPHA_CONFIG");
    auto* opt_out = app.add_option("--out", out_dir, "output directory")->envname("NSALPHA_OUT");
    auto* opt_seed = app.add_option("--seed", seed, "master seed (u64)")->envname("NSALPHA_SEED");
    auto* opt_threads = app.add_option("--threads", threads, "worker threads (0 = all cores)")->envname("NSALPHA_THREADS");
    auto* opt_tol = app.add_option("--tolerance-scale", tolerance_scale, "multiplies every contract tolerance")
                        ->envname("NSALPHA_TOLERANCE_SCALE");

    auto* simulate = app.add_subcommand("simulate", "solve one trajectory and check its energy identities");
    auto* ensemble = app.add_subcommand("ensemble", "push an initial measure forward and run the VF diagnostics");
    auto* converge = app.add_subcommand("converge", "alpha -> 0 convergence of ensemble moments");
    auto* stationary = app.add_subcommand("stationary", "time-average stationarity surrogate");
    auto* verify = app.add_subcommand("verify", "check a saved trajectory (or a fresh run) against the estimates");
    std::string input;
    verify->add_option("--trajectory", input, "trajectory file to verify");
    auto* print_config = app.add_subcommand("config", "print the effective configuration as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? pass : usage_error;
    }

    try {
        Context ctx;
        if (*opt_config) {
            std::ifstream in(config_path);
            if (!in) throw Error(ErrorKind::configuration, "cannot read configuration " + config_path);
            std::stringstream text;
            text << in.rdbuf();
            ctx.config = RunConfig::from_json(text.str());
        }
        if (*opt_out) ctx.config.output = out_dir;
        if (*opt_seed) ctx.config.seed = seed;
        if (*opt_threads) ctx.config.threads = threads;
        if (*opt_tol) ctx.config.tolerance_scale = tolerance_scale;
        ctx.config.validate();
        ctx.hash = ctx.config.hash();
        ctx.out = ctx.config.output;

        if (print_config->parsed()) {
            std::cout << ctx.config.to_json() << "\n";
            return pass;
        }
        fs::create_directories(ctx.out);
        json effective = json::parse(ctx.config.to_json());
        effective.erase("output");
        effective.erase("threads");
        atomic_write(ctx.out / "config.json", effective.dump(2) + "\n");
        if (simulate->parsed()) return cmd_simulate(ctx);
        if (ensemble->parsed()) return cmd_ensemble(ctx);
        if (converge->parsed()) return cmd_converge(ctx);
        if (stationary->parsed()) return cmd_stationary(ctx);
        if (verify->parsed()) return cmd_verify(ctx, input);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    }
    return usage_error;
}
