#include "nsalpha/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsalpha/error.hpp"

namespace nsalpha {

std::string to_string(Model m) { return m == Model::ns_alpha ? "ns_alpha" : "nse_galerkin"; }
std::string to_string(Scheme s) { return s == Scheme::if_midpoint ? "if_midpoint" : "if_rk4"; }

Model parse_model(const std::string& s) {
    if (s == "ns_alpha") return Model::ns_alpha;
    if (s == "nse_galerkin") return Model::nse_galerkin;
    throw Error(ErrorKind::configuration, "unknown model '" + s + "'");
}

Scheme parse_scheme(const std::string& s) {
    if (s == "if_midpoint") return Scheme::if_midpoint;
    if (s == "if_rk4") return Scheme::if_rk4;
    throw Error(ErrorKind::configuration, "unknown scheme '" + s + "'");
}

PhysParams::PhysParams(double nu, double alpha, SpectralField forcing)
    : nu_(nu), alpha_(alpha), forcing_(leray_project(forcing)), forcing_norm_(norm_h(forcing_)) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorKind::configuration, "viscosity must be positive");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorKind::configuration, "filter length alpha must be nonnegative");
    }
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::configuration, "time step must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error(ErrorKind::configuration, "t_end must be >= 0");
    if (save_stride < 1) throw Error(ErrorKind::configuration, "save_stride must be >= 1");
    const double ratio = t_end / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        throw Error(ErrorKind::configuration, "t_end must be an integer multiple of dt");
    }
}

long long SolverConfig::steps() const { return std::llround(t_end / dt); }

double model_alpha(const PhysParams& p, Model model) { return model == Model::ns_alpha ? p.alpha() : 0.0; }

SpectralField effective_forcing(const PhysParams& p, Model model) {
    return helmholtz_filter(p.forcing(), model_alpha(p, model), FilterExponent::minus_half);
}

SpectralField nonlinear_term(const SpectralField& w, const PhysParams& p, Model model) {
    const double alpha = model_alpha(p, model);
    const SpectralField u = helmholtz_filter(w, alpha, FilterExponent::minus_half);
    const SpectralField v = helmholtz_filter(w, alpha, FilterExponent::plus_half);
    return helmholtz_filter(advection(u, v), alpha, FilterExponent::minus_half);
}

SpectralField time_derivative(const SpectralField& w, const PhysParams& p, const SolverConfig& cfg) {
    SpectralField out = effective_forcing(p, cfg.model);
    out.axpy(-p.nu(), stokes_apply(w));
    if (cfg.nonlinear) out -= nonlinear_term(w, p, cfg.model);
    out.mark_divergence_free(true);
    return out;
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(double t0, double spacing, std::vector<SpectralField> states, PhysParams params,
                       SolverConfig config)
    : Trajectory(std::make_shared<const std::vector<SpectralField>>(std::move(states)), 0, 0, t0, spacing,
                 std::move(params), config) {
    count_ = states_->size();
    if (count_ == 0) throw Error(ErrorKind::precondition, "a trajectory needs at least one state");
    if (!(spacing > 0.0)) throw Error(ErrorKind::precondition, "trajectory spacing must be positive");
}

Trajectory::Trajectory(std::shared_ptr<const std::vector<SpectralField>> states, std::size_t first,
                       std::size_t count, double t0, double spacing, PhysParams params, SolverConfig config)
    : states_(std::move(states)),
      first_(first),
      count_(count),
      t0_(t0),
      spacing_(spacing),
      params_(std::move(params)),
      config_(config) {}

Trajectory::GridPoint Trajectory::locate(double t) const {
    const double x = (t - t0_) / spacing_;
    const double slack = 1e-9 * std::max(1.0, std::abs(x));
    if (x < -0.5 - slack || x > static_cast<double>(count_ - 1) + 0.5 + slack || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "time " << t << " outside trajectory span [" << t0_ << ", " << t_end() << "]";
        throw Error(ErrorKind::range, msg.str());
    }
    const long long i = std::clamp<long long>(std::llround(x), 0, static_cast<long long>(count_) - 1);
    const auto index = static_cast<std::size_t>(i);
    return {index, std::abs(t - time(index))};
}

Trajectory Trajectory::shifted(double tau) const {
    if (!(tau >= 0.0)) throw Error(ErrorKind::range, "shift must be nonnegative");
    const long long k = std::llround(tau / spacing_);
    if (k >= static_cast<long long>(count_)) {
        std::ostringstream msg;
        msg << "shift " << tau << " leaves an empty span";
        throw Error(ErrorKind::range, msg.str());
    }
    const auto steps = static_cast<std::size_t>(k);
    return Trajectory(states_, first_ + steps, count_ - steps, t0_, spacing_, params_, config_);
}

Trajectory Trajectory::restricted(double ta, double tb) const {
    if (tb < ta) throw Error(ErrorKind::range, "restriction interval is reversed");
    const std::size_t a = locate(ta).index;
    const std::size_t b = locate(tb).index;
    return Trajectory(states_, first_ + a, b - a + 1, time(a), spacing_, params_, config_);
}

Trajectory Trajectory::with_states(std::vector<SpectralField> states) const {
    if (states.size() != count_) throw Error(ErrorKind::dimension, "replacement state count mismatch");
    return Trajectory(t0_, spacing_, std::move(states), params_, config_);
}

SpectralField Trajectory::velocity(std::size_t i) const {
    return helmholtz_filter(state(i), model_alpha(params_, config_.model), FilterExponent::minus_half);
}

bool Trajectory::same_grid(const Trajectory& other) const {
    return count_ == other.count_ && t0_ == other.t0_ && spacing_ == other.spacing_ && box() == other.box();
}

// ---------------------------------------------------------------------------
// Integrator

namespace {

// Lawson-type integrating factor on z = w - w_s, where w_s = (nu A)^{-1} g solves the
// linear steady problem. The forced Stokes part is therefore exact.
class Integrator {
public:
    Integrator(const PhysParams& p, const SolverConfig& cfg) : params_(p), cfg_(cfg), steady_(p.box()) {
        const SpectralField g = effective_forcing(p, cfg.model);
        steady_ = stokes_inverse(g);
        steady_ *= 1.0 / p.nu();
        const BoxSpec& box = p.box();
        full_.resize(box.size());
        half_.resize(box.size());
        for (std::size_t s = 0; s < box.size(); ++s) {
            full_[s] = std::exp(-p.nu() * box.mode(s).lambda * cfg.dt);
            half_[s] = std::exp(-0.5 * p.nu() * box.mode(s).lambda * cfg.dt);
        }
    }

    SpectralField advance(const SpectralField& w, double t) const {
        SpectralField z = w - steady_;
        SpectralField next = cfg_.scheme == Scheme::if_midpoint ? midpoint(z) : rk4(z);
        if (!next.all_finite()) {
            std::ostringstream msg;
            msg << "integration diverged at t = " << t + cfg_.dt << " (dt = " << cfg_.dt << ")";
            throw DivergedError(t + cfg_.dt, msg.str());
        }
        next += steady_;
        next.mark_divergence_free(true);
        return next;
    }

private:
    // Right-hand side of dz/dt + nu A z = F(z).
    SpectralField forcing_term(const SpectralField& z) const {
        if (!cfg_.nonlinear) return SpectralField(z.box());
        SpectralField n = nonlinear_term(z + steady_, params_, cfg_.model);
        n *= -1.0;
        return n;
    }

    SpectralField decay(SpectralField z, const std::vector<double>& factor) const {
        for (std::size_t s = 0; s < factor.size(); ++s) {
            for (auto& c : z[s]) c *= factor[s];
        }
        return z;
    }

    SpectralField midpoint(const SpectralField& z) const {
        const double dt = cfg_.dt;
        SpectralField mid = z;
        mid.axpy(0.5 * dt, forcing_term(z));
        mid = decay(std::move(mid), half_);
        SpectralField out = decay(z, full_);
        out.axpy(dt, decay(forcing_term(mid), half_));
        return out;
    }

    SpectralField rk4(const SpectralField& z) const {
        const double dt = cfg_.dt;
        const SpectralField k1 = forcing_term(z);
        SpectralField a = z;
        a.axpy(0.5 * dt, k1);
        const SpectralField k2 = forcing_term(decay(std::move(a), half_));
        SpectralField b = decay(z, half_);
        b.axpy(0.5 * dt, k2);
        const SpectralField k3 = forcing_term(b);
        SpectralField c = decay(z, full_);
        c.axpy(dt, decay(k3, half_));
        const SpectralField k4 = forcing_term(c);

        SpectralField out = decay(z, full_);
        out.axpy(dt / 6.0, decay(k1, full_));
        SpectralField mid = k2;
        mid += k3;
        out.axpy(dt / 3.0, decay(std::move(mid), half_));
        out.axpy(dt / 6.0, k4);
        return out;
    }

    const PhysParams& params_;
    SolverConfig cfg_;
    SpectralField steady_;
    std::vector<double> full_;
    std::vector<double> half_;
};

void require_compatible(const SpectralField& w, const PhysParams& p) {
    if (!(w.box() == p.box())) throw Error(ErrorKind::dimension, "state and forcing live on different boxes");
}

}  // namespace

SpectralField step(const SpectralField& w, const PhysParams& p, const SolverConfig& cfg, double t) {
    cfg.validate();
    require_compatible(w, p);
    return Integrator(p, cfg).advance(w, t);
}

Trajectory solve(const SpectralField& w0, const PhysParams& p, const SolverConfig& cfg, double t0) {
    cfg.validate();
    require_compatible(w0, p);
    const Integrator integrator(p, cfg);
    const long long steps = cfg.steps();
    std::vector<SpectralField> states;
    states.reserve(static_cast<std::size_t>(steps / cfg.save_stride + 1));
    SpectralField w = w0.divergence_free() ? w0 : leray_project(w0);
    states.push_back(w);
    for (long long n = 0; n < steps; ++n) {
        w = integrator.advance(w, t0 + static_cast<double>(n) * cfg.dt);
        if ((n + 1) % cfg.save_stride == 0) states.push_back(w);
    }
    return Trajectory(t0, cfg.dt * cfg.save_stride, std::move(states), p, cfg);
}

// ---------------------------------------------------------------------------
// Energy identities

namespace {

struct PathQuantities {
    std::vector<double> energy;       // |w|^2
    std::vector<double> enstrophy;    // ||w||^2
    std::vector<double> work;         // (g, w)
};

PathQuantities path_quantities(const Trajectory& traj) {
    const SpectralField g = effective_forcing(traj.params(), traj.config().model);
    PathQuantities q;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        q.energy.push_back(norm_h2(traj[i]));
        q.enstrophy.push_back(norm_v2(traj[i]));
        q.work.push_back(inner_product(g, traj[i]));
    }
    return q;
}

// Trapezoid prefix integrals on the saved grid.
std::vector<double> prefix_integral(const std::vector<double>& values, double h) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    return out;
}

}  // namespace

std::vector<double> energy_equality_residual(const Trajectory& traj) {
    const PathQuantities q = path_quantities(traj);
    const double h = traj.spacing();
    const double nu = traj.params().nu();
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double lhs = 0.5 * q.energy[i + 1] + nu * 0.5 * h * (q.enstrophy[i] + q.enstrophy[i + 1]);
        const double rhs = 0.5 * q.energy[i] + 0.5 * h * (q.work[i] + q.work[i + 1]);
        out.push_back(lhs - rhs);
    }
    return out;
}

std::vector<double> cumulative_energy_residual(const Trajectory& traj) {
    const std::vector<double> per = energy_equality_residual(traj);
    std::vector<double> out(traj.size(), 0.0);
    for (std::size_t i = 0; i < per.size(); ++i) out[i + 1] = out[i] + per[i];
    return out;
}

// ---------------------------------------------------------------------------
// A-priori estimates

void AprioriEnvelope::validate(const PhysParams& p) const {
    if (radius < p.r0() * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "envelope radius " << radius << " is below the absorbing radius R0 = " << p.r0();
        throw Error(ErrorKind::precondition, msg.str());
    }
    if (!(m > 0.0) || !(c > 0.0)) throw Error(ErrorKind::precondition, "envelope constants must be positive");
}

bool AprioriReport::passed(double tolerance) const {
    return slack_energy >= -tolerance * scale_energy && slack_dissipation >= -tolerance * scale_dissipation &&
           slack_dual >= -tolerance * scale_dual && absorbing_ball;
}

namespace {

struct EstimateInputs {
    std::vector<double> energy;
    std::vector<double> v_prefix;
    std::vector<double> dual_prefix;
};

EstimateInputs estimate_inputs(const Trajectory& traj) {
    EstimateInputs in;
    std::vector<double> enstrophy;
    std::vector<double> dual;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        in.energy.push_back(norm_h2(traj[i]));
        enstrophy.push_back(norm_v2(traj[i]));
        dual.push_back(norm_dadual2(time_derivative(traj[i], traj.params(), traj.config())));
    }
    in.v_prefix = prefix_integral(enstrophy, traj.spacing());
    in.dual_prefix = prefix_integral(dual, traj.spacing());
    return in;
}

double window(const std::vector<double>& prefix, std::size_t i, std::size_t j) {
    return std::sqrt(std::max(0.0, prefix[j] - prefix[i]));
}

}  // namespace

AprioriReport apriori_check(const Trajectory& traj, const AprioriEnvelope& env) {
    const PhysParams& p = traj.params();
    env.validate(p);
    const double w0 = norm_h(traj[0]);
    if (w0 > env.radius * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "initial norm " << w0 << " exceeds envelope radius " << env.radius;
        throw Error(ErrorKind::precondition, msg.str());
    }
    const EstimateInputs in = estimate_inputs(traj);
    const double nu = p.nu();
    const double l1 = p.lambda1();
    const double r0sq = p.r0() * p.r0();
    const double l14 = std::pow(l1, 0.25);
    const double l34 = std::pow(l1, 0.75);

    AprioriReport r;
    r.slack_energy = r.slack_dissipation = r.slack_dual = std::numeric_limits<double>::infinity();
    r.scale_energy = r0sq;
    for (std::size_t j = 0; j < traj.size(); ++j) {
        r.max_norm = std::max(r.max_norm, std::sqrt(in.energy[j]));
        r.scale_energy = std::max(r.scale_energy, in.energy[j]);
    }
    r.absorbing_ball = r.max_norm <= env.radius * (1.0 + 1e-8);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double norm_i = std::sqrt(in.energy[i]);
        for (std::size_t j = i + 1; j < traj.size(); ++j) {
            const double dt = traj.time(j) - traj.time(i);
            const double decay = std::exp(-nu * l1 * dt);
            const double bound_a = in.energy[i] * decay + r0sq * (1.0 - decay);
            r.slack_energy = std::min(r.slack_energy, bound_a - in.energy[j]);

            const double bound_b = norm_i / std::sqrt(nu) + l14 * nu * env.m * std::sqrt(dt);
            r.slack_dissipation = std::min(r.slack_dissipation, bound_b - window(in.v_prefix, i, j));
            r.scale_dissipation = std::max(r.scale_dissipation, bound_b);

            const double bound_c = env.c * in.energy[i] / (l14 * std::sqrt(nu)) +
                                   std::pow(nu, 1.5) * env.m / l34 + std::pow(nu, 2.5) * l14 * env.m * dt;
            r.slack_dual = std::min(r.slack_dual, bound_c - window(in.dual_prefix, i, j));
            r.scale_dual = std::max(r.scale_dual, bound_c);
            ++r.pairs;
        }
    }
    if (r.pairs == 0) r.slack_energy = r.slack_dissipation = r.slack_dual = 0.0;
    return r;
}

double required_constant_m(const Trajectory& traj, double c) {
    const EstimateInputs in = estimate_inputs(traj);
    const PhysParams& p = traj.params();
    const double nu = p.nu();
    const double l14 = std::pow(p.lambda1(), 0.25);
    const double l34 = std::pow(p.lambda1(), 0.75);
    double needed = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double norm_i = std::sqrt(in.energy[i]);
        for (std::size_t j = i + 1; j < traj.size(); ++j) {
            const double dt = traj.time(j) - traj.time(i);
            const double excess_b = window(in.v_prefix, i, j) - norm_i / std::sqrt(nu);
            needed = std::max(needed, excess_b / (l14 * nu * std::sqrt(dt)));
            const double excess_c = window(in.dual_prefix, i, j) - c * in.energy[i] / (l14 * std::sqrt(nu));
            needed = std::max(needed, excess_c / (std::pow(nu, 1.5) / l34 + std::pow(nu, 2.5) * l14 * dt));
        }
    }
    return needed;
}

double calibrate_constant_m(std::span<const Trajectory> suite, double c) {
    double needed = 0.0;
    for (const Trajectory& t : suite) needed = std::max(needed, required_constant_m(t, c));
    double m = 1.0;
    while (m < needed) m *= 2.0;
    return m;
}

double strengthened_energy_check(const Trajectory& traj, const PsiFunction& psi) {
    std::vector<double> energy;
    double max_energy = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        energy.push_back(norm_h2(traj[i]));
        max_energy = std::max(max_energy, energy.back());
    }
    psi.certify(max_energy);
    const PhysParams& p = traj.params();
    const double rate = p.forcing_norm() / (p.lambda1() * p.nu()) * psi.sup_derivative();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double base = psi(energy[i]);
        for (std::size_t j = i + 1; j < traj.size(); ++j) {
            worst = std::max(worst, psi(energy[j]) - base - rate * (traj.time(j) - traj.time(i)));
        }
    }
    return traj.size() < 2 ? 0.0 : worst;
}

FbNorm fb_norm(const Trajectory& traj) {
    FbNorm out;
    std::vector<double> enstrophy;
    std::vector<double> dual;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out.linf_h = std::max(out.linf_h, norm_h(traj[i]));
        enstrophy.push_back(norm_v2(traj[i]));
        dual.push_back(norm_dadual2(time_derivative(traj[i], traj.params(), traj.config())));
    }
    const std::vector<double> pv = prefix_integral(enstrophy, traj.spacing());
    const std::vector<double> pd = prefix_integral(dual, traj.spacing());
    const auto width = static_cast<std::size_t>(std::llround(1.0 / traj.spacing()));
    const std::size_t last = traj.size() - 1;
    if (width >= last) {
        out.l2b_v = pv[last];
        out.l2b_dual = pd[last];
        return out;
    }
    for (std::size_t i = 0; i + width <= last; ++i) {
        out.l2b_v = std::max(out.l2b_v, pv[i + width] - pv[i]);
        out.l2b_dual = std::max(out.l2b_dual, pd[i + width] - pd[i]);
    }
    return out;
}

}  // namespace nsalpha
