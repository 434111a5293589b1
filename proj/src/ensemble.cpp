#include "nsalpha/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "nsalpha/error.hpp"
#include "nsalpha/operators.hpp"

namespace nsalpha {

double PhaseMeasure::integrate(const std::function<double(const SpectralField&)>& phi) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) sum += weights[i] * phi(fields[i]);
    return sum;
}

// ---------------------------------------------------------------------------

EnsembleMeasure::EnsembleMeasure(std::vector<Trajectory> members)
    : EnsembleMeasure(std::move(members), std::vector<double>{}) {}

EnsembleMeasure::EnsembleMeasure(std::vector<Trajectory> members, std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
    if (members_.empty()) throw Error(ErrorKind::precondition, "an ensemble needs at least one member");
    if (weights_.empty()) weights_.assign(members_.size(), 1.0 / static_cast<double>(members_.size()));
    if (weights_.size() != members_.size()) throw Error(ErrorKind::dimension, "one weight per member required");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw Error(ErrorKind::precondition, "ensemble weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "ensemble weights sum to " << total << ", not 1";
        throw Error(ErrorKind::precondition, msg.str());
    }
    for (const auto& m : members_) {
        if (!m.same_grid(members_.front()))
            throw Error(ErrorKind::dimension, "ensemble members must share box and time grid");
    }
}

double EnsembleMeasure::integrate(const std::function<double(const Trajectory&)>& functional) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < members_.size(); ++i) sum += weights_[i] * functional(members_[i]);
    return sum;
}

PhaseMeasure EnsembleMeasure::time_project(double t) const {
    const auto g = grid().locate(t);
    PhaseMeasure out;
    out.time = grid().time(g.index);
    out.rounding = g.rounding;
    out.weights = weights_;
    out.fields.reserve(members_.size());
    for (const auto& m : members_) out.fields.push_back(m[g.index]);
    return out;
}

EnsembleMeasure EnsembleMeasure::shifted(double tau) const {
    std::vector<Trajectory> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.shifted(tau));
    return {std::move(out), weights_};
}

EnsembleMeasure EnsembleMeasure::restricted(double ta, double tb) const {
    std::vector<Trajectory> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.restricted(ta, tb));
    return {std::move(out), weights_};
}

EnsembleMeasure EnsembleMeasure::with_member(std::size_t i, Trajectory replacement) const {
    if (i >= members_.size()) throw Error(ErrorKind::range, "member index out of range");
    std::vector<Trajectory> out = members_;
    out[i] = std::move(replacement);
    return {std::move(out), weights_};
}

double moment(const EnsembleMeasure& rho, const CylindricalFunctional& phi, double t) {
    const std::size_t index = rho.grid().locate(t).index;
    return rho.integrate([&](const Trajectory& u) { return phi(u[index]); });
}

// ---------------------------------------------------------------------------
// Initial measures

InitialMeasureSpec InitialMeasureSpec::dirac(SpectralField u0) {
    InitialMeasureSpec s;
    s.kind = Kind::dirac;
    s.center = std::make_shared<const SpectralField>(std::move(u0));
    s.pairs = 0;
    return s;
}

InitialMeasureSpec InitialMeasureSpec::gaussian(const BoxSpec& box, std::size_t pairs, double sigma) {
    if (pairs == 0 || !(sigma >= 0.0)) throw Error(ErrorKind::configuration, "gaussian measure needs pairs >= 1, sigma >= 0");
    InitialMeasureSpec s;
    s.kind = Kind::gaussian;
    s.center = std::make_shared<const SpectralField>(box);
    s.pairs = pairs;
    s.sigma = sigma;
    return s;
}

InitialMeasureSpec InitialMeasureSpec::ball(const BoxSpec& box, std::size_t pairs, double radius) {
    if (pairs == 0 || !(radius >= 0.0)) throw Error(ErrorKind::configuration, "ball measure needs pairs >= 1, radius >= 0");
    InitialMeasureSpec s;
    s.kind = Kind::ball;
    s.center = std::make_shared<const SpectralField>(box);
    s.pairs = pairs;
    s.radius = radius;
    return s;
}

double InitialMeasureSpec::mean_energy() const {
    const auto d = static_cast<double>(dimensions());
    switch (kind) {
        case Kind::dirac: return norm_h2(*center);
        case Kind::gaussian: return d * sigma * sigma;
        case Kind::ball: return radius * radius * d / (d + 2.0);
    }
    return 0.0;
}

SpectralField InitialMeasureSpec::sample(std::mt19937_64& rng, const Eigenbasis& basis) const {
    if (!(basis.box() == box())) throw Error(ErrorKind::dimension, "initial measure and eigenbasis boxes differ");
    if (kind == Kind::dirac) return *center;
    const std::size_t d = dimensions();
    if (d > basis.dimension()) throw Error(ErrorKind::configuration, "initial measure asks for more modes than retained");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(d);
    for (double& v : x) v = normal(rng);
    if (kind == Kind::gaussian) {
        for (double& v : x) v *= sigma;
    } else {
        double len = 0.0;
        for (double v : x) len += v * v;
        len = std::sqrt(len);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double r = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(d));
        for (double& v : x) v *= len > 0.0 ? r / len : 0.0;
    }
    SpectralField u(box());
    for (std::size_t i = 0; i < d; ++i) basis.add(u, i, x[i]);
    u.mark_divergence_free(true);
    return u;
}

std::string to_string(InitialMeasureSpec::Kind k) {
    switch (k) {
        case InitialMeasureSpec::Kind::dirac: return "dirac";
        case InitialMeasureSpec::Kind::gaussian: return "gaussian";
        case InitialMeasureSpec::Kind::ball: return "ball";
    }
    return "?";
}

InitialMeasureSpec::Kind parse_measure_kind(const std::string& s) {
    if (s == "dirac") return InitialMeasureSpec::Kind::dirac;
    if (s == "gaussian") return InitialMeasureSpec::Kind::gaussian;
    if (s == "ball") return InitialMeasureSpec::Kind::ball;
    throw Error(ErrorKind::configuration, "unknown initial measure '" + s + "' (dirac | gaussian | ball)");
}

// ---------------------------------------------------------------------------
// Push-forward

std::uint64_t member_seed(std::uint64_t master, std::size_t index) {
    std::uint64_t z = master + (static_cast<std::uint64_t>(index) + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void parallel_for(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

EnsembleMeasure push_initial(const InitialMeasureSpec& mu0, std::size_t n, const PhysParams& p,
                             const SolverConfig& cfg, std::uint64_t seed, unsigned threads) {
    if (n == 0) throw Error(ErrorKind::precondition, "ensemble size must be at least 1");
    if (!(mu0.box() == p.box())) throw Error(ErrorKind::dimension, "initial measure and forcing live on different boxes");
    cfg.validate();
    const Eigenbasis basis(p.box());
    std::vector<std::optional<Trajectory>> runs(n);
    parallel_for(n, threads, [&](std::size_t i) {
        std::mt19937_64 rng(member_seed(seed, i));
        const SpectralField w0 = mu0.sample(rng, basis);
        try {
            runs[i] = solve(w0, p, cfg);
        } catch (const DivergedError& e) {
            std::ostringstream msg;
            msg << "member " << i << " (alpha = " << p.alpha() << "): " << e.what();
            throw DivergedError(e.time(), msg.str());
        }
    });
    std::vector<Trajectory> members;
    members.reserve(n);
    for (auto& r : runs) members.push_back(std::move(*r));
    return EnsembleMeasure(std::move(members));
}

MeanEnergyBound mean_energy_bound(const EnsembleMeasure& rho) {
    MeanEnergyBound out;
    const std::size_t count = rho.grid().size();
    for (std::size_t k = 0; k < count; ++k) {
        const double e = rho.integrate([k](const Trajectory& u) { return norm_h2(u[k]); });
        if (k == 0) out.initial = e;
        out.sup = std::max(out.sup, e);
    }
    const double r0 = rho.grid().params().r0();
    out.bound = out.initial + r0 * r0;
    return out;
}

// ---------------------------------------------------------------------------
// Y_J(R)

EnvelopeMembership envelope_membership(const Trajectory& traj, const AprioriEnvelope& env, double ta, double tb) {
    const Trajectory u = traj.restricted(ta, tb);
    const PhysParams& p = u.params();
    const double nu = p.nu();
    const double l14 = std::pow(p.lambda1(), 0.25);
    const double l34 = std::pow(p.lambda1(), 0.75);
    const double R = env.radius;
    const double h = u.spacing();

    std::vector<double> v_prefix(u.size(), 0.0);
    std::vector<double> d_prefix(u.size(), 0.0);
    std::vector<double> v(u.size());
    std::vector<double> d(u.size());
    EnvelopeMembership out;
    out.slack_norm = out.slack_dissipation = out.slack_dual = std::numeric_limits<double>::infinity();
    double scale = R;
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.slack_norm = std::min(out.slack_norm, R - norm_h(u[i]));
        v[i] = norm_v2(u[i]);
        d[i] = norm_dadual2(time_derivative(u[i], p, u.config()));
        if (i > 0) {
            v_prefix[i] = v_prefix[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
            d_prefix[i] = d_prefix[i - 1] + 0.5 * h * (d[i - 1] + d[i]);
        }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            const double dt = u.time(j) - u.time(i);
            const double bound_b = R / std::sqrt(nu) + l14 * nu * env.m * std::sqrt(dt);
            const double bound_c = env.c * R * R / (l14 * std::sqrt(nu)) + std::pow(nu, 1.5) * env.m / l34 +
                                   std::pow(nu, 2.5) * l14 * env.m * dt;
            out.slack_dissipation =
                std::min(out.slack_dissipation, bound_b - std::sqrt(std::max(0.0, v_prefix[j] - v_prefix[i])));
            out.slack_dual = std::min(out.slack_dual, bound_c - std::sqrt(std::max(0.0, d_prefix[j] - d_prefix[i])));
            scale = std::max({scale, bound_b, bound_c});
        }
    }
    out.min_slack = std::min({out.slack_norm, out.slack_dissipation, out.slack_dual});
    out.member = out.min_slack >= -1e-8 * scale;
    return out;
}

// ---------------------------------------------------------------------------
// Metric

TrajectoryMetric::TrajectoryMetric(const BoxSpec& box, std::size_t m)
    : basis_(std::make_shared<const Eigenbasis>(box)), m_(std::min(m, basis_->dimension())) {
    if (m == 0) throw Error(ErrorKind::configuration, "metric truncation level must be positive");
}

TrajectoryMetric::TrajectoryMetric(const BoxSpec& box, std::size_t m, double ta, double tb)
    : TrajectoryMetric(box, m) {
    if (tb < ta) throw Error(ErrorKind::range, "metric interval is reversed");
    restricted_ = true;
    ta_ = ta;
    tb_ = tb;
}

Trajectory TrajectoryMetric::window(const Trajectory& u) const {
    if (!(u.box() == basis_->box())) throw Error(ErrorKind::dimension, "trajectory and metric boxes differ");
    return restricted_ ? u.restricted(ta_, tb_) : u;
}

std::vector<double> TrajectoryMetric::signature(const Trajectory& traj) const {
    const Trajectory u = window(traj);
    std::vector<double> out;
    out.reserve(u.size() * m_);
    for (std::size_t k = 0; k < u.size(); ++k)
        for (std::size_t i = 0; i < m_; ++i) out.push_back(basis_->pairing(u[k], i));
    return out;
}

double TrajectoryMetric::distance_signatures(const std::vector<double>& a, const std::vector<double>& b) const {
    if (a.size() != b.size()) throw Error(ErrorKind::dimension, "trajectories do not share a time grid");
    std::vector<double> sup(m_, 0.0);
    for (std::size_t n = 0; n < a.size(); ++n) sup[n % m_] = std::max(sup[n % m_], std::abs(a[n] - b[n]));
    double d = 0.0;
    double w = 0.5;
    for (std::size_t i = 0; i < m_; ++i, w *= 0.5) d += w * std::min(1.0, sup[i]);
    return d;
}

double TrajectoryMetric::distance(const Trajectory& u, const Trajectory& v) const {
    if (!u.same_grid(v)) throw Error(ErrorKind::dimension, "trajectories do not share a time grid");
    return distance_signatures(signature(u), signature(v));
}

double traj_distance(const Trajectory& u, const Trajectory& v, const TrajectoryMetric& metric) {
    return metric.distance(u, v);
}

double ensemble_semidistance(const EnsembleMeasure& a, const EnsembleMeasure& b, const TrajectoryMetric& metric) {
    if (!a.grid().same_grid(b.grid())) throw Error(ErrorKind::dimension, "ensembles do not share a time grid");
    std::vector<std::vector<double>> sb;
    sb.reserve(b.size());
    for (const auto& m : b.members()) sb.push_back(metric.signature(m));
    double worst = 0.0;
    for (const auto& m : a.members()) {
        const std::vector<double> sa = metric.signature(m);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : sb) best = std::min(best, metric.distance_signatures(sa, s));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace nsalpha
