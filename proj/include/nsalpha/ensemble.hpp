#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nsalpha/cylindrical.hpp"
#include "nsalpha/dynamics.hpp"
#include "nsalpha/eigenbasis.hpp"

namespace nsalpha {

/// Weighted field list: the time projection of an ensemble.
struct PhaseMeasure {
    double time = 0.0;
    double rounding = 0.0;  // distance from the requested time to the grid point used
    std::vector<SpectralField> fields;
    std::vector<double> weights;

    double integrate(const std::function<double(const SpectralField&)>& phi) const;
};

/// Empirical measure on trajectory space: sum_i weight_i delta_{traj_i}.
class EnsembleMeasure {
public:
    /// Uniform weights.
    explicit EnsembleMeasure(std::vector<Trajectory> members);
    EnsembleMeasure(std::vector<Trajectory> members, std::vector<double> weights);

    std::size_t size() const { return members_.size(); }
    const Trajectory& member(std::size_t i) const { return members_[i]; }
    const std::vector<Trajectory>& members() const { return members_; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }
    /// The common time grid (that of member 0).
    const Trajectory& grid() const { return members_.front(); }

    /// sum_i weight_i F(traj_i), accumulated in ascending member order.
    double integrate(const std::function<double(const Trajectory&)>& functional) const;

    /// Pi_t rho (nearest grid point).
    PhaseMeasure time_project(double t) const;
    /// sigma_tau rho
    EnsembleMeasure shifted(double tau) const;
    /// Pi_J rho
    EnsembleMeasure restricted(double ta, double tb) const;
    EnsembleMeasure with_member(std::size_t i, Trajectory replacement) const;

private:
    std::vector<Trajectory> members_;
    std::vector<double> weights_;
};

/// int Phi d(Pi_t rho)
double moment(const EnsembleMeasure& rho, const CylindricalFunctional& phi, double t);

/// Initial measure mu_0 from which ensembles are pushed forward.
struct InitialMeasureSpec {
    enum class Kind { dirac, gaussian, ball };

    Kind kind = Kind::dirac;
    /// Dirac location; also the box for the other kinds.
    std::shared_ptr<const SpectralField> center;
    /// Gaussian / ball: number of (k, polarization) pairs, i.e. 2 * pairs real dimensions,
    /// taken from the bottom of the eigenbasis order.
    std::size_t pairs = 6;
    /// Gaussian: standard deviation of every real coordinate.
    double sigma = 1.0;
    /// Ball: radius in H.
    double radius = 1.0;

    static InitialMeasureSpec dirac(SpectralField u0);
    static InitialMeasureSpec gaussian(const BoxSpec& box, std::size_t pairs, double sigma);
    static InitialMeasureSpec ball(const BoxSpec& box, std::size_t pairs, double radius);

    const BoxSpec& box() const { return center->box(); }
    std::size_t dimensions() const { return 2 * pairs; }
    /// Exact int |u|^2 d mu_0.
    double mean_energy() const;
    SpectralField sample(std::mt19937_64& rng, const Eigenbasis& basis) const;
};

std::string to_string(InitialMeasureSpec::Kind k);
InitialMeasureSpec::Kind parse_measure_kind(const std::string& s);

/// Counter-based per-member seed: splitmix64(master + (index + 1) * golden gamma).
std::uint64_t member_seed(std::uint64_t master, std::size_t index);

/// rho = S(.) push-forward of mu_0, realised with n samples. threads == 0 uses the hardware count.
EnsembleMeasure push_initial(const InitialMeasureSpec& mu0, std::size_t n, const PhysParams& p,
                             const SolverConfig& cfg, std::uint64_t seed, unsigned threads = 0);

/// Run `jobs` independent tasks on a fixed-size pool; rethrows the lowest-index failure.
void parallel_for(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& task);

/// sup_t int |w(t)|^2 d rho against int |w(0)|^2 d rho + R_0^2.
struct MeanEnergyBound {
    double initial = 0.0;
    double sup = 0.0;
    double bound = 0.0;
    double slack() const { return bound - sup; }
    bool holds(double tolerance = 1e-8) const { return slack() >= -tolerance * std::max(1.0, bound); }
};
MeanEnergyBound mean_energy_bound(const EnsembleMeasure& rho);

/// Membership in Y_J(R) with the envelope constants; J = [ta, tb].
struct EnvelopeMembership {
    bool member = false;
    double min_slack = 0.0;
    double slack_norm = 0.0;
    double slack_dissipation = 0.0;
    double slack_dual = 0.0;
};
EnvelopeMembership envelope_membership(const Trajectory& traj, const AprioriEnvelope& env, double ta, double tb);

/// d(u, v) = sum_{i=1}^m 2^{-i} min(1, sup_{t in J} |(u(t) - v(t), e_i)|), e_i the real Stokes eigenbasis.
class TrajectoryMetric {
public:
    explicit TrajectoryMetric(const BoxSpec& box, std::size_t m = 32);
    /// Restrict the supremum to J = [ta, tb]; by default the full common span.
    TrajectoryMetric(const BoxSpec& box, std::size_t m, double ta, double tb);

    std::size_t m() const { return m_; }
    const Eigenbasis& basis() const { return *basis_; }

    /// Pairings (u(t), e_i) on J, row-major [time][i].
    std::vector<double> signature(const Trajectory& u) const;
    double distance(const Trajectory& u, const Trajectory& v) const;
    double distance_signatures(const std::vector<double>& a, const std::vector<double>& b) const;

private:
    Trajectory window(const Trajectory& u) const;

    std::shared_ptr<const Eigenbasis> basis_;
    std::size_t m_;
    bool restricted_ = false;
    double ta_ = 0.0;
    double tb_ = 0.0;
};

double traj_distance(const Trajectory& u, const Trajectory& v, const TrajectoryMetric& metric);
/// max over a in A of min over b in B of d(a, b).
double ensemble_semidistance(const EnsembleMeasure& a, const EnsembleMeasure& b, const TrajectoryMetric& metric);

}  // namespace nsalpha
