#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsalpha/dynamics.hpp"
#include "nsalpha/ensemble.hpp"

namespace nsalpha {

/// Everything a CLI run needs. JSON schema (all keys optional, defaults shown by RunConfig{}):
///
/// {
///   "box":        {"lengths": [L1, L2, L3], "n": 16},
///   "physics":    {"nu": 0.1, "alpha": 0.2, "forcing": {"kind": "low_modes" | "none", "magnitude": 1.0}},
///   "solver":     {"dt": 0.01, "t_end": 2.0, "scheme": "if_midpoint" | "if_rk4", "save_stride": 10,
///                  "model": "ns_alpha" | "nse_galerkin"},
///   "initial":    {"kind": "dirac" | "gaussian" | "ball", "pairs": 6, "sigma": 1.0, "radius": 1.0,
///                  "dirac_norm": 1.0, "dirac_seed": 1},
///   "ensemble":   {"members": 16, "planted_defect": false},
///   "alphas":     [0.4, 0.2, 0.1, 0.05, 0.0],
///   "times":      [0.5, 1.0, 2.0],
///   "functionals":{"dictionary": "default", "saturation": 1.0, "metric_modes": 32},
///   "stationary": {"spinup": 20.0, "windows": [10, 20, 40], "taus": [0.5, 1, 2, 4]},
///   "seed": 2024, "threads": 0, "output": "out", "tolerance_scale": 1.0
/// }
struct RunConfig {
    RVec3 lengths{6.283185307179586, 6.283185307179586, 6.283185307179586};
    int n = 16;

    double nu = 0.1;
    double alpha = 0.2;
    std::string forcing_kind = "low_modes";
    double forcing_magnitude = 1.0;

    SolverConfig solver = [] {
        SolverConfig c;
        c.t_end = 2.0;
        c.save_stride = 10;
        return c;
    }();

    InitialMeasureSpec::Kind initial_kind = InitialMeasureSpec::Kind::gaussian;
    std::size_t pairs = 6;
    double sigma = 1.0;
    double radius = 1.0;
    double dirac_norm = 1.0;
    std::uint64_t dirac_seed = 1;

    std::size_t members = 16;
    bool planted_defect = false;

    std::vector<double> alphas{0.4, 0.2, 0.1, 0.05, 0.0};
    std::vector<double> times{0.5, 1.0, 2.0};

    std::string dictionary = "default";
    double saturation = 1.0;
    std::size_t metric_modes = 32;

    double spinup = 20.0;
    std::vector<double> windows{10.0, 20.0, 40.0};
    std::vector<double> taus{0.5, 1.0, 2.0, 4.0};

    std::uint64_t seed = 2024;
    unsigned threads = 0;
    std::string output = "out";
    double tolerance_scale = 1.0;

    /// Throws configuration errors; constructs nothing expensive.
    void validate() const;

    BoxSpec box() const;
    SpectralField forcing(const BoxSpec& box) const;
    PhysParams params(const BoxSpec& box) const;
    InitialMeasureSpec initial_measure(const BoxSpec& box) const;
    std::vector<CylindricalFunctional> functionals(const BoxSpec& box) const;

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);

    /// FNV-1a over the canonical JSON, excluding output location and thread count.
    std::string hash() const;
};

}  // namespace nsalpha
