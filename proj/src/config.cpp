#include "nsalpha/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nsalpha/error.hpp"
#include "nsalpha/io.hpp"
#include "nsalpha/recipes.hpp"

namespace nsalpha {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::configuration, what); }

void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(where + " must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.contains(k)) fail("unknown key '" + k + "' in " + where);
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
    for (double l : lengths) require(l > 0.0 && std::isfinite(l), "box lengths must be positive");
    require(n >= 4 && n % 2 == 0, "resolution n must be even and >= 4 (got " + std::to_string(n) + ")");
    require(nu > 0.0, "viscosity nu must be positive");
    require(alpha >= 0.0, "alpha must be nonnegative");
    require(forcing_kind == "low_modes" || forcing_kind == "none", "forcing kind must be 'low_modes' or 'none'");
    require(forcing_magnitude >= 0.0, "forcing magnitude must be nonnegative");
    solver.validate();
    require(pairs >= 1, "initial measure needs at least one mode pair");
    require(sigma >= 0.0 && radius >= 0.0 && dirac_norm >= 0.0, "initial measure scales must be nonnegative");
    require(members >= 1, "ensemble needs at least one member");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        require(alphas[i] >= 0.0, "alpha list entries must be nonnegative");
        require(i == 0 || alphas[i] <= alphas[i - 1], "alpha list must be nonincreasing");
    }
    require(!times.empty(), "at least one projection time is required");
    for (double t : times) require(t >= 0.0, "projection times must be nonnegative");
    require(dictionary == "default", "only the 'default' functional dictionary is available");
    require(saturation > 0.0, "dictionary saturation must be positive");
    require(metric_modes >= 1, "metric needs at least one mode");
    require(spinup >= 0.0, "spin-up must be nonnegative");
    require(!windows.empty(), "at least one stationary window is required");
    for (double w : windows) require(w > 0.0, "stationary windows must be positive");
    for (double t : taus) require(t >= 0.0, "shifts must be nonnegative");
    require(tolerance_scale > 0.0, "tolerance scale must be positive");
}

BoxSpec RunConfig::box() const {
    validate();
    return BoxSpec(lengths, n);
}

SpectralField RunConfig::forcing(const BoxSpec& b) const {
    return low_mode_forcing(b, forcing_kind == "none" ? 0.0 : forcing_magnitude);
}

PhysParams RunConfig::params(const BoxSpec& b) const { return PhysParams(nu, alpha, forcing(b)); }

InitialMeasureSpec RunConfig::initial_measure(const BoxSpec& b) const {
    switch (initial_kind) {
        case InitialMeasureSpec::Kind::dirac: return InitialMeasureSpec::dirac(random_low_field(b, dirac_seed, dirac_norm));
        case InitialMeasureSpec::Kind::gaussian: return InitialMeasureSpec::gaussian(b, pairs, sigma);
        case InitialMeasureSpec::Kind::ball: return InitialMeasureSpec::ball(b, pairs, radius);
    }
    fail("unknown initial measure");
}

std::vector<CylindricalFunctional> RunConfig::functionals(const BoxSpec& b) const {
    return default_dictionary(b, saturation);
}

std::string RunConfig::to_json() const {
    const json j = {
        {"box", {{"lengths", {lengths[0], lengths[1], lengths[2]}}, {"n", n}}},
        {"physics", {{"nu", nu}, {"alpha", alpha}, {"forcing", {{"kind", forcing_kind}, {"magnitude", forcing_magnitude}}}}},
        {"solver",
         {{"dt", solver.dt},
          {"t_end", solver.t_end},
          {"scheme", to_string(solver.scheme)},
          {"save_stride", solver.save_stride},
          {"model", to_string(solver.model)}}},
        {"initial",
         {{"kind", to_string(initial_kind)},
          {"pairs", pairs},
          {"sigma", sigma},
          {"radius", radius},
          {"dirac_norm", dirac_norm},
          {"dirac_seed", dirac_seed}}},
        {"ensemble", {{"members", members}, {"planted_defect", planted_defect}}},
        {"alphas", alphas},
        {"times", times},
        {"functionals", {{"dictionary", dictionary}, {"saturation", saturation}, {"metric_modes", metric_modes}}},
        {"stationary", {{"spinup", spinup}, {"windows", windows}, {"taus", taus}}},
        {"seed", seed},
        {"threads", threads},
        {"output", output},
        {"tolerance_scale", tolerance_scale},
    };
    return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
    RunConfig c;
    try {
        const json j = json::parse(text);
        only_keys(j, "config", {"box", "physics", "solver", "initial", "ensemble", "alphas", "times", "functionals",
                                "stationary", "seed", "threads", "output", "tolerance_scale"});
        if (j.contains("box")) {
            const json& b = j.at("box");
            only_keys(b, "box", {"lengths", "n"});
            if (b.contains("lengths")) {
                const auto l = b.at("lengths").get<std::vector<double>>();
                require(l.size() == 3, "box.lengths needs three entries");
                c.lengths = {l[0], l[1], l[2]};
            }
            read(b, "n", c.n);
        }
        if (j.contains("physics")) {
            const json& p = j.at("physics");
            only_keys(p, "physics", {"nu", "alpha", "forcing"});
            read(p, "nu", c.nu);
            read(p, "alpha", c.alpha);
            if (p.contains("forcing")) {
                only_keys(p.at("forcing"), "physics.forcing", {"kind", "magnitude"});
                read(p.at("forcing"), "kind", c.forcing_kind);
                read(p.at("forcing"), "magnitude", c.forcing_magnitude);
            }
        }
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            only_keys(s, "solver", {"dt", "t_end", "scheme", "save_stride", "model"});
            read(s, "dt", c.solver.dt);
            read(s, "t_end", c.solver.t_end);
            read(s, "save_stride", c.solver.save_stride);
            if (s.contains("scheme")) c.solver.scheme = parse_scheme(s.at("scheme").get<std::string>());
            if (s.contains("model")) c.solver.model = parse_model(s.at("model").get<std::string>());
        }
        if (j.contains("initial")) {
            const json& i = j.at("initial");
            only_keys(i, "initial", {"kind", "pairs", "sigma", "radius", "dirac_norm", "dirac_seed"});
            if (i.contains("kind")) c.initial_kind = parse_measure_kind(i.at("kind").get<std::string>());
            read(i, "pairs", c.pairs);
            read(i, "sigma", c.sigma);
            read(i, "radius", c.radius);
            read(i, "dirac_norm", c.dirac_norm);
            read(i, "dirac_seed", c.dirac_seed);
        }
        if (j.contains("ensemble")) {
            only_keys(j.at("ensemble"), "ensemble", {"members", "planted_defect"});
            read(j.at("ensemble"), "members", c.members);
            read(j.at("ensemble"), "planted_defect", c.planted_defect);
        }
        read(j, "alphas", c.alphas);
        read(j, "times", c.times);
        if (j.contains("functionals")) {
            only_keys(j.at("functionals"), "functionals", {"dictionary", "saturation", "metric_modes"});
            read(j.at("functionals"), "dictionary", c.dictionary);
            read(j.at("functionals"), "saturation", c.saturation);
            read(j.at("functionals"), "metric_modes", c.metric_modes);
        }
        if (j.contains("stationary")) {
            only_keys(j.at("stationary"), "stationary", {"spinup", "windows", "taus"});
            read(j.at("stationary"), "spinup", c.spinup);
            read(j.at("stationary"), "windows", c.windows);
            read(j.at("stationary"), "taus", c.taus);
        }
        read(j, "seed", c.seed);
        read(j, "threads", c.threads);
        read(j, "output", c.output);
        read(j, "tolerance_scale", c.tolerance_scale);
    } catch (const json::exception& e) {
        fail(std::string("malformed configuration: ") + e.what());
    }
    return c;
}

std::string RunConfig::hash() const {
    json j = json::parse(to_json());
    j.erase("output");
    j.erase("threads");
    return fnv1a_hex(j.dump());
}

}  // namespace nsalpha
