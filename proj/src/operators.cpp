#include "nsalpha/operators.hpp"

#include <cmath>
#include <map>
#include <memory>

#include "nsalpha/error.hpp"
#include "nsalpha/fourier_grid.hpp"

namespace nsalpha {

namespace {

void require_same_box(const SpectralField& a, const SpectralField& b) {
    if (!(a.box() == b.box())) throw Error(ErrorKind::dimension, "fields live on different boxes");
}

// Per-thread transform buffers, one per resolution.
struct Workspace {
    FourierGrid grid;
    std::vector<Complex> scalar;
    std::array<std::vector<double>, 3> a;
    std::array<std::vector<double>, 3> b;
    std::vector<double> product;

    explicit Workspace(const BoxSpec& box) : grid(box), scalar(box.size()), product(grid.grid_size()) {
        for (int c = 0; c < 3; ++c) {
            a[c].resize(grid.grid_size());
            b[c].resize(grid.grid_size());
        }
    }
};

Workspace& workspace(const BoxSpec& box) {
    thread_local std::map<int, std::unique_ptr<Workspace>> cache;
    auto& slot = cache[box.n()];
    if (!slot) slot = std::make_unique<Workspace>(box);
    return *slot;
}

void velocity_to_grid(Workspace& ws, const SpectralField& u, std::array<std::vector<double>, 3>& out) {
    for (int c = 0; c < 3; ++c) {
        for (std::size_t s = 0; s < u.box().size(); ++s) ws.scalar[s] = u[s][c];
        ws.grid.to_physical(ws.scalar, out[c]);
    }
}

void curl_to_grid(Workspace& ws, const SpectralField& v, std::array<std::vector<double>, 3>& out) {
    const Complex i(0.0, 1.0);
    const BoxSpec& box = v.box();
    for (int c = 0; c < 3; ++c) {
        const int p = (c + 1) % 3;
        const int q = (c + 2) % 3;
        for (std::size_t s = 0; s < box.size(); ++s) {
            const RVec3& k = box.mode(s).kvec;
            ws.scalar[s] = i * (k[p] * v[s][q] - k[q] * v[s][p]);
        }
        ws.grid.to_physical(ws.scalar, out[c]);
    }
}

SpectralField grid_to_field(Workspace& ws, const BoxSpec& box, const std::array<std::vector<double>, 3>& in) {
    SpectralField out(box);
    for (int c = 0; c < 3; ++c) {
        ws.grid.to_spectral(in[c], ws.scalar);
        for (std::size_t s = 0; s < box.size(); ++s) out[s][c] = ws.scalar[s];
    }
    return out;
}

double filter_symbol(double alpha, double lambda, FilterExponent e) {
    const double base = 1.0 + alpha * alpha * lambda;
    switch (e) {
        case FilterExponent::minus_one: return 1.0 / base;
        case FilterExponent::minus_half: return 1.0 / std::sqrt(base);
        case FilterExponent::plus_half: return std::sqrt(base);
        case FilterExponent::plus_one: return base;
    }
    return 1.0;
}

}  // namespace

double stokes_eigenvalue(const BoxSpec& box, const Wavevector& k) {
    if (k.is_zero()) throw Error(ErrorKind::invalid_mode, "the zero wavevector has no Stokes eigenvalue");
    if (!box.retains(k)) throw Error(ErrorKind::invalid_mode, "wavevector outside the retained set");
    const RVec3 kv = box.kvec(k);
    return kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
}

SpectralField leray_project(const SpectralField& g) {
    SpectralField out = g;
    const BoxSpec& box = g.box();
    for (std::size_t s = 0; s < box.size(); ++s) {
        const ModeInfo& m = box.mode(s);
        if (m.weight == 0.0) {
            out[s] = CVec3{};
            continue;
        }
        const Complex kc = (m.kvec[0] * g[s][0] + m.kvec[1] * g[s][1] + m.kvec[2] * g[s][2]) / m.lambda;
        for (int c = 0; c < 3; ++c) out[s][c] = g[s][c] - kc * m.kvec[c];
    }
    out.mark_divergence_free(true);
    return out;
}

SpectralField helmholtz_filter(const SpectralField& v, double alpha, FilterExponent exponent) {
    if (alpha < 0.0) throw Error(ErrorKind::precondition, "filter length alpha must be nonnegative");
    if (alpha == 0.0) return v;
    SpectralField out = v;
    const BoxSpec& box = v.box();
    for (std::size_t s = 0; s < box.size(); ++s) {
        const double sym = filter_symbol(alpha, box.mode(s).lambda, exponent);
        for (auto& c : out[s]) c *= sym;
    }
    return out;
}

SpectralField stokes_apply(const SpectralField& u) {
    SpectralField out = u;
    for (std::size_t s = 0; s < u.box().size(); ++s) {
        for (auto& c : out[s]) c *= u.box().mode(s).lambda;
    }
    return out;
}

SpectralField stokes_inverse(const SpectralField& g) {
    SpectralField out = g;
    for (std::size_t s = 0; s < g.box().size(); ++s) {
        const double lambda = g.box().mode(s).lambda;
        for (auto& c : out[s]) c = lambda > 0.0 ? c / lambda : Complex{};
    }
    return out;
}

double inner_product(const SpectralField& u, const SpectralField& v) {
    require_same_box(u, v);
    const BoxSpec& box = u.box();
    double sum = 0.0;
    for (std::size_t s = 0; s < box.size(); ++s) {
        const double w = box.mode(s).weight;
        if (w == 0.0) continue;
        double dot = 0.0;
        for (int c = 0; c < 3; ++c) dot += u[s][c].real() * v[s][c].real() + u[s][c].imag() * v[s][c].imag();
        sum += w * dot;
    }
    return sum * box.volume();
}

namespace {

template <typename Symbol>
double weighted_energy(const SpectralField& u, Symbol symbol) {
    const BoxSpec& box = u.box();
    double sum = 0.0;
    for (std::size_t s = 0; s < box.size(); ++s) {
        const ModeInfo& m = box.mode(s);
        if (m.weight == 0.0) continue;
        const double e = std::norm(u[s][0]) + std::norm(u[s][1]) + std::norm(u[s][2]);
        sum += m.weight * symbol(m.lambda) * e;
    }
    return sum * box.volume();
}

}  // namespace

double norm_h2(const SpectralField& u) {
    return weighted_energy(u, [](double) { return 1.0; });
}
double norm_v2(const SpectralField& u) {
    return weighted_energy(u, [](double l) { return l; });
}
double norm_dadual2(const SpectralField& g) {
    return weighted_energy(g, [](double l) { return 1.0 / (l * l); });
}
double norm_h(const SpectralField& u) { return std::sqrt(norm_h2(u)); }
double norm_v(const SpectralField& u) { return std::sqrt(norm_v2(u)); }
double norm_dadual(const SpectralField& g) { return std::sqrt(norm_dadual2(g)); }

SpectralField nonlinear_b(const SpectralField& u, const SpectralField& v) {
    require_same_box(u, v);
    const BoxSpec& box = u.box();
    Workspace& ws = workspace(box);
    velocity_to_grid(ws, u, ws.a);
    const Complex i(0.0, 1.0);
    std::array<std::vector<double>, 3> result;
    for (int c = 0; c < 3; ++c) result[c].assign(ws.grid.grid_size(), 0.0);
    // (u.grad v)_c = sum_j u_j d_j v_c
    for (int c = 0; c < 3; ++c) {
        for (int j = 0; j < 3; ++j) {
            for (std::size_t s = 0; s < box.size(); ++s) ws.scalar[s] = i * box.mode(s).kvec[j] * v[s][c];
            ws.grid.to_physical(ws.scalar, ws.product);
            const auto& uj = ws.a[j];
            auto& r = result[c];
            for (std::size_t x = 0; x < r.size(); ++x) r[x] += uj[x] * ws.product[x];
        }
    }
    return leray_project(grid_to_field(ws, box, result));
}

SpectralField nonlinear_btilde(const SpectralField& u, const SpectralField& v) {
    require_same_box(u, v);
    const BoxSpec& box = u.box();
    Workspace& ws = workspace(box);
    velocity_to_grid(ws, u, ws.a);
    curl_to_grid(ws, v, ws.b);
    std::array<std::vector<double>, 3> cross;
    for (int c = 0; c < 3; ++c) {
        const int p = (c + 1) % 3;
        const int q = (c + 2) % 3;
        cross[c].resize(ws.grid.grid_size());
        for (std::size_t x = 0; x < cross[c].size(); ++x) cross[c][x] = ws.a[p][x] * ws.b[q][x] - ws.a[q][x] * ws.b[p][x];
    }
    return leray_project(grid_to_field(ws, box, cross));
}

SpectralField advection(const SpectralField& u, const SpectralField& v) {
    SpectralField out = nonlinear_btilde(u, v);
    out *= -1.0;
    return out;
}

}  // namespace nsalpha
