#include "nsalpha/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nsalpha/error.hpp"

namespace nsalpha {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

using nlohmann::json;

constexpr std::uint32_t format_version = 1;

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error(ErrorKind::io, "unexpected end of stream");
    return v;
}

void expect_magic(std::istream& in, const char* magic) {
    std::array<char, 4> m{};
    in.read(m.data(), 4);
    if (!in || std::memcmp(m.data(), magic, 4) != 0) throw Error(ErrorKind::io, std::string("not a ") + magic + " stream");
    const auto v = get<std::uint32_t>(in);
    if (v != format_version) throw Error(ErrorKind::io, std::string(magic) + " version " + std::to_string(v) + " unsupported");
}

json box_json(const BoxSpec& box) {
    return {{"lengths", {box.lengths()[0], box.lengths()[1], box.lengths()[2]}}, {"n", box.n()}};
}

}  // namespace

void write_snapshot(std::ostream& out, const SpectralField& u) {
    const BoxSpec& box = u.box();
    out.write("NSAS", 4);
    put(out, format_version);
    for (double l : box.lengths()) put(out, l);
    put(out, static_cast<std::int32_t>(box.n()));
    put(out, static_cast<std::uint32_t>(u.divergence_free() ? 1u : 0u));
    put(out, static_cast<std::uint64_t>(box.size() - 1));
    for (std::size_t s = 0; s < box.size(); ++s) {
        if (s == box.zero_slot()) continue;
        const Wavevector& k = box.mode(s).k;
        put(out, static_cast<std::int32_t>(k.k1));
        put(out, static_cast<std::int32_t>(k.k2));
        put(out, static_cast<std::int32_t>(k.k3));
        for (int c = 0; c < 3; ++c) {
            put(out, u[s][c].real());
            put(out, u[s][c].imag());
        }
    }
    if (!out) throw Error(ErrorKind::io, "snapshot write failed");
}

SpectralField read_snapshot(std::istream& in) {
    expect_magic(in, "NSAS");
    RVec3 lengths;
    for (double& l : lengths) l = get<double>(in);
    const auto n = get<std::int32_t>(in);
    const auto flags = get<std::uint32_t>(in);
    const auto count = get<std::uint64_t>(in);
    const BoxSpec box(lengths, n);
    if (count != box.size() - 1) throw Error(ErrorKind::io, "snapshot record count does not match its box");
    SpectralField u(box);
    for (std::uint64_t r = 0; r < count; ++r) {
        Wavevector k;
        k.k1 = get<std::int32_t>(in);
        k.k2 = get<std::int32_t>(in);
        k.k3 = get<std::int32_t>(in);
        if (!box.retains(k) || k.k3 < 0 || k.is_zero()) throw Error(ErrorKind::io, "snapshot record outside the stored spectrum");
        CVec3 c;
        for (auto& x : c) {
            const double re = get<double>(in);
            const double im = get<double>(in);
            x = Complex(re, im);
        }
        u[box.slot(k)] = c;
    }
    u.mark_divergence_free((flags & 1u) != 0);
    return u;
}

void write_trajectory(std::ostream& out, const Trajectory& traj, const std::string& config_hash) {
    const PhysParams& p = traj.params();
    const SolverConfig& c = traj.config();
    const json header = {
        {"box", box_json(traj.box())},
        {"params", {{"nu", p.nu()}, {"alpha", p.alpha()}, {"forcing_norm", p.forcing_norm()}}},
        {"config",
         {{"dt", c.dt},
          {"t_end", c.t_end},
          {"scheme", to_string(c.scheme)},
          {"save_stride", c.save_stride},
          {"model", to_string(c.model)},
          {"nonlinear", c.nonlinear}}},
        {"t0", traj.t0()},
        {"spacing", traj.spacing()},
        {"count", traj.size()},
        {"code_version", code_version},
        {"config_hash", config_hash},
    };
    const std::string text = header.dump();
    out.write("NSAT", 4);
    put(out, format_version);
    put(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    write_snapshot(out, p.forcing());
    for (std::size_t i = 0; i < traj.size(); ++i) write_snapshot(out, traj[i]);
    if (!out) throw Error(ErrorKind::io, "trajectory write failed");
}

Trajectory read_trajectory(std::istream& in) {
    expect_magic(in, "NSAT");
    const auto length = get<std::uint64_t>(in);
    std::string text(length, '\0');
    in.read(text.data(), static_cast<std::streamsize>(length));
    if (!in) throw Error(ErrorKind::io, "truncated trajectory header");
    json h;
    try {
        h = json::parse(text);
        SpectralField forcing = read_snapshot(in);
        SolverConfig cfg;
        cfg.dt = h.at("config").at("dt").get<double>();
        cfg.t_end = h.at("config").at("t_end").get<double>();
        cfg.scheme = parse_scheme(h.at("config").at("scheme").get<std::string>());
        cfg.save_stride = h.at("config").at("save_stride").get<int>();
        cfg.model = parse_model(h.at("config").at("model").get<std::string>());
        cfg.nonlinear = h.at("config").at("nonlinear").get<bool>();
        const PhysParams p(h.at("params").at("nu").get<double>(), h.at("params").at("alpha").get<double>(),
                           std::move(forcing));
        const auto count = h.at("count").get<std::size_t>();
        std::vector<SpectralField> states;
        states.reserve(count);
        for (std::size_t i = 0; i < count; ++i) states.push_back(read_snapshot(in));
        return Trajectory(h.at("t0").get<double>(), h.at("spacing").get<double>(), std::move(states), p, cfg);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::io, std::string("malformed trajectory header: ") + e.what());
    }
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj, const std::string& config_hash) {
    std::ostringstream out(std::ios::binary);
    write_trajectory(out, traj, config_hash);
    atomic_write(path, out.str());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    return read_trajectory(in);
}

std::string CsvTable::render(const std::string& config_hash) const {
    std::ostringstream out;
    out << "# config_hash " << config_hash << "\n# code_version " << code_version << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    return out.str();
}

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), r.ptr);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

}  // namespace nsalpha
