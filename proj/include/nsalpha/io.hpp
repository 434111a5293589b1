#pragma once

// Binary formats (all integers and floats little-endian, IEEE-754 doubles):
//
// Snapshot "NSAS", version 1
//   char[4]  magic "NSAS"
//   u32      version
//   f64[3]   box lengths L1, L2, L3
//   i32      N
//   u32      flags (bit 0: divergence-free)
//   u64      record count M
//   M x { i32 k1, k2, k3; f64 Re c1, Im c1, Re c2, Im c2, Re c3, Im c3 }
// Records cover the stored half spectrum (k3 >= 0, both signs on the k3 = 0 plane),
// zero mode omitted, in storage order.
//
// Trajectory "NSAT", version 1
//   char[4]  magic "NSAT"
//   u32      version
//   u64      header length H
//   H bytes  JSON header: box, params, config, t0, spacing, count, code_version, config_hash
//   snapshot forcing f
//   count x snapshot state

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsalpha/dynamics.hpp"

namespace nsalpha {

inline constexpr const char* code_version = "1.0.0";

void write_snapshot(std::ostream& out, const SpectralField& u);
SpectralField read_snapshot(std::istream& in);

void write_trajectory(std::ostream& out, const Trajectory& traj, const std::string& config_hash = "");
Trajectory read_trajectory(std::istream& in);

/// Writes to a sibling temporary and renames over the target.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj, const std::string& config_hash = "");
Trajectory load_trajectory(const std::filesystem::path& path);

/// CSV with a two-line comment preamble (config hash, code version).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string render(const std::string& config_hash) const;
};

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace nsalpha
