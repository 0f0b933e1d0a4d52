#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rqbe/solver.hpp"

namespace rqbe::io {

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Binary layout, little endian throughout:
//   "RQBK", u32 version, i8 stats, f64 a, f64 c, u32 dims[3], f64 pmax,
//   u32 nx, f64 time, then nx * dims[0] * dims[1] * dims[2] f64 values
//   (x-major, then the lexicographic momentum index).
struct Snapshot {
  Statistics stats = Statistics::Fermion;
  double a = 1.0;
  double c = 0.0;
  std::array<std::uint32_t, 3> dims{0, 0, 0};
  double pmax = 0.0;
  std::uint32_t nx = 1;
  double time = 0.0;
  std::vector<double> values;
};

std::vector<std::uint8_t> encode_snapshot(const Snapshot& s);
// Throws Error(Io) on a bad magic, unknown version or wrong length.
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);

Snapshot make_snapshot(const Solver& solver, const State& state);
// Throws Error(Config) when the snapshot does not match the solver's
// equilibrium, grid or cell count.
State restore_state(const Solver& solver, const Snapshot& s);

}  // namespace rqbe::io
