#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rqbe/collision.hpp"
#include "rqbe/diagnostics.hpp"

namespace rqbe {

enum class SpatialMode { None, Torus1D };

// Initial perturbation added to m.
//  none:   F0 = m.
//  bump:   a Gaussian of height amplitude and the given width centred at
//          center, with its five moments removed along W (1, p, p0), so f0 is
//          orthogonal to the kernel of L. On the torus it is multiplied by cos x.
//  wave:   amplitude cos(x) times the Gaussian, moments kept (torus only).
//  random: amplitude m u(p), u uniform in [-1, 1] from the seed, moments removed.
struct PerturbationSpec {
  std::string kind = "none";
  double amplitude = 0.0;
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;
};

struct SimulationConfig {
  EquilibriumParams eq;
  double pmax = 8.0;
  int n = 16;
  int ntheta = 8;
  int nphi = 8;
  OffgridMode offgrid = OffgridMode::Weighted;
  SpatialMode spatial = SpatialMode::None;
  int nx = 1;
  double dt = 0.01;
  double t_end = 1.0;
  int output_every = 1;
  bool conservation_fix = false;
  PerturbationSpec perturbation;
  std::uint64_t seed = 0;

  // Throws Error(Config) naming the offending field.
  void validate() const;
  double dx() const;  // 2 pi / nx on the torus, 1 otherwise
};

struct State {
  double t = 0.0;
  std::uint64_t step = 0;
  std::size_t nx = 1;
  std::vector<double> F;  // cell-major, nx * N values
};

struct RunResult {
  std::uint64_t steps = 0;
  std::vector<DiagnosticsRecord> records;
};

class Solver {
 public:
  explicit Solver(const SimulationConfig& cfg);

  const SimulationConfig& config() const { return cfg_; }
  const MomentumGrid& grid() const { return grid_; }
  const CollisionOperator& collision() const { return op_; }
  const Diagnostics& diagnostics() const { return diag_; }
  std::size_t nodes() const { return grid_.size(); }

  State initial_state() const;

  // Frozen-coefficient exponential step on one cell: with lambda = R - tau G
  // from the current F, F+ = exp(-lambda dt) F + G (1 - exp(-lambda dt)) / lambda.
  void collision_substep(std::span<double> F, double dt) const;

  // F(x, p) <- F(x - p1/p0 dt, p) with periodic cubic Lagrange interpolation.
  void transport_substep(State& s, double dt) const;

  // One Strang step (T dt/2, C dt, T dt/2); the collision step alone when
  // homogeneous.
  void step(State& s, double dt) const;

  // Advances to t_end, calling sink with a record at t0, every output_every
  // steps and at the end. A non-finite value throws Error(Divergence) after
  // restoring s to the last good state.
  RunResult run(State& s, const std::function<void(const DiagnosticsRecord&)>& sink = {}) const;

  bool admissible(std::span<const double> F) const;

 private:
  SimulationConfig cfg_;
  MomentumGrid grid_;
  AngularQuadrature ang_;
  CollisionOperator op_;
  Diagnostics diag_;
};

const char* to_string(SpatialMode m);

}  // namespace rqbe
