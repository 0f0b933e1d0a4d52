#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rqbe/equilibrium.hpp"
#include "rqbe/grid.hpp"

namespace rqbe {

// Phase-space arrays are cell-major: value (ix, ip) sits at ix * N + ip with
// N = grid.size(). dx is the spatial cell measure (1 for a homogeneous run).

struct Moments {
  double mass = 0.0;
  Vec3 momentum{0.0, 0.0, 0.0};
  double energy = 0.0;
};

Moments moments(const MomentumGrid& grid, std::span<const double> F, double dx = 1.0);

// sum [F ln F - (1 + tau F) ln(1 + tau F) / tau] h^3 dx, with 0 ln 0 = 0.
double h_functional(const MomentumGrid& grid, std::span<const double> F, Statistics stats,
                    double dx = 1.0);

// f = (F - m) / w cell by cell.
std::vector<double> perturbation(std::span<const double> F, const EquilibriumTable& eq);

struct Norms {
  double l2 = 0.0;
  double nu_norm = 0.0;
};

// Discrete L^2_{x,p} norm and the nu-weighted norm sqrt(sum nu f^2 h^3 dx).
Norms norms(const MomentumGrid& grid, std::span<const double> f, std::span<const double> nu,
            double dx = 1.0);

struct DecayFit {
  double epsilon = 0.0;  // minus the slope of ln(y) against t
  double r_squared = 0.0;
  double intercept = 0.0;
  std::size_t samples = 0;
};

// Least-squares fit of ln(y) against t after dropping the first
// burn_in * size samples. Needs at least 10 samples after the burn-in, all
// positive.
DecayFit decay_rate_fit(std::span<const double> t, std::span<const double> y,
                        double burn_in = 0.1);

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  Vec3 momentum{0.0, 0.0, 0.0};
  double energy = 0.0;
  double H = 0.0;
  double l2_f = 0.0;
  double nu_norm_f = 0.0;
  double min_F = 0.0;
  double max_F = 0.0;
};

// Everything needed to turn a phase-space array into a record.
class Diagnostics {
 public:
  Diagnostics(const MomentumGrid& grid, const EquilibriumParams& eq, std::vector<double> nu,
              double dx);

  DiagnosticsRecord record(double t, std::span<const double> F) const;

  const MomentumGrid& grid() const { return grid_; }
  const EquilibriumTable& table() const { return table_; }
  const std::vector<double>& nu() const { return nu_; }
  double dx() const { return dx_; }

 private:
  MomentumGrid grid_;
  EquilibriumParams eq_;
  EquilibriumTable table_;
  std::vector<double> nu_;
  double dx_;
};

}  // namespace rqbe
