#pragma once

#include <cstdint>
#include <span>

#include "rqbe/grid.hpp"
#include "rqbe/kinematics.hpp"

namespace rqbe {

enum class Statistics : std::int8_t { Boson = 1, Fermion = -1 };

inline double tau_of(Statistics s) { return s == Statistics::Boson ? 1.0 : -1.0; }
const char* to_string(Statistics s);

struct EquilibriumParams {
  double a = 1.0;
  double c = 0.0;
  Statistics stats = Statistics::Fermion;

  double tau() const { return tau_of(stats); }
  // Throws InvalidParams when a <= 0, or for bosons when c + a < 1e-10.
  void validate() const;
};

// Values of the equilibrium at one energy. w = sqrt(m + tau m^2).
struct EquilibriumPoint {
  double m;
  double w;
};

EquilibriumPoint equilibrium_at(const EquilibriumParams& params, double p0);

double equilibrium_m(const EquilibriumParams& params, const kinematics::FourMomentum& p);
double juttner_J(double a, double p0);
double sqrt_weight(const EquilibriumParams& params, const kinematics::FourMomentum& p);

// r1 = m / w and r2 = (1 + tau m) / w.
struct WeightIdentities {
  double r1, r2;
};
WeightIdentities weight_identities(const EquilibriumParams& params,
                                   const kinematics::FourMomentum& p);

// Constants of the sandwich C1 J <= m <= C2 J for fermions at a given c.
struct SandwichConstants {
  double c1, c2;
};
SandwichConstants fermion_sandwich(double c);

// Equilibrium tabulated on every node of a grid.
struct EquilibriumTable {
  std::vector<double> m, w;
};
EquilibriumTable tabulate(const EquilibriumParams& params, const MomentumGrid& grid);

// Finds (a, c) whose equilibrium has the discrete mass and energy of F0.
EquilibriumParams match_equilibrium_params(const MomentumGrid& grid,
                                           std::span<const double> F0,
                                           Statistics stats);

}  // namespace rqbe
