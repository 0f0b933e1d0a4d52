#pragma once

#include <array>
#include <span>
#include <vector>

#include "rqbe/equilibrium.hpp"
#include "rqbe/grid.hpp"

namespace rqbe {

// Normalisation constants of the weighted collision invariants, all grid sums
// with the cell volume: lambda = sum W, lambda_i = sum p_i^2 W,
// lambda0 = sum p0 W, lambda00 = sum p0^2 W, with W = m + tau m^2.
struct ProjectionCoefficients {
  double A = 0.0;
  Vec3 B{0.0, 0.0, 0.0};
  double C = 0.0;
  double lambda = 0.0;
  Vec3 lambda_i{0.0, 0.0, 0.0};
  double lambda0 = 0.0;
  double lambda00 = 0.0;
};

// Orthogonal projection of discrete L^2_p onto span{w, p_i w, p0 w}.
class MacroProjection {
 public:
  MacroProjection(const MomentumGrid& grid, const EquilibriumParams& params);

  const MomentumGrid& grid() const { return grid_; }
  const EquilibriumTable& table() const { return table_; }

  ProjectionCoefficients coefficients(std::span<const double> f) const;
  // out = Pf; out may alias f.
  ProjectionCoefficients apply(std::span<const double> f, std::span<double> out) const;

  // The five invariants times w, orthonormal for the plain Euclidean sum
  // (no cell volume).
  const std::array<std::vector<double>, 5>& orthonormal_basis() const { return basis_; }

  // Raw invariants b_k(p) in the order 1, p1, p2, p3, p0.
  static double invariant(int k, const Vec3& p, double p0) {
    return k == 0 ? 1.0 : (k == 4 ? p0 : p[k - 1]);
  }

 private:
  MomentumGrid grid_;
  EquilibriumParams params_;
  EquilibriumTable table_;
  ProjectionCoefficients lambdas_;
  std::array<std::vector<double>, 5> basis_;
};

// Shifts values by W (alpha . b) so that its moments against (1, p, p0)
// equal target; W = m + tau m^2 of the projection's equilibrium.
void moment_shift(const MacroProjection& proj, std::span<double> values,
                  const std::array<double, 5>& target);

// Grid moments sum v (1, p1, p2, p3, p0) h^3.
std::array<double, 5> invariant_moments(const MomentumGrid& grid, std::span<const double> v);

}  // namespace rqbe
