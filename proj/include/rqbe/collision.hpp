#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "rqbe/equilibrium.hpp"
#include "rqbe/grid.hpp"
#include "rqbe/projection.hpp"

namespace rqbe {

namespace detail {
struct SweepContext;
struct CollisionImpl;
}  // namespace detail

// How a distribution known on the nodes is evaluated at the off-grid
// post-collision momenta.
enum class OffgridMode {
  // Trilinear interpolation of F, zero outside the box.
  Plain,
  // F = W Pi(F / W) with W = m + tau m^2. Pi keeps the least-squares
  // component of its argument in span{1, p, p0, 1/(1 + tau m)} exactly and
  // interpolates the remainder trilinearly (zero outside the box). The map is
  // linear in F, reproduces m and every linearised equilibrium W (1, p, p0)
  // at all momenta, and extends F beyond the box along that span.
  Weighted,
};

// Moments sum Q (1, p, p0) h^3 and the same divided by a scale. From a
// distribution the scale is the gross flux sum (G (1 + tau F) + R F)(1 + p0) h^3,
// which stays meaningful at equilibrium; from Q alone it is sum |Q| (1 + p0) h^3.
struct InvariantResidual {
  std::array<double, 5> raw{};
  std::array<double, 5> relative{};
  double scale = 0.0;
};

struct GainLossField {
  std::vector<double> G, R;
};

class CollisionOperator {
 public:
  CollisionOperator(const MomentumGrid& grid, const AngularQuadrature& angular,
                    const EquilibriumParams& eq, OffgridMode mode = OffgridMode::Weighted,
                    bool clamp = true);

  const MomentumGrid& grid() const;
  const AngularQuadrature& angular() const;
  const EquilibriumParams& equilibrium() const;
  const EquilibriumTable& table() const;
  const MacroProjection& projection() const;
  OffgridMode mode() const;
  double tau() const;
  double upper_bound() const;  // 1 for fermions, +inf for bosons

  // Q(F1, F2, F3, F4) at one node.
  double evaluate_Q(std::span<const double> F1, std::span<const double> F2,
                    std::span<const double> F3, std::span<const double> F4,
                    std::size_t node) const;
  double evaluate_G(std::span<const double> F, std::size_t node) const;
  double evaluate_R(std::span<const double> F, std::size_t node) const;

  // G and R at every node; Q = G (1 + tau F) - R F.
  GainLossField gain_loss(std::span<const double> F) const;
  std::vector<double> apply_Q(std::span<const double> F) const;
  // Q at the requested nodes only.
  std::vector<double> apply_Q_at(std::span<const double> F,
                                 std::span<const std::size_t> nodes) const;
  // Gain and loss integrals at an arbitrary momentum.
  std::array<double, 2> gain_loss_at(std::span<const double> F, const Vec3& p) const;

  InvariantResidual invariants_residual(std::span<const double> F) const;
  InvariantResidual invariants_residual_of(std::span<const double> Q) const;

  // Removes the five moments of Q by a shift along W (1, p, p0).
  void conservation_fix(std::span<double> Q) const;

  double interpolate_offgrid(std::span<const double> F, const Vec3& p) const;

  const detail::SweepContext& context() const;
  const detail::CollisionImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const detail::CollisionImpl> impl_;
};

}  // namespace rqbe
