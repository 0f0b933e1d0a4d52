#pragma once

#include <limits>
#include <span>
#include <vector>

#include "collision/kernel.hpp"
#include "rqbe/collision.hpp"

namespace rqbe::detail {

struct CollisionImpl {
  CollisionImpl(const MomentumGrid& g, const AngularQuadrature& a, const EquilibriumParams& e,
                OffgridMode md, bool cl);

  MomentumGrid grid;
  AngularQuadrature ang;
  EquilibriumParams eq;
  OffgridMode mode;
  bool clamp;
  MacroProjection proj;
  std::vector<double> qx, qy, qz;
  SweepContext cx;

  // Basis of span{1, p1, p2, p3, p0, u} on the nodes, orthonormal in the
  // weighted product sum_j W_j a_j b_j; basis[k] = sum_l coef[k][l] phi_l.
  static constexpr int kSplit = 6;
  std::vector<double> basis[kSplit];
  double coef[kSplit][kSplit] = {};
  std::vector<double> weight;  // W on the nodes
  std::vector<double> u_nodes;
  // c_l(psi) = sum_i split_map[l][i] psi_i
  std::vector<double> split_map[kSplit];

  // psi_P coefficients in the phi basis; r receives psi - psi_P.
  void split(std::span<const double> psi, double out[kSplit], std::vector<double>& r) const;

  double upper() const {
    return eq.stats == Statistics::Fermion ? 1.0 : std::numeric_limits<double>::infinity();
  }
};

class PreparedField {
 public:
  PreparedField() = default;
  PreparedField(const PreparedField&) = delete;
  PreparedField& operator=(const PreparedField&) = delete;
  PreparedField(PreparedField&&) = default;
  PreparedField& operator=(PreparedField&&) = default;

  FieldView view() const {
    FieldView v = base;
    v.nodes = nodes.empty() ? nullptr : nodes.data();
    return v;
  }

  std::vector<double> nodes;
  FieldView base;
};

PreparedField prepare_distribution(const CollisionImpl& im, std::span<const double> F,
                                   OffgridMode mode, bool clamp);
PreparedField prepare_perturbation(const CollisionImpl& im, std::span<const double> f);
FieldView equilibrium_field(FieldKind kind);

}  // namespace rqbe::detail
