#pragma once

#include <cstddef>
#include <vector>

#include "rqbe/vec3.hpp"

namespace rqbe {

// Uniform Cartesian lattice on [-pmax, pmax]^3 with n nodes per axis.
// Node (i,j,k) sits at -pmax + (i,j,k) h and has linear index (i n + j) n + k.
class MomentumGrid {
 public:
  MomentumGrid(double pmax, int n);

  double pmax() const { return pmax_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double cell_volume() const { return h_ * h_ * h_; }
  std::size_t size() const { return p0_.size(); }

  double coord(int i) const { return -pmax_ + h_ * i; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  void unindex(std::size_t idx, int& i, int& j, int& k) const;
  Vec3 node(std::size_t idx) const;
  double p0(std::size_t idx) const { return p0_[idx]; }
  const std::vector<double>& energies() const { return p0_; }

  bool operator==(const MomentumGrid& o) const {
    return pmax_ == o.pmax_ && n_ == o.n_;
  }

 private:
  double pmax_;
  int n_;
  double h_;
  std::vector<double> p0_;
};

// Product rule on S^2: Gauss-Legendre in cos(theta) times the periodic
// trapezoid in phi. Arrays are padded with zero-weight nodes up to a
// multiple of kPad so vector kernels never need a remainder loop.
class AngularQuadrature {
 public:
  static constexpr std::size_t kPad = 4;

  AngularQuadrature(int ntheta, int nphi);

  int ntheta() const { return ntheta_; }
  int nphi() const { return nphi_; }
  std::size_t size() const { return full.count; }
  std::size_t padded_size() const { return full.padded(); }

  struct Nodes {
    // Node t has direction sin_theta[t] (cos_phi[t], sin_phi[t]) + cos_theta[t] e3.
    std::vector<double> cos_theta, sin_theta, cos_phi, sin_phi, weight;
    std::size_t count = 0;
    std::size_t padded() const { return weight.size(); }
  };

  // All nodes.
  Nodes full;
  // One node of every antipodal pair with doubled weight; integrates
  // functions that are even under omega -> -omega exactly as full does.
  Nodes half;

 private:
  int ntheta_, nphi_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace rqbe
