#include "rqbe/grid.hpp"

#include <cmath>
#include <string>

#include "rqbe/error.hpp"

namespace rqbe {

MomentumGrid::MomentumGrid(double pmax, int n) : pmax_(pmax), n_(n) {
  if (!(pmax > 0.0) || !std::isfinite(pmax))
    throw Error(ErrorKind::InvalidParams, "pmax must be positive");
  if (n < 4 || n % 2 != 0)
    throw Error(ErrorKind::InvalidParams,
                "grid size must be even and at least 4, got " + std::to_string(n));
  h_ = 2.0 * pmax / (n - 1);
  p0_.resize(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = coord(i), y = coord(j), z = coord(k);
        p0_[index(i, j, k)] = std::sqrt(1.0 + x * x + y * y + z * z);
      }
}

void MomentumGrid::unindex(std::size_t idx, int& i, int& j, int& k) const {
  k = static_cast<int>(idx % n_);
  idx /= n_;
  j = static_cast<int>(idx % n_);
  i = static_cast<int>(idx / n_);
}

Vec3 MomentumGrid::node(std::size_t idx) const {
  int i, j, k;
  unindex(idx, i, j, k);
  return {coord(i), coord(j), coord(k)};
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    // One more derivative evaluation at the converged node.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

namespace {

void push_node(AngularQuadrature::Nodes& n, double ct, double st, double cp, double sp,
               double w) {
  n.cos_theta.push_back(ct);
  n.sin_theta.push_back(st);
  n.cos_phi.push_back(cp);
  n.sin_phi.push_back(sp);
  n.weight.push_back(w);
  ++n.count;
}

void pad(AngularQuadrature::Nodes& n) {
  while (n.weight.size() % AngularQuadrature::kPad != 0) {
    n.cos_theta.push_back(1.0);
    n.sin_theta.push_back(0.0);
    n.cos_phi.push_back(1.0);
    n.sin_phi.push_back(0.0);
    n.weight.push_back(0.0);
  }
}

}  // namespace

AngularQuadrature::AngularQuadrature(int ntheta, int nphi)
    : ntheta_(ntheta), nphi_(nphi) {
  if (ntheta < 1 || nphi < 2 || nphi % 2 != 0)
    throw Error(ErrorKind::InvalidParams,
                "angular quadrature needs ntheta >= 1 and even nphi >= 2");
  std::vector<double> x, w;
  gauss_legendre(ntheta, x, w);
  const double dphi = 2.0 * M_PI / nphi;
  for (int a = 0; a < ntheta; ++a)
    for (int b = 0; b < nphi; ++b) {
      const double ct = x[a], st = std::sqrt((1.0 - x[a]) * (1.0 + x[a]));
      const double cp = std::cos(b * dphi), sp = std::sin(b * dphi);
      const double wt = w[a] * dphi;
      push_node(full, ct, st, cp, sp, wt);
      // The antipode of (a, b) is (ntheta-1-a, b+nphi/2).
      const bool keep = 2 * a + 1 > ntheta || (2 * a + 1 == ntheta && 2 * b < nphi);
      if (keep) push_node(half, ct, st, cp, sp, 2.0 * wt);
    }
  pad(full);
  pad(half);
}

}  // namespace rqbe
