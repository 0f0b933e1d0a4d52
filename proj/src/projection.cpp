#include "rqbe/projection.hpp"

#include <cmath>

#include "rqbe/error.hpp"

namespace rqbe {

namespace {

using Mat5 = std::array<std::array<double, 5>, 5>;

std::array<double, 5> solve5(Mat5 a, std::array<double, 5> b) {
  for (int col = 0; col < 5; ++col) {
    int piv = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw Error(ErrorKind::Domain, "singular invariant Gram matrix");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 5; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int k = col; k < 5; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::array<double, 5> x{};
  for (int r = 4; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 5; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace

MacroProjection::MacroProjection(const MomentumGrid& grid, const EquilibriumParams& params)
    : grid_(grid), params_(params), table_(tabulate(params, grid)) {
  const double dv = grid.cell_volume();
  const double tau = params.tau();
  auto& L = lambdas_;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double W = table_.m[i] + tau * table_.m[i] * table_.m[i];
    const Vec3 p = grid.node(i);
    const double p0 = grid.p0(i);
    L.lambda += W;
    for (int k = 0; k < 3; ++k) L.lambda_i[k] += p[k] * p[k] * W;
    L.lambda0 += p0 * W;
    L.lambda00 += p0 * p0 * W;
  }
  L.lambda *= dv;
  L.lambda_i = dv * L.lambda_i;
  L.lambda0 *= dv;
  L.lambda00 *= dv;

  const std::size_t N = grid.size();
  for (int k = 0; k < 5; ++k) {
    auto& e = basis_[k];
    e.resize(N);
    for (std::size_t i = 0; i < N; ++i)
      e[i] = table_.w[i] * invariant(k, grid.node(i), grid.p0(i));
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) {
        double d = 0.0;
        for (std::size_t i = 0; i < N; ++i) d += e[i] * basis_[j][i];
        for (std::size_t i = 0; i < N; ++i) e[i] -= d * basis_[j][i];
      }
    double nn = 0.0;
    for (double v : e) nn += v * v;
    nn = 1.0 / std::sqrt(nn);
    for (double& v : e) v *= nn;
  }
}

ProjectionCoefficients MacroProjection::coefficients(std::span<const double> f) const {
  if (f.size() != grid_.size())
    throw Error(ErrorKind::GridMismatch, "projection input does not match grid");
  double s0 = 0.0, s4 = 0.0;
  Vec3 s{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fw = f[i] * table_.w[i];
    const Vec3 p = grid_.node(i);
    s0 += fw;
    s4 += fw * grid_.p0(i);
    for (int k = 0; k < 3; ++k) s[k] += fw * p[k];
  }
  const double dv = grid_.cell_volume();
  s0 *= dv;
  s4 *= dv;
  s = dv * s;
  ProjectionCoefficients out = lambdas_;
  const double r = out.lambda0 / out.lambda;
  out.C = (s4 - r * s0) / (out.lambda00 - out.lambda0 * r);
  out.A = s0 / out.lambda - r * out.C;
  for (int k = 0; k < 3; ++k) out.B[k] = s[k] / out.lambda_i[k];
  return out;
}

ProjectionCoefficients MacroProjection::apply(std::span<const double> f,
                                              std::span<double> out) const {
  const auto c = coefficients(f);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = table_.w[i] * (c.A + dot(c.B, grid_.node(i)) + c.C * grid_.p0(i));
  return c;
}

std::array<double, 5> invariant_moments(const MomentumGrid& grid, std::span<const double> v) {
  std::array<double, 5> m{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec3 p = grid.node(i);
    m[0] += v[i];
    m[1] += v[i] * p[0];
    m[2] += v[i] * p[1];
    m[3] += v[i] * p[2];
    m[4] += v[i] * grid.p0(i);
  }
  for (double& x : m) x *= grid.cell_volume();
  return m;
}

void moment_shift(const MacroProjection& proj, std::span<double> values,
                  const std::array<double, 5>& target) {
  const auto& grid = proj.grid();
  const auto& tab = proj.table();
  Mat5 G{};
  const auto cur = invariant_moments(grid, values);
  std::vector<double> W(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) W[i] = tab.w[i] * tab.w[i];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 p = grid.node(i);
    double b[5];
    for (int k = 0; k < 5; ++k) b[k] = MacroProjection::invariant(k, p, grid.p0(i));
    for (int k = 0; k < 5; ++k)
      for (int l = 0; l < 5; ++l) G[k][l] += W[i] * b[k] * b[l];
  }
  std::array<double, 5> rhs{};
  for (int k = 0; k < 5; ++k) {
    for (int l = 0; l < 5; ++l) G[k][l] *= grid.cell_volume();
    rhs[k] = target[k] - cur[k];
  }
  const auto alpha = solve5(G, rhs);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 p = grid.node(i);
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += alpha[k] * MacroProjection::invariant(k, p, grid.p0(i));
    values[i] += W[i] * s;
  }
}

}  // namespace rqbe
