#include "rqbe/collision.hpp"

#include <cmath>
#include <string>

#include "collision/impl.hpp"
#include "rqbe/error.hpp"
#include "rqbe/parallel.hpp"

namespace rqbe {

namespace detail {

CollisionImpl::CollisionImpl(const MomentumGrid& g, const AngularQuadrature& a,
                             const EquilibriumParams& e, OffgridMode md, bool cl)
    : grid(g), ang(a), eq(e), mode(md), clamp(cl), proj(g, e) {
  const std::size_t N = grid.size();
  qx.resize(N);
  qy.resize(N);
  qz.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 p = grid.node(i);
    qx[i] = p[0];
    qy[i] = p[1];
    qz[i] = p[2];
  }
  cx.n = grid.n();
  cx.pmax = grid.pmax();
  cx.h = grid.h();
  cx.inv_h = 1.0 / grid.h();
  cx.dv = grid.cell_volume();
  cx.nodes = N;
  cx.qx = qx.data();
  cx.qy = qy.data();
  cx.qz = qz.data();
  cx.q0 = grid.energies().data();
  cx.m_nodes = proj.table().m.data();
  cx.w_nodes = proj.table().w.data();
  auto set = [](const AngularQuadrature::Nodes& nd) {
    AngularSet s;
    s.count = nd.padded();
    s.cos_theta = nd.cos_theta.data();
    s.sin_theta = nd.sin_theta.data();
    s.cos_phi = nd.cos_phi.data();
    s.sin_phi = nd.sin_phi.data();
    s.weight = nd.weight.data();
    return s;
  };
  cx.full = set(ang.full);
  cx.half = set(ang.half);
  cx.tau = eq.tau();
  cx.a = eq.a;
  cx.c = eq.c;

  const auto& tab = proj.table();
  const double tau = eq.tau();
  weight.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    weight[i] = tab.m[i] * (1.0 + tau * tab.m[i]);
    if (!(weight[i] > 0.0))
      throw Error(ErrorKind::Domain, "equilibrium weight underflows on the grid");
  }
  std::vector<double> phi[kSplit];
  for (int k = 0; k < kSplit; ++k) phi[k].resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    phi[0][i] = 1.0;
    phi[1][i] = qx[i];
    phi[2][i] = qy[i];
    phi[3][i] = qz[i];
    phi[4][i] = grid.p0(i);
    phi[5][i] = 1.0 / (1.0 + tau * tab.m[i]);
  }
  u_nodes = phi[5];
  cx.u_nodes = u_nodes.data();
  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += weight[i] * x[i] * y[i];
    return s;
  };
  for (int k = 0; k < kSplit; ++k) {
    basis[k] = phi[k];
    coef[k][k] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < k; ++j) {
        const double d = dot(basis[k], basis[j]);
        for (std::size_t i = 0; i < N; ++i) basis[k][i] -= d * basis[j][i];
        for (int l = 0; l <= j; ++l) coef[k][l] -= d * coef[j][l];
      }
    }
    const double nn = std::sqrt(dot(basis[k], basis[k]));
    if (!(nn > 0.0)) throw Error(ErrorKind::DegenerateGeometry, "degenerate interpolation basis");
    for (std::size_t i = 0; i < N; ++i) basis[k][i] /= nn;
    for (int l = 0; l <= k; ++l) coef[k][l] /= nn;
  }
  for (int l = 0; l < kSplit; ++l) {
    split_map[l].assign(N, 0.0);
    for (int k = l; k < kSplit; ++k)
      for (std::size_t i = 0; i < N; ++i) split_map[l][i] += coef[k][l] * weight[i] * basis[k][i];
  }
}

void CollisionImpl::split(std::span<const double> psi, double out[kSplit],
                          std::vector<double>& r) const {
  const std::size_t N = psi.size();
  r.assign(psi.begin(), psi.end());
  for (int l = 0; l < kSplit; ++l) out[l] = 0.0;
  for (int k = 0; k < kSplit; ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i) d += weight[i] * psi[i] * basis[k][i];
    for (std::size_t i = 0; i < N; ++i) r[i] -= d * basis[k][i];
    for (int l = 0; l <= k; ++l) out[l] += d * coef[k][l];
  }
}

PreparedField prepare_distribution(const CollisionImpl& im, std::span<const double> F,
                                   OffgridMode mode, bool clamp) {
  if (F.size() != im.grid.size())
    throw Error(ErrorKind::GridMismatch, "distribution does not match the collision grid");
  PreparedField out;
  out.base.clamp = clamp;
  out.base.lo = 0.0;
  out.base.hi = im.upper();
  if (mode == OffgridMode::Plain) {
    out.base.kind = FieldKind::Plain;
    out.nodes.assign(F.begin(), F.end());
    return out;
  }
  out.base.kind = FieldKind::Weighted;
  std::vector<double> psi(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) psi[i] = F[i] / im.weight[i];
  im.split(psi, out.base.proj, out.nodes);
  return out;
}

PreparedField prepare_perturbation(const CollisionImpl& im, std::span<const double> f) {
  if (f.size() != im.grid.size())
    throw Error(ErrorKind::GridMismatch, "perturbation does not match the collision grid");
  PreparedField out;
  out.base.kind = FieldKind::Perturbation;
  const auto& tab = im.proj.table();
  std::vector<double> psi(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) psi[i] = f[i] / tab.w[i];
  im.split(psi, out.base.proj, out.nodes);
  return out;
}

FieldView equilibrium_field(FieldKind kind) {
  FieldView v;
  v.kind = kind;
  return v;
}

}  // namespace detail

using detail::active_kernels;

CollisionOperator::CollisionOperator(const MomentumGrid& grid, const AngularQuadrature& angular,
                                     const EquilibriumParams& eq, OffgridMode mode, bool clamp)
    : impl_(std::make_shared<detail::CollisionImpl>(grid, angular, eq, mode, clamp)) {
  eq.validate();
}

const MomentumGrid& CollisionOperator::grid() const { return impl_->grid; }
const AngularQuadrature& CollisionOperator::angular() const { return impl_->ang; }
const EquilibriumParams& CollisionOperator::equilibrium() const { return impl_->eq; }
const EquilibriumTable& CollisionOperator::table() const { return impl_->proj.table(); }
const MacroProjection& CollisionOperator::projection() const { return impl_->proj; }
OffgridMode CollisionOperator::mode() const { return impl_->mode; }
double CollisionOperator::tau() const { return impl_->eq.tau(); }
double CollisionOperator::upper_bound() const { return impl_->upper(); }
const detail::SweepContext& CollisionOperator::context() const { return impl_->cx; }

double CollisionOperator::evaluate_Q(std::span<const double> F1, std::span<const double> F2,
                                     std::span<const double> F3, std::span<const double> F4,
                                     std::size_t node) const {
  const auto& im = *impl_;
  if (F3.size() != im.grid.size() || F4.size() != im.grid.size())
    throw Error(ErrorKind::GridMismatch, "distribution does not match the collision grid");
  if (node >= im.grid.size()) throw Error(ErrorKind::GridMismatch, "node index out of range");
  const auto A = detail::prepare_distribution(im, F1, im.mode, im.clamp);
  const auto B = detail::prepare_distribution(im, F2, im.mode, im.clamp);
  const Vec3 p = im.grid.node(node);
  double gl[2];
  active_kernels().gain_loss(im.cx, p.data(), A.view(), B.view(), F4.data(), false, gl);
  const double f3 = F3[node];
  return gl[0] * (1.0 + im.cx.tau * f3) - gl[1] * f3;
}

std::array<double, 2> CollisionOperator::gain_loss_at(std::span<const double> F,
                                                      const Vec3& p) const {
  const auto& im = *impl_;
  const auto A = detail::prepare_distribution(im, F, im.mode, im.clamp);
  double gl[2];
  active_kernels().gain_loss(im.cx, p.data(), A.view(), A.view(), F.data(), true, gl);
  return {gl[0], gl[1]};
}

double CollisionOperator::evaluate_G(std::span<const double> F, std::size_t node) const {
  return gain_loss_at(F, impl_->grid.node(node))[0];
}

double CollisionOperator::evaluate_R(std::span<const double> F, std::size_t node) const {
  return gain_loss_at(F, impl_->grid.node(node))[1];
}

GainLossField CollisionOperator::gain_loss(std::span<const double> F) const {
  const auto& im = *impl_;
  const auto A = detail::prepare_distribution(im, F, im.mode, im.clamp);
  const auto view = A.view();
  const auto& kt = active_kernels();
  GainLossField out;
  out.G.resize(F.size());
  out.R.resize(F.size());
  parallel_for(F.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double p[3] = {im.qx[i], im.qy[i], im.qz[i]};
      double gl[2];
      kt.gain_loss(im.cx, p, view, view, F.data(), true, gl);
      out.G[i] = gl[0];
      out.R[i] = gl[1];
    }
  });
  return out;
}

std::vector<double> CollisionOperator::apply_Q(std::span<const double> F) const {
  const auto gr = gain_loss(F);
  std::vector<double> Q(F.size());
  const double tau = impl_->cx.tau;
  for (std::size_t i = 0; i < F.size(); ++i)
    Q[i] = gr.G[i] * (1.0 + tau * F[i]) - gr.R[i] * F[i];
  return Q;
}

std::vector<double> CollisionOperator::apply_Q_at(std::span<const double> F,
                                                  std::span<const std::size_t> nodes) const {
  const auto& im = *impl_;
  const auto A = detail::prepare_distribution(im, F, im.mode, im.clamp);
  const auto view = A.view();
  const auto& kt = active_kernels();
  std::vector<double> Q(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const std::size_t i = nodes[k];
      const double p[3] = {im.qx[i], im.qy[i], im.qz[i]};
      double gl[2];
      kt.gain_loss(im.cx, p, view, view, F.data(), true, gl);
      Q[k] = gl[0] * (1.0 + im.cx.tau * F[i]) - gl[1] * F[i];
    }
  });
  return Q;
}

InvariantResidual CollisionOperator::invariants_residual_of(std::span<const double> Q) const {
  const auto& g = impl_->grid;
  InvariantResidual r;
  r.raw = invariant_moments(g, Q);
  double scale = 0.0;
  for (std::size_t i = 0; i < Q.size(); ++i) scale += std::fabs(Q[i]) * (1.0 + g.p0(i));
  r.scale = scale * g.cell_volume();
  for (int k = 0; k < 5; ++k) r.relative[k] = r.scale > 0.0 ? r.raw[k] / r.scale : 0.0;
  return r;
}

InvariantResidual CollisionOperator::invariants_residual(std::span<const double> F) const {
  const auto& g = impl_->grid;
  const double tau = impl_->cx.tau;
  const auto gr = gain_loss(F);
  std::vector<double> Q(F.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double gain = gr.G[i] * (1.0 + tau * F[i]), loss = gr.R[i] * F[i];
    Q[i] = gain - loss;
    scale += (std::fabs(gain) + std::fabs(loss)) * (1.0 + g.p0(i));
  }
  InvariantResidual r;
  r.raw = invariant_moments(g, Q);
  r.scale = scale * g.cell_volume();
  for (int k = 0; k < 5; ++k) r.relative[k] = r.scale > 0.0 ? r.raw[k] / r.scale : 0.0;
  return r;
}

void CollisionOperator::conservation_fix(std::span<double> Q) const {
  moment_shift(impl_->proj, Q, {0.0, 0.0, 0.0, 0.0, 0.0});
}

double CollisionOperator::interpolate_offgrid(std::span<const double> F, const Vec3& p) const {
  const auto& im = *impl_;
  const auto A = detail::prepare_distribution(im, F, im.mode, im.clamp);
  double out;
  detail::scalar_kernels().field_batch(im.cx, A.view(), 1, &p[0], &p[1], &p[2], &out);
  return out;
}

}  // namespace rqbe
