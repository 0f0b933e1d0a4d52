#include "rqbe/linearized.hpp"

#include <algorithm>
#include <cmath>

#include "collision/impl.hpp"
#include "linalg.hpp"
#include "rqbe/error.hpp"
#include "rqbe/parallel.hpp"

namespace rqbe {

using detail::active_kernels;
using detail::FieldKind;

namespace {

void check_size(const CollisionOperator& op, std::span<const double> f) {
  if (f.size() != op.grid().size())
    throw Error(ErrorKind::GridMismatch, "perturbation does not match the collision grid");
}

// Runs body(node, p, out_index) for all nodes in parallel.
template <class F>
void for_nodes(const detail::CollisionImpl& im, F&& body) {
  parallel_for(im.grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double p[3] = {im.qx[i], im.qy[i], im.qz[i]};
      body(i, p);
    }
  });
}

}  // namespace

double LinearOperatorMatrix::symmetry_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d = std::max(d, std::fabs(at(i, j) - at(j, i)));
  return scale > 0.0 ? d / scale : d;
}

LinearizedOperator::LinearizedOperator(const CollisionOperator& op) : op_(op) {
  const auto& im = op_.impl();
  const auto M = detail::equilibrium_field(FieldKind::EqM);
  const auto& kt = active_kernels();
  const auto& m = im.proj.table().m;
  nu_.resize(im.grid.size());
  for_nodes(im, [&](std::size_t i, const double* p) {
    double gl[2];
    kt.gain_loss(im.cx, p, M, M, m.data(), true, gl);
    nu_[i] = gl[1] / (1.0 + im.cx.tau * m[i]);
  });
}

double LinearizedOperator::nu_at(const Vec3& p) const {
  const auto& im = op_.impl();
  const auto M = detail::equilibrium_field(FieldKind::EqM);
  double gl[2];
  active_kernels().gain_loss(im.cx, p.data(), M, M, im.proj.table().m.data(), true, gl);
  const double m = equilibrium_at(im.eq, kinematics::energy(p)).m;
  return gl[1] / (1.0 + im.cx.tau * m);
}

std::vector<double> LinearizedOperator::apply_K1(std::span<const double> f) const {
  check_size(op_, f);
  const auto& im = op_.impl();
  const auto& kt = active_kernels();
  std::vector<double> out(f.size());
  for_nodes(im, [&](std::size_t i, const double* p) { out[i] = kt.k1(im.cx, p, f.data()); });
  return out;
}

std::vector<double> LinearizedOperator::apply_K2(std::span<const double> f) const {
  check_size(op_, f);
  const auto& im = op_.impl();
  const auto pf = detail::prepare_perturbation(im, f);
  const auto view = pf.view();
  const auto& kt = active_kernels();
  std::vector<double> out(f.size());
  for_nodes(im, [&](std::size_t i, const double* p) { out[i] = kt.k2(im.cx, p, view); });
  return out;
}

std::vector<double> LinearizedOperator::apply_K2_two_term(std::span<const double> f) const {
  check_size(op_, f);
  const auto& im = op_.impl();
  const auto pf = detail::prepare_perturbation(im, f);
  const auto view = pf.view();
  const auto& kt = active_kernels();
  const auto& tab = im.proj.table();
  std::vector<double> out(f.size());
  for_nodes(im, [&](std::size_t i, const double* p) {
    out[i] = kt.k2_two_term(im.cx, p, view) * tab.m[i] / tab.w[i];
  });
  return out;
}

std::vector<double> LinearizedOperator::apply_L(std::span<const double> f) const {
  const auto k1 = apply_K1(f);
  const auto k2 = apply_K2(f);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = nu_[i] * f[i] + k1[i] - k2[i];
  return out;
}

std::array<std::vector<double>, 6> LinearizedOperator::gamma_terms(
    std::span<const double> f, std::span<const double> h) const {
  check_size(op_, f);
  check_size(op_, h);
  const auto& im = op_.impl();
  const auto pf = detail::prepare_perturbation(im, f);
  const auto ph = detail::prepare_perturbation(im, h);
  const auto vf = pf.view(), vh = ph.view();
  const auto& kt = active_kernels();
  const auto& w = im.proj.table().w;
  std::array<std::vector<double>, 6> out;
  for (auto& v : out) v.resize(f.size());
  for_nodes(im, [&](std::size_t i, const double* p) {
    double g[6];
    kt.gamma(im.cx, p, f[i], vf, vh, f.data(), h.data(), g);
    for (int k = 0; k < 6; ++k) out[k][i] = g[k] / w[i];
  });
  return out;
}

std::array<std::vector<double>, 4> LinearizedOperator::t_terms(std::span<const double> f,
                                                               std::span<const double> h,
                                                               std::span<const double> eta) const {
  check_size(op_, f);
  check_size(op_, h);
  check_size(op_, eta);
  const auto& im = op_.impl();
  const auto ph = detail::prepare_perturbation(im, h);
  const auto pe = detail::prepare_perturbation(im, eta);
  const auto vh = ph.view(), ve = pe.view();
  const auto& kt = active_kernels();
  const auto& w = im.proj.table().w;
  std::array<std::vector<double>, 4> out;
  for (auto& v : out) v.resize(f.size());
  for_nodes(im, [&](std::size_t i, const double* p) {
    double t[4];
    kt.tterms(im.cx, p, f[i], vh, ve, f.data(), h.data(), t);
    for (int k = 0; k < 3; ++k) out[k][i] = t[k];
    out[3][i] = t[3] / w[i];
  });
  return out;
}

std::vector<double> LinearizedOperator::project_P(std::span<const double> f,
                                                  ProjectionCoefficients* coeffs) const {
  std::vector<double> out(f.size());
  const auto c = projection().apply(f, out);
  if (coeffs) *coeffs = c;
  return out;
}

LinearOperatorMatrix LinearizedOperator::assemble_L() const {
  const auto& im = op_.impl();
  const std::size_t N = im.grid.size();
  const auto& kt = active_kernels();
  const auto& tab = im.proj.table();

  LinearOperatorMatrix L;
  L.n = N;
  L.matrix.assign(N * N, 0.0);
  L.nu_diag = nu_;
  L.kernel_basis = projection().orthonormal_basis();

  // Split part of K2 folded into one row: sum_l d_l split_map[l][j] / w_j.
  for_nodes(im, [&](std::size_t i, const double* p) {
    double* row = L.matrix.data() + i * N;
    double d[detail::CollisionImpl::kSplit];
    kt.l_row(im.cx, p, row, d);
    row[i] += nu_[i];
    for (std::size_t j = 0; j < N; ++j) {
      double s = 0.0;
      for (int l = 0; l < detail::CollisionImpl::kSplit; ++l) s += d[l] * im.split_map[l][j];
      row[j] -= s / tab.w[j];
    }
  });

  double& scale = L.scale;
  for (double v : L.matrix) scale = std::max(scale, std::fabs(v));
  double asym = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      asym = std::max(asym, std::fabs(L.matrix[i * N + j] - L.matrix[j * N + i]));
  L.raw_asymmetry = asym / scale;

  const auto& B = L.kernel_basis;
  // LB: N x 5, BtL: 5 x N.
  std::vector<double> LB(N * 5, 0.0), BtL(5 * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double* row = L.matrix.data() + i * N;
    for (int k = 0; k < 5; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += row[j] * B[k][j];
      LB[i * 5 + k] = s;
    }
  }
  for (int k = 0; k < 5; ++k) {
    double kn = 0.0;
    for (std::size_t i = 0; i < N; ++i) kn += LB[i * 5 + k] * LB[i * 5 + k];
    L.raw_kernel = std::max(L.raw_kernel, std::sqrt(kn) / scale);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double* row = L.matrix.data() + i * N;
    for (int k = 0; k < 5; ++k) {
      const double b = B[k][i];
      double* out = BtL.data() + k * N;
      for (std::size_t j = 0; j < N; ++j) out[j] += b * row[j];
    }
  }
  for (int k = 0; k < 5; ++k) {
    double kn = 0.0;
    for (std::size_t j = 0; j < N; ++j) kn += BtL[k * N + j] * BtL[k * N + j];
    L.raw_conservation = std::max(L.raw_conservation, std::sqrt(kn) / scale);
  }

  // (I - P) L (I - P) = L - LB B^T - B BtL + B (B^T L B) B^T.
  double BLB[5][5];
  for (int k = 0; k < 5; ++k)
    for (int l = 0; l < 5; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < N; ++i) s += B[k][i] * LB[i * 5 + l];
      BLB[k][l] = s;
    }
  parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double* row = L.matrix.data() + i * N;
      double c[5];
      for (int l = 0; l < 5; ++l) {
        c[l] = 0.0;
        for (int k = 0; k < 5; ++k) c[l] += B[k][i] * BLB[k][l];
      }
      for (std::size_t j = 0; j < N; ++j) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k)
          s += LB[i * 5 + k] * B[k][j] + B[k][i] * BtL[k * N + j] - c[k] * B[k][j];
        row[j] -= s;
      }
    }
  });
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double s = 0.5 * (L.matrix[i * N + j] + L.matrix[j * N + i]);
      L.matrix[i * N + j] = s;
      L.matrix[j * N + i] = s;
    }
  return L;
}

namespace {

// Operator for the nu-weighted problem on the complement of the kernel:
// A = D^{-1/2} L D^{-1/2} compressed with Q = I - Phat, where Phat projects
// onto span D^{-1/2} B, plus shift * Phat to move the kernel out of the way.
struct Compressed {
  const LinearOperatorMatrix& L;
  std::vector<double> s;                    // D^{-1/2}
  std::array<std::vector<double>, 5> basis; // orthonormal D^{-1/2} B
  double shift = 0.0;
  mutable std::vector<double> tmp;

  explicit Compressed(const LinearOperatorMatrix& l) : L(l), s(l.n), tmp(l.n) {
    const std::size_t N = L.n;
    for (std::size_t i = 0; i < N; ++i) {
      if (!(L.nu_diag[i] > 0.0))
        throw Error(ErrorKind::Domain, "collision frequency must be positive");
      s[i] = 1.0 / std::sqrt(L.nu_diag[i]);
    }
    for (int k = 0; k < 5; ++k) {
      auto& e = basis[k];
      e.resize(N);
      for (std::size_t i = 0; i < N; ++i) e[i] = s[i] * L.kernel_basis[k][i];
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < k; ++j) {
          double d = 0.0;
          for (std::size_t i = 0; i < N; ++i) d += e[i] * basis[j][i];
          for (std::size_t i = 0; i < N; ++i) e[i] -= d * basis[j][i];
        }
      double nn = 0.0;
      for (double v : e) nn += v * v;
      nn = 1.0 / std::sqrt(nn);
      for (double& v : e) v *= nn;
    }
    // Diagonal of A bounds its spectrum from above in practice; the shift
    // only has to exceed the smallest eigenvalue on the complement.
    double dmax = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      dmax = std::max(dmax, L.matrix[i * N + i] * s[i] * s[i]);
    shift = 2.0 * dmax + 1.0;
  }

  void project_out(double* v, double* c) const {
    for (int k = 0; k < 5; ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < L.n; ++i) d += v[i] * basis[k][i];
      c[k] = d;
    }
    for (int k = 0; k < 5; ++k)
      for (std::size_t i = 0; i < L.n; ++i) v[i] -= c[k] * basis[k][i];
  }

  void apply(const double* x, double* y) const {
    const std::size_t N = L.n;
    double c[5];
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i];
    project_out(tmp.data(), c);
    for (std::size_t i = 0; i < N; ++i) tmp[i] *= s[i];
    linalg::matvec(L.matrix.data(), N, tmp.data(), y);
    for (std::size_t i = 0; i < N; ++i) y[i] *= s[i];
    double dummy[5];
    project_out(y, dummy);
    for (int k = 0; k < 5; ++k)
      for (std::size_t i = 0; i < N; ++i) y[i] += shift * c[k] * basis[k][i];
  }

  // Q A Q + shift Phat as a dense matrix, Q A Q = A - AU U^T - U (AU)^T + U (U^T A U) U^T.
  std::vector<double> dense() const {
    const std::size_t N = L.n;
    std::vector<double> A(N * N);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) A[i * N + j] = s[i] * L.matrix[i * N + j] * s[j];
    std::vector<double> AU(N * 5, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (int k = 0; k < 5; ++k) {
        double v = 0.0;
        for (std::size_t j = 0; j < N; ++j) v += A[i * N + j] * basis[k][j];
        AU[i * 5 + k] = v;
      }
    double UAU[5][5];
    for (int k = 0; k < 5; ++k)
      for (int l = 0; l < 5; ++l) {
        double v = 0.0;
        for (std::size_t i = 0; i < N; ++i) v += basis[k][i] * AU[i * 5 + l];
        UAU[k][l] = v;
      }
    for (std::size_t i = 0; i < N; ++i) {
      double c[5];
      for (int l = 0; l < 5; ++l) {
        c[l] = shift * basis[l][i];
        for (int k = 0; k < 5; ++k) c[l] += basis[k][i] * UAU[k][l];
      }
      for (std::size_t j = 0; j < N; ++j) {
        double v = 0.0;
        for (int k = 0; k < 5; ++k)
          v += -AU[i * 5 + k] * basis[k][j] - basis[k][i] * AU[j * 5 + k] + c[k] * basis[k][j];
        A[i * N + j] += v;
      }
    }
    return A;
  }
};

}  // namespace

CoercivityResult coercivity_delta(const LinearOperatorMatrix& L, EigenMethod method) {
  if (L.n < 6) throw Error(ErrorKind::InvalidParams, "operator too small for a coercivity bound");
  Compressed op(L);
  if (method == EigenMethod::Auto) method = L.n <= 4096 ? EigenMethod::Dense : EigenMethod::Lanczos;
  CoercivityResult r;
  if (method == EigenMethod::Dense) {
    const auto A = op.dense();
    const auto ev = linalg::symmetric_eigenvalues(A.data(), L.n, 1, 1);
    r.delta = ev.at(0);
    r.method = "dsyevr";
    return r;
  }
  const auto res = linalg::lanczos_smallest(
      [&](const double* x, double* y) { op.apply(x, y); }, L.n, 0x5eed, 1e-10, 600);
  if (!res.converged) throw Error(ErrorKind::EigenSolver, "Lanczos iteration did not converge");
  r.delta = res.value;
  r.method = "lanczos";
  r.iterations = res.iterations;
  r.residual = res.residual;
  return r;
}

std::vector<double> smallest_singular_values(const LinearOperatorMatrix& L, std::size_t k) {
  auto ev = linalg::symmetric_eigenvalues(L.matrix.data(), L.n);
  for (double& v : ev) v = std::fabs(v);
  std::sort(ev.begin(), ev.end());
  ev.resize(std::min(k, ev.size()));
  return ev;
}

}  // namespace rqbe
