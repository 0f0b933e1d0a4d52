#pragma once

// Internal interface between the collision front end and the per-ISA sweep
// kernels. Everything here is plain data so that the AVX2 translation unit
// does not need to see any library headers compiled with other flags.

#include <cstddef>
#include <cstdint>

namespace rqbe::detail {

struct AngularSet {
  std::size_t count = 0;  // padded to the vector width
  const double* cos_theta = nullptr;
  const double* sin_theta = nullptr;
  const double* cos_phi = nullptr;
  const double* sin_phi = nullptr;
  const double* weight = nullptr;
};

struct SweepContext {
  int n = 0;
  double pmax = 0.0, h = 0.0, inv_h = 0.0, dv = 0.0;
  std::size_t nodes = 0;
  const double* qx = nullptr;
  const double* qy = nullptr;
  const double* qz = nullptr;
  const double* q0 = nullptr;
  const double* m_nodes = nullptr;
  const double* w_nodes = nullptr;
  const double* u_nodes = nullptr;  // 1 / (1 + tau m)
  AngularSet full, half;
  double tau = -1.0, a = 1.0, c = 0.0;
};

enum class FieldKind : int {
  Plain,         // trilinear node values, zero outside the box
  Weighted,      // W (psi_P + T r), W = m + tau m^2
  Perturbation,  // w (psi_P + T r)
  EqM,           // m
  EqW,           // w
};

// Off-grid view of a field. For Weighted and Perturbation, nodes holds the
// residual r = psi - psi_P and proj the coefficients of
// psi_P(x) = proj[0] + proj[1..3] . x + proj[4] x0 + proj[5] u(x),
// u = 1 / (1 + tau m).
struct FieldView {
  FieldKind kind = FieldKind::Plain;
  const double* nodes = nullptr;
  double proj[6] = {0, 0, 0, 0, 0, 0};
  bool clamp = false;
  double lo = 0.0, hi = 0.0;
};

struct KernelTable {
  const char* name;
  // out[0] = sum wt A(p') B(q') (1 + tau C_q), out[1] = sum wt (1+tau A)(1+tau B) C_q.
  // With symmetric set, A and B must be the same field and only one node of
  // each antipodal pair is visited.
  void (*gain_loss)(const SweepContext&, const double* p, const FieldView& A,
                    const FieldView& B, const double* C, bool symmetric, double* out);
  // sum wt w(p') w(q') f_q
  double (*k1)(const SweepContext&, const double* p, const double* f);
  // 2 sum wt w_q w(q') f(p')
  double (*k2)(const SweepContext&, const double* p, const FieldView& f);
  // sum wt m_q [n(p')/w(p') n(q') f(p') + n(p') n(q')/w(q') f(q')]
  double (*k2_two_term)(const SweepContext&, const double* p, const FieldView& f);
  // Six second-order integrals without the 1/w(p) prefactor.
  void (*gamma)(const SweepContext&, const double* p, double fp, const FieldView& f,
                const FieldView& h, const double* fn, const double* hn, double* out);
  // Four third-order integrals; T4 without the 1/w(p) prefactor.
  void (*tterms)(const SweepContext&, const double* p, double fp, const FieldView& h,
                 const FieldView& eta, const double* fn, const double* hn, double* out);
  // Adds K1 minus the node part of K2 into row and returns
  // sum wt (1+tau m(p'))(1+tau m(q')) m_q. The split part of K2 is returned
  // as d: K2 f(p) = (node part) + sum_l d_l c_l(f / w).
  double (*l_row)(const SweepContext&, const double* p, double* row, double* d);
  // Evaluates a field at count points (used for testing the vector paths).
  void (*field_batch)(const SweepContext&, const FieldView& f, std::size_t count,
                      const double* x, const double* y, const double* z, double* out);
};

const KernelTable& scalar_kernels();
const KernelTable* avx2_kernels();  // nullptr when not compiled in
const KernelTable& active_kernels();

}  // namespace rqbe::detail
