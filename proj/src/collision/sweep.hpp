#pragma once

// Templated collision sweep. Included by exactly one translation unit per
// instruction set; S is one of the simd:: policy types.

#include <cmath>
#include <cstdint>

#include "collision/kernel.hpp"
#include "collision/simd.hpp"

namespace rqbe::detail {

template <class S>
struct Sweep {
  using D = typename S::D;
  using I = typename S::I;
  static constexpr int W = S::width;

  struct Eq {
    D m, w, u;  // u = 1 / (1 + tau m)
  };

  struct Sample {
    D wt;
    D px, py, pz, p0;  // p'
    D qx, qy, qz, q0;  // q'
  };

  static Eq eq_at(const SweepContext& cx, D x0) {
    const D x = S::fmadd(S::set1(cx.a), x0, S::set1(cx.c));
    const D h = simd::vexp<S>(S::mul(S::set1(-0.5), x));
    const D e = S::mul(h, h);
    const D u = S::sub(S::set1(1.0), S::mul(S::set1(cx.tau), e));
    const D inv = S::div(S::set1(1.0), u);
    return {S::mul(e, inv), S::mul(h, inv), u};
  }

  struct Corners {
    I base;
    D fx, fy, fz;
    D inside;  // 1 inside the box, 0 outside
  };

  static D axis(const SweepContext& cx, D x, D& frac) {
    D u = S::mul(S::add(x, S::set1(cx.pmax)), S::set1(cx.inv_h));
    u = S::max(S::set1(0.0), S::min(S::set1(cx.n - 1.0), u));
    // Snap to the node when rounding put u just off it, so nodes are exact.
    const D r = S::round(u);
    u = S::select(S::le(S::abs(S::sub(u, r)), S::set1(1e-11)), r, u);
    const D i0 = S::min(S::floor(u), S::set1(cx.n - 2.0));
    frac = S::sub(u, i0);
    return i0;
  }

  static Corners corners(const SweepContext& cx, D x, D y, D z) {
    Corners k;
    const D ix = axis(cx, x, k.fx), iy = axis(cx, y, k.fy), iz = axis(cx, z, k.fz);
    // Faces belong to the box; the slack keeps samples that land on a face
    // from flipping sides under rounding.
    const D lo = S::set1(-cx.pmax * (1.0 + 1e-12)), hi = S::set1(cx.pmax * (1.0 + 1e-12));
    const auto in = S::land(S::land(S::land(S::ge(x, lo), S::le(x, hi)),
                                    S::land(S::ge(y, lo), S::le(y, hi))),
                            S::land(S::ge(z, lo), S::le(z, hi)));
    k.inside = S::select(in, S::set1(1.0), S::set1(0.0));
    const int n = cx.n;
    k.base = S::iadd(S::imul(S::iadd(S::imul(S::to_int(ix), n), S::to_int(iy)), n),
                     S::to_int(iz));
    return k;
  }

  // Exact at both ends, so node values are reproduced.
  static D lerp(D a, D b, D t) { return S::fmadd(t, b, S::mul(S::sub(S::set1(1.0), t), a)); }

  static D trilinear(const SweepContext& cx, const double* v, const Corners& k) {
    const int n = cx.n, n2 = n * n;
    const I b = k.base;
    const D c000 = S::gather(v, b);
    const D c001 = S::gather(v, S::iadd(b, S::iset1(1)));
    const D c010 = S::gather(v, S::iadd(b, S::iset1(n)));
    const D c011 = S::gather(v, S::iadd(b, S::iset1(n + 1)));
    const D c100 = S::gather(v, S::iadd(b, S::iset1(n2)));
    const D c101 = S::gather(v, S::iadd(b, S::iset1(n2 + 1)));
    const D c110 = S::gather(v, S::iadd(b, S::iset1(n2 + n)));
    const D c111 = S::gather(v, S::iadd(b, S::iset1(n2 + n + 1)));
    const D c00 = lerp(c000, c001, k.fz), c01 = lerp(c010, c011, k.fz);
    const D c10 = lerp(c100, c101, k.fz), c11 = lerp(c110, c111, k.fz);
    const D c0 = lerp(c00, c01, k.fy), c1 = lerp(c10, c11, k.fy);
    return S::mul(lerp(c0, c1, k.fx), k.inside);
  }

  static D proj(const FieldView& f, D x, D y, D z, D x0, D u) {
    D r = S::fmadd(S::set1(f.proj[1]), x, S::set1(f.proj[0]));
    r = S::fmadd(S::set1(f.proj[2]), y, r);
    r = S::fmadd(S::set1(f.proj[3]), z, r);
    r = S::fmadd(S::set1(f.proj[4]), x0, r);
    return S::fmadd(S::set1(f.proj[5]), u, r);
  }

  static D clampv(const FieldView& f, D v) {
    if (!f.clamp) return v;
    return S::max(S::set1(f.lo), S::min(S::set1(f.hi), v));
  }

  // eq must be the equilibrium at the same point when the kind needs it.
  static D field(const SweepContext& cx, const FieldView& f, D x, D y, D z, D x0,
                 const Eq& eq) {
    switch (f.kind) {
      case FieldKind::Plain:
        return clampv(f, trilinear(cx, f.nodes, corners(cx, x, y, z)));
      case FieldKind::EqM:
        return eq.m;
      case FieldKind::EqW:
        return eq.w;
      case FieldKind::Perturbation: {
        const D psi =
            S::add(proj(f, x, y, z, x0, eq.u), trilinear(cx, f.nodes, corners(cx, x, y, z)));
        return S::mul(eq.w, psi);
      }
      case FieldKind::Weighted: {
        const D psi =
            S::add(proj(f, x, y, z, x0, eq.u), trilinear(cx, f.nodes, corners(cx, x, y, z)));
        return clampv(f, S::mul(S::mul(eq.w, eq.w), psi));
      }
    }
    return S::set1(0.0);
  }

  static bool needs_eq(const FieldView& f) { return f.kind != FieldKind::Plain; }

  // Visits every (q, omega) sample for the output momentum p. The combiner
  // sees begin(iq), sample(s) for each angular block and end(iq).
  template <class Comb>
  static void run(const SweepContext& cx, const double* p, Comb& comb) {
    run(cx, cx.full, p, comb);
  }

  template <class Comb>
  static void run(const SweepContext& cx, const AngularSet& ang, const double* p, Comb& comb) {
    const double px = p[0], py = p[1], pz = p[2];
    const double pp = px * px + py * py + pz * pz;
    const double p0 = std::sqrt(1.0 + pp);
    for (std::size_t iq = 0; iq < cx.nodes; ++iq) {
      const double qx = cx.qx[iq], qy = cx.qy[iq], qz = cx.qz[iq], q0 = cx.q0[iq];
      const double dx = px - qx, dy = py - qy, dz = pz - qz;
      const double de = (pp - (qx * qx + qy * qy + qz * qz)) / (p0 + q0);
      const double g2 = dx * dx + dy * dy + dz * dz - de * de;
      if (!(g2 > 0.0)) continue;
      const double g = std::sqrt(g2);
      const double rs = std::sqrt(g2 + 4.0);
      const double Px = px + qx, Py = py + qy, Pz = pz + qz, P0 = p0 + q0;
      const double cc = 1.0 / (rs * (P0 + rs));
      const double pair = g * rs / (2.0 * p0 * q0) * g * cx.dv;

      // Relative axis in the lab frame; angular nodes are measured from it.
      const double ig = 1.0 / g;
      const double ux = dx * ig, uy = dy * ig, uz = dz * ig;
      const double c0 = -(Px * ux + Py * uy + Pz * uz) / (P0 * (P0 + rs));
      double e3x = ux + c0 * Px, e3y = uy + c0 * Py, e3z = uz + c0 * Pz;
      const double in3 = 1.0 / std::sqrt(e3x * e3x + e3y * e3y + e3z * e3z);
      e3x *= in3;
      e3y *= in3;
      e3z *= in3;
      // e3z vanishes up to rounding on symmetric pairs; the tolerance keeps the
      // frame choice from depending on the last bit.
      const double sgn = e3z >= -1e-12 ? 1.0 : -1.0;
      const double ka = -1.0 / (sgn + e3z);
      const double kb = e3x * e3y * ka;
      const double e1x = 1.0 + sgn * e3x * e3x * ka, e1y = sgn * kb, e1z = -sgn * e3x;
      const double e2x = kb, e2y = sgn + e3y * e3y * ka, e2z = -e3y;

      const D vPx = S::set1(Px), vPy = S::set1(Py), vPz = S::set1(Pz);
      const D hPx = S::set1(0.5 * Px), hPy = S::set1(0.5 * Py), hPz = S::set1(0.5 * Pz);
      const D hP0 = S::set1(0.5 * P0), vP0 = S::set1(P0);
      const D hg = S::set1(0.5 * g), hgrs = S::set1(0.5 * g / rs), vc = S::set1(cc);
      const D vpair = S::set1(pair);

      comb.begin(iq);
      for (std::size_t t = 0; t < ang.count; t += W) {
        const D st = S::load(ang.sin_theta + t), ct = S::load(ang.cos_theta + t);
        const D a1 = S::mul(st, S::load(ang.cos_phi + t));
        const D a2 = S::mul(st, S::load(ang.sin_phi + t));
        const D wx = S::fmadd(a1, S::set1(e1x), S::fmadd(a2, S::set1(e2x), S::mul(ct, S::set1(e3x))));
        const D wy = S::fmadd(a1, S::set1(e1y), S::fmadd(a2, S::set1(e2y), S::mul(ct, S::set1(e3y))));
        const D wz = S::fmadd(a1, S::set1(e1z), S::fmadd(a2, S::set1(e2z), S::mul(ct, S::set1(e3z))));
        const D Pw = S::fmadd(vPx, wx, S::fmadd(vPy, wy, S::mul(vPz, wz)));
        const D k = S::mul(vc, Pw);
        Sample s;
        s.px = S::fmadd(hg, S::fmadd(k, vPx, wx), hPx);
        s.py = S::fmadd(hg, S::fmadd(k, vPy, wy), hPy);
        s.pz = S::fmadd(hg, S::fmadd(k, vPz, wz), hPz);
        s.p0 = S::fmadd(hgrs, Pw, hP0);
        s.qx = S::sub(vPx, s.px);
        s.qy = S::sub(vPy, s.py);
        s.qz = S::sub(vPz, s.pz);
        s.q0 = S::sub(vP0, s.p0);
        s.wt = S::mul(vpair, S::mul(S::load(ang.weight + t), st));
        comb.sample(s);
      }
      comb.end(iq);
    }
  }

  // ---------------------------------------------------------------- combiners

  struct GainLoss {
    const SweepContext& cx;
    const FieldView &A, &B;
    const double* C;
    D g = S::set1(0.0), r = S::set1(0.0);
    D cq = S::set1(0.0), nq = S::set1(0.0);
    void begin(std::size_t iq) {
      cq = S::set1(C[iq]);
      nq = S::set1(1.0 + cx.tau * C[iq]);
    }
    void sample(const Sample& s) {
      Eq ep{}, eq{};
      if (needs_eq(A)) ep = eq_at(cx, s.p0);
      if (needs_eq(B)) eq = eq_at(cx, s.q0);
      const D fa = field(cx, A, s.px, s.py, s.pz, s.p0, ep);
      const D fb = field(cx, B, s.qx, s.qy, s.qz, s.q0, eq);
      const D tau = S::set1(cx.tau), one = S::set1(1.0);
      g = S::fmadd(S::mul(s.wt, nq), S::mul(fa, fb), g);
      const D na = S::fmadd(tau, fa, one), nb = S::fmadd(tau, fb, one);
      r = S::fmadd(S::mul(s.wt, cq), S::mul(na, nb), r);
    }
    void end(std::size_t) {}
  };

  static void gain_loss(const SweepContext& cx, const double* p, const FieldView& A,
                        const FieldView& B, const double* C, bool symmetric, double* out) {
    GainLoss comb{cx, A, B, C};
    run(cx, symmetric ? cx.half : cx.full, p, comb);
    out[0] = S::hsum(comb.g);
    out[1] = S::hsum(comb.r);
  }

  struct K1 {
    const SweepContext& cx;
    const double* f;
    D acc = S::set1(0.0), pair = S::set1(0.0);
    void begin(std::size_t) { pair = S::set1(0.0); }
    void sample(const Sample& s) {
      const Eq a = eq_at(cx, s.p0), b = eq_at(cx, s.q0);
      pair = S::fmadd(s.wt, S::mul(a.w, b.w), pair);
    }
    void end(std::size_t iq) { acc = S::fmadd(pair, S::set1(f[iq]), acc); }
  };

  static double k1(const SweepContext& cx, const double* p, const double* f) {
    K1 comb{cx, f};
    run(cx, p, comb);
    return S::hsum(comb.acc);
  }

  struct K2 {
    const SweepContext& cx;
    const FieldView& f;
    D acc = S::set1(0.0);
    D wq = S::set1(0.0);
    void begin(std::size_t iq) { wq = S::set1(2.0 * cx.w_nodes[iq]); }
    void sample(const Sample& s) {
      const Eq a = eq_at(cx, s.p0), b = eq_at(cx, s.q0);
      const D fp = field(cx, f, s.px, s.py, s.pz, s.p0, a);
      acc = S::fmadd(S::mul(s.wt, wq), S::mul(b.w, fp), acc);
    }
    void end(std::size_t) {}
  };

  static double k2(const SweepContext& cx, const double* p, const FieldView& f) {
    K2 comb{cx, f};
    run(cx, p, comb);
    return S::hsum(comb.acc);
  }

  struct K2Two {
    const SweepContext& cx;
    const FieldView& f;
    D acc = S::set1(0.0);
    D mq = S::set1(0.0);
    void begin(std::size_t iq) { mq = S::set1(cx.m_nodes[iq]); }
    void sample(const Sample& s) {
      const Eq a = eq_at(cx, s.p0), b = eq_at(cx, s.q0);
      const D tau = S::set1(cx.tau), one = S::set1(1.0);
      const D na = S::fmadd(tau, a.m, one), nb = S::fmadd(tau, b.m, one);
      const D fp = field(cx, f, s.px, s.py, s.pz, s.p0, a);
      const D fq = field(cx, f, s.qx, s.qy, s.qz, s.q0, b);
      const D t1 = S::mul(S::div(na, a.w), S::mul(nb, fp));
      const D t2 = S::mul(S::div(nb, b.w), S::mul(na, fq));
      acc = S::fmadd(S::mul(s.wt, mq), S::add(t1, t2), acc);
    }
    void end(std::size_t) {}
  };

  static double k2_two_term(const SweepContext& cx, const double* p, const FieldView& f) {
    K2Two comb{cx, f};
    run(cx, p, comb);
    return S::hsum(comb.acc);
  }

  struct Gamma {
    const SweepContext& cx;
    const FieldView &f, &h;
    const double *fn, *hn;
    double mp, np, dfp;  // m(p), 1 + tau m(p), w(p) f(p)
    D acc[6] = {S::set1(0.0), S::set1(0.0), S::set1(0.0),
                S::set1(0.0), S::set1(0.0), S::set1(0.0)};
    D mq = S::set1(0.0), nq = S::set1(0.0), dfq = S::set1(0.0), dhq = S::set1(0.0);
    void begin(std::size_t iq) {
      const double m = cx.m_nodes[iq], w = cx.w_nodes[iq];
      mq = S::set1(m);
      nq = S::set1(1.0 + cx.tau * m);
      dfq = S::set1(w * fn[iq]);
      dhq = S::set1(w * hn[iq]);
    }
    void sample(const Sample& s) {
      const Eq a = eq_at(cx, s.p0), b = eq_at(cx, s.q0);
      const D tau = S::set1(cx.tau), one = S::set1(1.0);
      const D vmp = S::set1(mp), vnp = S::set1(np), vdfp = S::set1(dfp);
      const D na = S::fmadd(tau, a.m, one), nb = S::fmadd(tau, b.m, one);
      const D dfa = S::mul(a.w, field(cx, f, s.px, s.py, s.pz, s.p0, a));
      const D dha = S::mul(a.w, field(cx, h, s.px, s.py, s.pz, s.p0, a));
      const D dhb = S::mul(b.w, field(cx, h, s.qx, s.qy, s.qz, s.q0, b));
      const D wt = s.wt;
      const D twt = S::mul(tau, wt);
      const D c1 = S::sub(S::mul(a.m, b.m), S::mul(na, nb));
      acc[0] = S::fmadd(S::mul(wt, c1), S::mul(vdfp, dhq), acc[0]);
      const D c2 = S::sub(S::mul(b.m, nq), S::mul(mq, nb));
      acc[1] = S::fmadd(S::mul(twt, c2), S::mul(vdfp, dha), acc[1]);
      const D c3 = S::sub(S::mul(b.m, vnp), S::mul(vmp, nb));
      acc[2] = S::fmadd(S::mul(twt, c3), S::mul(dfq, dha), acc[2]);
      const D c4 = S::sub(S::mul(a.m, nq), S::mul(mq, na));
      acc[3] = S::fmadd(S::mul(twt, c4), S::mul(vdfp, dhb), acc[3]);
      const D c5 = S::sub(S::mul(a.m, vnp), S::mul(vmp, na));
      acc[4] = S::fmadd(S::mul(twt, c5), S::mul(dfq, dhb), acc[4]);
      const D c6 = S::sub(S::mul(vnp, nq), S::mul(vmp, mq));
      acc[5] = S::fmadd(S::mul(wt, c6), S::mul(dfa, dhb), acc[5]);
    }
    void end(std::size_t) {}
  };

  static void gamma(const SweepContext& cx, const double* p, double fp, const FieldView& f,
                    const FieldView& h, const double* fn, const double* hn, double* out) {
    const double p0 = std::sqrt(1.0 + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    const auto e = Sweep<simd::Scalar>::eq_at(cx, p0);
    Gamma comb{cx, f, h, fn, hn, e.m, 1.0 + cx.tau * e.m, e.w * fp};
    run(cx, p, comb);
    for (int i = 0; i < 6; ++i) out[i] = S::hsum(comb.acc[i]);
  }

  struct TTerms {
    const SweepContext& cx;
    const FieldView &h, &eta;
    const double *fn, *hn;
    D acc[4] = {S::set1(0.0), S::set1(0.0), S::set1(0.0), S::set1(0.0)};
    D dfq = S::set1(0.0), dhq = S::set1(0.0);
    void begin(std::size_t iq) {
      const double w = cx.w_nodes[iq];
      dfq = S::set1(w * fn[iq]);
      dhq = S::set1(w * hn[iq]);
    }
    void sample(const Sample& s) {
      const Eq a = eq_at(cx, s.p0), b = eq_at(cx, s.q0);
      const D dha = S::mul(a.w, field(cx, h, s.px, s.py, s.pz, s.p0, a));
      const D dea = S::mul(a.w, field(cx, eta, s.px, s.py, s.pz, s.p0, a));
      const D deb = S::mul(b.w, field(cx, eta, s.qx, s.qy, s.qz, s.q0, b));
      acc[0] = S::fmadd(S::mul(s.wt, dhq), dea, acc[0]);
      acc[1] = S::fmadd(S::mul(s.wt, dhq), deb, acc[1]);
      const D hb = S::mul(dha, deb);
      acc[2] = S::fmadd(s.wt, hb, acc[2]);
      acc[3] = S::fmadd(S::mul(s.wt, dfq), hb, acc[3]);
    }
    void end(std::size_t) {}
  };

  static void tterms(const SweepContext& cx, const double* p, double fp, const FieldView& h,
                     const FieldView& eta, const double* fn, const double* hn, double* out) {
    TTerms comb{cx, h, eta, fn, hn};
    run(cx, p, comb);
    const double tau = cx.tau;
    out[0] = -tau * fp * S::hsum(comb.acc[0]);
    out[1] = -tau * fp * S::hsum(comb.acc[1]);
    out[2] = tau * fp * S::hsum(comb.acc[2]);
    out[3] = tau * S::hsum(comb.acc[3]);
  }

  struct Row {
    const SweepContext& cx;
    double* row;
    D pair = S::set1(0.0), rm = S::set1(0.0);
    D wq = S::set1(0.0), mq = S::set1(0.0);
    D d[6] = {S::set1(0.0), S::set1(0.0), S::set1(0.0),
              S::set1(0.0), S::set1(0.0), S::set1(0.0)};
    void begin(std::size_t iq) {
      pair = S::set1(0.0);
      wq = S::set1(2.0 * cx.w_nodes[iq]);
      mq = S::set1(cx.m_nodes[iq]);
    }
    void sample(const Sample& s) {
      const Eq a = eq_at(cx, s.p0), b = eq_at(cx, s.q0);
      const D tau = S::set1(cx.tau), one = S::set1(1.0);
      pair = S::fmadd(s.wt, S::mul(a.w, b.w), pair);
      rm = S::fmadd(S::mul(s.wt, mq),
                    S::mul(S::fmadd(tau, a.m, one), S::fmadd(tau, b.m, one)), rm);
      // K2 with f(p') = w(p') [T psi + sum_l c_l (phi_l - T phi_l)](p'):
      // the node part is scattered here, the phi part is returned through d.
      const Corners k = corners(cx, s.px, s.py, s.pz);
      const D full = S::mul(S::mul(s.wt, wq), S::mul(b.w, a.w));
      const D out = S::sub(one, k.inside);
      d[0] = S::fmadd(full, out, d[0]);
      d[1] = S::fmadd(full, S::mul(out, s.px), d[1]);
      d[2] = S::fmadd(full, S::mul(out, s.py), d[2]);
      d[3] = S::fmadd(full, S::mul(out, s.pz), d[3]);
      d[4] = S::fmadd(full, S::sub(s.p0, trilinear(cx, cx.q0, k)), d[4]);
      d[5] = S::fmadd(full, S::sub(a.u, trilinear(cx, cx.u_nodes, k)), d[5]);
      const D coef = S::mul(full, k.inside);
      alignas(32) double cf[W], fx[W], fy[W], fz[W];
      alignas(32) std::int32_t base[W];
      S::store(cf, coef);
      S::store(fx, k.fx);
      S::store(fy, k.fy);
      S::store(fz, k.fz);
      S::store_int(base, k.base);
      const int n = cx.n, n2 = n * n;
      const double* wn = cx.w_nodes;
      for (int l = 0; l < W; ++l) {
        if (cf[l] == 0.0) continue;
        const std::size_t b0 = static_cast<std::size_t>(base[l]);
        const double x1 = fx[l], y1 = fy[l], z1 = fz[l];
        const double x0 = 1.0 - x1, y0 = 1.0 - y1, z0 = 1.0 - z1;
        const std::size_t idx[8] = {b0, b0 + 1, b0 + n, b0 + n + 1,
                                    b0 + n2, b0 + n2 + 1, b0 + n2 + n, b0 + n2 + n + 1};
        const double tw[8] = {x0 * y0 * z0, x0 * y0 * z1, x0 * y1 * z0, x0 * y1 * z1,
                              x1 * y0 * z0, x1 * y0 * z1, x1 * y1 * z0, x1 * y1 * z1};
        for (int j = 0; j < 8; ++j)
          if (tw[j] != 0.0) row[idx[j]] -= cf[l] * tw[j] / wn[idx[j]];
      }
    }
    void end(std::size_t iq) { row[iq] += S::hsum(pair); }
  };

  static double l_row(const SweepContext& cx, const double* p, double* row, double* d) {
    Row comb{cx, row};
    run(cx, p, comb);
    for (int l = 0; l < 6; ++l) d[l] = S::hsum(comb.d[l]);
    return S::hsum(comb.rm);
  }

  static void field_batch(const SweepContext& cx, const FieldView& f, std::size_t count,
                          const double* x, const double* y, const double* z, double* out) {
    std::size_t i = 0;
    for (; i + W <= count; i += W) {
      const D vx = S::load(x + i), vy = S::load(y + i), vz = S::load(z + i);
      const D v0 = S::sqrt(S::fmadd(vx, vx, S::fmadd(vy, vy, S::fmadd(vz, vz, S::set1(1.0)))));
      const Eq e = eq_at(cx, v0);
      S::store(out + i, field(cx, f, vx, vy, vz, v0, e));
    }
    for (; i < count; ++i) {
      using Sc = Sweep<simd::Scalar>;
      const double v0 = std::sqrt(1.0 + x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
      out[i] = Sc::field(cx, f, x[i], y[i], z[i], v0, Sc::eq_at(cx, v0));
    }
  }

  static KernelTable table(const char* name) {
    return {name, &gain_loss, &k1, &k2, &k2_two_term, &gamma, &tterms, &l_row, &field_batch};
  }
};

}  // namespace rqbe::detail
