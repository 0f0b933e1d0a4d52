#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rqbe/linearized.hpp"
#include "rqbe/parallel.hpp"
#include "test_util.hpp"

using namespace rqbe;

namespace {

const EquilibriumParams kFermion{1.0, 0.0, Statistics::Fermion};
const EquilibriumParams kBoson{1.0, 0.5, Statistics::Boson};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

// Smooth perturbation decaying like w, so F = m + w f stays meaningful.
std::vector<double> smooth_perturbation(const MomentumGrid& g, const EquilibriumTable& tab,
                                        unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 c{u(rng), u(rng), u(rng)};
  const double a = u(rng), b = u(rng);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 p = g.node(i);
    const Vec3 d = p - c;
    f[i] = tab.w[i] * (a * std::exp(-0.5 * dot(d, d)) + b * p[0] * p[1] * std::exp(-0.25 * dot(p, p)));
  }
  return f;
}

struct Setup {
  MomentumGrid grid;
  AngularQuadrature ang;
  CollisionOperator op;
  LinearizedOperator lin;
  Setup(const EquilibriumParams& eq, double pmax, int n, int nt, int np, bool clamp = true)
      : grid(pmax, n), ang(nt, np), op(grid, ang, eq, OffgridMode::Weighted, clamp), lin(op) {}
};

}  // namespace

TEST_CASE("collision frequency: positive and isotropic") {
  Setup s(kFermion, 6.0, 8, 6, 12);
  const auto& nu = s.lin.nu();
  for (double v : nu) CHECK(v > 0.0);
  // Nodes related by coordinate permutations and reflections share |p|.
  const int n = s.grid.n();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double a = nu[s.grid.index(i, j, k)];
        for (std::size_t o : {s.grid.index(j, k, i), s.grid.index(n - 1 - i, j, k),
                              s.grid.index(k, n - 1 - j, i)})
          worst = std::max(worst, std::fabs(nu[o] - a) / a);
      }
  MESSAGE("worst isotropy defect " << worst);
  CHECK(worst < 1e-6);
  // Off-grid evaluation agrees with the node values.
  for (std::size_t i : {std::size_t{0}, s.grid.index(3, 4, 5)})
    CHECK(s.lin.nu_at(s.grid.node(i)) == doctest::Approx(nu[i]).epsilon(1e-12));
}

TEST_CASE("K1, K2 and L vanish on zero and K2 forms agree") {
  for (const auto& eq : {kFermion, kBoson}) {
    CAPTURE(to_string(eq.stats));
    Setup s(eq, 6.0, 8, 4, 6);
    const std::vector<double> zero(s.grid.size(), 0.0);
    for (const auto& v : {s.lin.apply_K1(zero), s.lin.apply_K2(zero), s.lin.apply_L(zero),
                          s.lin.apply_K2_two_term(zero)})
      CHECK(max_abs(v) == 0.0);
    const auto f = smooth_perturbation(s.grid, s.op.table(), 1);
    const auto one = s.lin.apply_K2(f);
    const auto two = s.lin.apply_K2_two_term(f);
    double worst = 0.0;
    const double scale = max_abs(one);
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::fabs(one[i] - two[i]));
    CHECK(worst <= 1e-8 * scale);
  }
}

TEST_CASE("kernel: weighted collision invariants are annihilated") {
  for (const auto& eq : {kFermion, kBoson}) {
    CAPTURE(to_string(eq.stats));
    Setup s(eq, 6.0, 8, 4, 6);
    const auto& tab = s.op.table();
    double numax = max_abs(s.lin.nu());
    for (int k = 0; k < 5; ++k) {
      std::vector<double> f(s.grid.size());
      for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = tab.w[i] * MacroProjection::invariant(k, s.grid.node(i), s.grid.p0(i));
      const auto Lf = s.lin.apply_L(f);
      const double r = norm2(Lf) / norm2(f);
      CHECK(r <= 1e-6);
      CHECK(r <= 1e-11 * numax);
    }
  }
}

TEST_CASE("projection P: idempotent, self-adjoint, orthogonal residual") {
  Setup s(kFermion, 6.0, 8, 4, 6);
  const auto& g = s.grid;
  const auto& B = s.lin.projection().orthonormal_basis();
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto f = random_vec(g.size(), seed);
    const auto h = random_vec(g.size(), seed + 100);
    const auto Pf = s.lin.project_P(f);
    const auto PPf = s.lin.project_P(Pf);
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) d[i] = PPf[i] - Pf[i];
    CHECK(norm2(d) <= 1e-10 * norm2(Pf));
    for (std::size_t i = 0; i < f.size(); ++i) d[i] = f[i] - Pf[i];
    for (const auto& e : B) CHECK(std::fabs(inner(d, e)) <= 1e-10 * norm2(f));
    const auto Ph = s.lin.project_P(h);
    CHECK(inner(Pf, h) == doctest::Approx(inner(f, Ph)).epsilon(1e-10));
  }
  // Elements of the range are reproduced.
  std::vector<double> e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    e[i] = 0.3 * B[0][i] - 1.2 * B[2][i] + 0.7 * B[4][i];
  const auto Pe = s.lin.project_P(e);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(Pe[i] == doctest::Approx(e[i]).epsilon(1e-10).scale(1e-300));
  // Odd f: A = C = 0 and B_i is the weighted momentum moment over lambda_i.
  std::vector<double> odd(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 p = g.node(i);
    odd[i] = s.op.table().w[i] * (p[0] + 0.5 * p[2] * p[2] * p[2]) * std::exp(-0.1 * dot(p, p));
  }
  ProjectionCoefficients c;
  s.lin.project_P(odd, &c);
  const double scale = std::fabs(c.B[0]) + std::fabs(c.B[2]);
  CHECK(std::fabs(c.A) <= 1e-12 * scale);
  CHECK(std::fabs(c.C) <= 1e-12 * scale);
  for (int k = 0; k < 3; ++k) {
    double mom = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mom += odd[i] * s.op.table().w[i] * g.node(i)[k];
    mom *= g.cell_volume();
    CHECK(c.B[k] == doctest::Approx(mom / c.lambda_i[k]).epsilon(1e-12).scale(1e-300));
  }
  CHECK(c.lambda > 0.0);
  CHECK(c.lambda00 - c.lambda0 * c.lambda0 / c.lambda > 0.0);
}

TEST_CASE("nonlinear terms: zero input, symmetries, exact decomposition") {
  for (const auto& eq : {kFermion, kBoson}) {
    CAPTURE(to_string(eq.stats));
    Setup s(eq, 6.0, 8, 4, 6, false);
    const auto& tab = s.op.table();
    const std::vector<double> zero(s.grid.size(), 0.0);
    for (const auto& v : s.lin.gamma_terms(zero, zero)) CHECK(max_abs(v) == 0.0);
    for (const auto& v : s.lin.t_terms(zero, zero, zero)) CHECK(max_abs(v) == 0.0);

    const auto base = smooth_perturbation(s.grid, tab, 7);
    const auto h = smooth_perturbation(s.grid, tab, 8);
    const auto G = s.lin.gamma_terms(base, h);
    double gs = 0.0;
    for (const auto& v : G) gs = std::max(gs, max_abs(v));
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::fabs(G[1][i] - G[3][i]) <= 1e-8 * gs);
      CHECK(std::fabs(G[2][i] - G[4][i]) <= 1e-8 * gs);
    }
    const auto T = s.lin.t_terms(base, h, base);
    double ts = 0.0;
    for (const auto& v : T) ts = std::max(ts, max_abs(v));
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::fabs(T[0][i] - T[1][i]) <= 1e-8 * ts);

    for (double amp : {0.01, 0.1, 1.0}) {
      CAPTURE(amp);
      std::vector<double> f(base), F(base.size());
      for (auto& x : f) x *= amp;
      for (std::size_t i = 0; i < f.size(); ++i) F[i] = tab.m[i] + tab.w[i] * f[i];
      const auto Q = s.op.apply_Q(F);
      const auto Lf = s.lin.apply_L(f);
      const auto Ga = s.lin.gamma_terms(f, f);
      const auto Ta = s.lin.t_terms(f, f, f);
      double worst = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        double nl = 0.0;
        for (const auto& v : Ga) nl += v[i];
        for (const auto& v : Ta) nl += v[i];
        const double lhs = Q[i] / tab.w[i];
        worst = std::max(worst, std::fabs(lhs + Lf[i] - nl));
        scale = std::max(scale, std::fabs(lhs) + std::fabs(Lf[i]) + std::fabs(nl));
      }
      CHECK(worst <= 1e-8 * scale);
    }
  }
}

TEST_CASE("assembled L: symmetry, consistency with the matrix-free operator, spectrum") {
  Setup s(kFermion, 6.0, 8, 4, 6);
  const auto L = s.lin.assemble_L();
  const std::size_t N = L.n;
  MESSAGE("raw asymmetry " << L.raw_asymmetry << " kernel " << L.raw_kernel
                           << " conservation " << L.raw_conservation);
  CHECK(L.symmetry_defect() <= 1e-8);
  CHECK(L.raw_kernel <= 1e-10);
  for (std::size_t i = 0; i < N; ++i) CHECK(L.nu_diag[i] == s.lin.nu()[i]);

  // Kernel basis orthonormal.
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      CHECK(inner(L.kernel_basis[a], L.kernel_basis[b]) ==
            doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));

  auto complement = [&](std::vector<double> v) {
    for (const auto& e : L.kernel_basis) {
      const double d = inner(v, e);
      for (std::size_t i = 0; i < N; ++i) v[i] -= d * e[i];
    }
    return v;
  };
  auto matvec = [&](const std::vector<double>& v) {
    std::vector<double> y(N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) y[i] += L.at(i, j) * v[j];
    return y;
  };
  const auto f = complement(random_vec(N, 3));
  const auto g = complement(random_vec(N, 4));
  const double assembled = inner(matvec(f), g);
  const double free = 0.5 * (inner(s.lin.apply_L(f), g) + inner(f, s.lin.apply_L(g)));
  CHECK(assembled == doctest::Approx(free).epsilon(1e-10));

  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto v = random_vec(N, 1000 + t);
    CHECK(inner(matvec(v), v) >= 0.0);
  }
  // Symmetric product with random pairs.
  for (int t = 0; t < 5; ++t) {
    const auto a = random_vec(N, 2000 + t), b = random_vec(N, 3000 + t);
    CHECK(inner(matvec(a), b) == doctest::Approx(inner(a, matvec(b))).epsilon(1e-12));
  }

  const auto sv = smallest_singular_values(L, 8);
  int small = 0;
  for (double v : sv) small += v <= 1e-6 ? 1 : 0;
  MESSAGE("smallest singular values " << sv[4] << " " << sv[5] << " " << sv[6]);
  CHECK(small == 5);
  CHECK(sv[5] > 1e-3);

  const auto dense = coercivity_delta(L, EigenMethod::Dense);
  const auto lanczos = coercivity_delta(L, EigenMethod::Lanczos);
  MESSAGE("delta dense " << dense.delta << " lanczos " << lanczos.delta << " in "
                         << lanczos.iterations << " steps");
  CHECK(dense.delta > 0.0);
  CHECK(lanczos.delta == doctest::Approx(dense.delta).epsilon(1e-8));
  // Kernel vectors have zero Rayleigh quotient and are excluded.
  for (const auto& e : L.kernel_basis) {
    const auto Le = matvec(e);
    CHECK(std::fabs(inner(Le, e)) <= 1e-6);
  }
  // delta is a lower bound for the nu-weighted Rayleigh quotient on the complement.
  for (int t = 0; t < 20; ++t) {
    const auto v = complement(random_vec(N, 4000 + t));
    double nn = 0.0;
    for (std::size_t i = 0; i < N; ++i) nn += L.nu_diag[i] * v[i] * v[i];
    CHECK(inner(matvec(v), v) / nn >= dense.delta * (1.0 - 1e-10));
  }
}

TEST_CASE("assembly is independent of the thread count") {
  Setup s(kBoson, 5.0, 6, 4, 6);
  set_thread_count(1);
  const auto a = s.lin.assemble_L();
  set_thread_count(3);
  const auto b = s.lin.assemble_L();
  set_thread_count(1);
  CHECK(a.matrix == b.matrix);
}
