#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rqbe/diagnostics.hpp"
#include "rqbe/error.hpp"
#include "test_util.hpp"

using namespace rqbe;

namespace {

EquilibriumParams fermion(double a = 1.0, double c = 0.0) {
  EquilibriumParams eq;
  eq.stats = Statistics::Fermion;
  eq.a = a;
  eq.c = c;
  return eq;
}

EquilibriumParams boson(double a = 1.0, double c = 0.5) {
  EquilibriumParams eq;
  eq.stats = Statistics::Boson;
  eq.a = a;
  eq.c = c;
  return eq;
}

std::vector<double> sqrt_energy(const MomentumGrid& g) {
  std::vector<double> nu(g.size());
  for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = std::sqrt(g.p0(i));
  return nu;
}

// Entropy density written out directly, one statistics at a time.
long double entropy_density(long double F, Statistics s) {
  long double e = F > 0 ? F * std::log(F) : 0.0L;
  if (s == Statistics::Boson)
    e -= (1 + F) * std::log(1 + F);
  else if (F < 1)
    e += (1 - F) * std::log(1 - F);
  return e;
}

}  // namespace

TEST_CASE("moments of the equilibrium: parity and an exact summation oracle") {
  const MomentumGrid g(8.0, 32);
  const auto tab = tabulate(fermion(), g);
  const Moments m = moments(g, tab.m);
  CHECK(norm(m.momentum) <= 1e-12 * m.mass * g.pmax());

  long double mass = 0.0L, energy = 0.0L;
  for (int i = g.n() - 1; i >= 0; --i)
    for (int j = 0; j < g.n(); ++j)
      for (int k = 0; k < g.n(); ++k) {
        const long double p0 = std::sqrt(1.0L + static_cast<long double>(g.coord(i)) * g.coord(i) +
                                         static_cast<long double>(g.coord(j)) * g.coord(j) +
                                         static_cast<long double>(g.coord(k)) * g.coord(k));
        const long double v = 1.0L / (std::exp(p0) + 1.0L);
        mass += v;
        energy += v * p0;
      }
  const long double h3 = static_cast<long double>(g.cell_volume());
  CHECK(std::fabs(m.mass - static_cast<double>(mass * h3)) <= 1e-13 * m.mass);
  CHECK(std::fabs(m.energy - static_cast<double>(energy * h3)) <= 1e-13 * m.energy);

  // Radial oracle over all of R^3. The lattice on [-8, 8]^3 misses the tail
  // beyond the box, so agreement is limited to a few 1e-3.
  auto radial = [](double r) {
    return 4.0 * std::numbers::pi * r * r / (std::exp(std::sqrt(1.0 + r * r)) + 1.0);
  };
  const double oracle = testutil::adaptive_simpson(radial, 0.0, 60.0, 1e-14);
  const double rel = std::fabs(m.mass - oracle) / oracle;
  MESSAGE("lattice mass " << m.mass << " radial oracle " << oracle << " relative " << rel);
  CHECK(rel <= 1e-2);

  // Moments add over cells and scale with dx.
  std::vector<double> two(2 * g.size());
  std::copy(tab.m.begin(), tab.m.end(), two.begin());
  std::copy(tab.m.begin(), tab.m.end(), two.begin() + g.size());
  const Moments m2 = moments(g, two, 0.25);
  CHECK(m2.mass == doctest::Approx(0.5 * m.mass).epsilon(1e-12));
  CHECK(m2.energy == doctest::Approx(0.5 * m.energy).epsilon(1e-12));
  CHECK_THROWS_AS(moments(g, std::vector<double>(g.size() + 1)), Error);
}

TEST_CASE("moments of an odd field carry momentum along the shift") {
  const MomentumGrid g(5.0, 12);
  std::vector<double> F(g.size());
  double px = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const Vec3 p = g.node(i);
    F[i] = std::exp(-g.p0(i)) * (1.0 + 0.3 * p[0] / g.p0(i));
    px += F[i] * p[0];
  }
  const Moments m = moments(g, F);
  CHECK(m.momentum[0] == doctest::Approx(px * g.cell_volume()).epsilon(1e-14));
  CHECK(m.momentum[0] > 0.0);
  CHECK(std::fabs(m.momentum[1]) <= 1e-14 * m.mass);
  CHECK(std::fabs(m.momentum[2]) <= 1e-14 * m.mass);
}

TEST_CASE("H functional limits and direct formula") {
  const MomentumGrid g(4.0, 8);
  const std::vector<double> zero(g.size(), 0.0), one(g.size(), 1.0);
  CHECK(h_functional(g, zero, Statistics::Fermion) == 0.0);
  CHECK(h_functional(g, zero, Statistics::Boson) == 0.0);
  CHECK(h_functional(g, one, Statistics::Fermion) == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Statistics s : {Statistics::Fermion, Statistics::Boson}) {
    std::vector<double> F(g.size());
    for (auto& v : F) v = (s == Statistics::Boson ? 4.0 : 1.0) * u(rng);
    F[0] = 0.0;
    if (s == Statistics::Fermion) F[1] = 1.0;
    long double ref = 0.0L;
    for (double v : F) ref += entropy_density(v, s);
    ref *= g.cell_volume();
    CHECK(h_functional(g, F, s) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    CHECK(h_functional(g, F, s, 0.5) ==
          doctest::Approx(0.5 * static_cast<double>(ref)).epsilon(1e-13));
  }

  // A region at exactly 1 contributes nothing for fermions.
  std::vector<double> F(g.size(), 0.3);
  const double base = h_functional(g, F, Statistics::Fermion);
  std::fill(F.begin(), F.begin() + 100, 1.0);
  const double with_ones = h_functional(g, F, Statistics::Fermion);
  CHECK(with_ones == doctest::Approx(base * (g.size() - 100.0) / g.size()).epsilon(1e-13));
}

TEST_CASE("H functional is minimised by the equilibrium at fixed moments") {
  // Convexity: moving along a moment-preserving direction raises H.
  const MomentumGrid g(6.0, 12);
  const auto eq = fermion(1.0, -0.5);
  const auto tab = tabulate(eq, g);
  const double h0 = h_functional(g, tab.m, eq.stats);
  std::vector<double> F = tab.m;
  // Move mass between four nodes of equal energy whose momenta cancel in
  // pairs: mass, momentum and energy are unchanged.
  const std::size_t i = g.index(3, 5, 7), ii = g.index(8, 6, 4);
  const std::size_t j = g.index(7, 5, 3), jj = g.index(4, 6, 8);
  F[i] += 0.01;
  F[ii] += 0.01;
  F[j] -= 0.01;
  F[jj] -= 0.01;
  const Moments a = moments(g, tab.m), b = moments(g, F);
  CHECK(std::fabs(a.mass - b.mass) <= 1e-13 * a.mass);
  CHECK(std::fabs(a.energy - b.energy) <= 1e-13 * a.energy);
  CHECK(norm(a.momentum - b.momentum) <= 1e-13 * a.energy);
  CHECK(h_functional(g, F, eq.stats) > h0);
}

TEST_CASE("perturbation inverts the weighted map and norms behave") {
  const MomentumGrid g(5.0, 10);
  for (const auto& eq : {fermion(), boson()}) {
    const auto tab = tabulate(eq, g);
    const auto nu = sqrt_energy(g);
    const auto f0 = perturbation(tab.m, tab);
    const Norms n0 = norms(g, f0, nu);
    CHECK(n0.l2 == 0.0);
    CHECK(n0.nu_norm == 0.0);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    std::vector<double> gk(2 * g.size()), F(2 * g.size());
    for (std::size_t k = 0; k < gk.size(); ++k) {
      gk[k] = nd(rng);
      F[k] = tab.m[k % g.size()] + tab.w[k % g.size()] * gk[k];
    }
    const auto f = perturbation(F, tab);
    double worst = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
      worst = std::max(worst, std::fabs(f[k] - gk[k]) / (1.0 + std::fabs(gk[k])));
    CHECK(worst <= 1e-12);

    const double dx = 0.3;
    const Norms n = norms(g, gk, nu, dx);
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < gk.size(); ++k) {
      a += gk[k] * gk[k];
      b += nu[k % g.size()] * gk[k] * gk[k];
    }
    CHECK(n.l2 == doctest::Approx(std::sqrt(a * g.cell_volume() * dx)).epsilon(1e-13));
    CHECK(n.nu_norm == doctest::Approx(std::sqrt(b * g.cell_volume() * dx)).epsilon(1e-13));
    const double nu_min = *std::min_element(nu.begin(), nu.end());
    CHECK(n.nu_norm * n.nu_norm >= nu_min * n.l2 * n.l2 * (1.0 - 1e-14));
  }
  const auto tab = tabulate(fermion(), g);
  CHECK_THROWS_AS(perturbation(std::vector<double>(7), tab), Error);
  CHECK_THROWS_AS(norms(g, std::vector<double>(g.size()), std::vector<double>(3)), Error);
}

TEST_CASE("decay fit on synthetic exponentials") {
  std::vector<double> t, y;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.1 * k);
    y.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  const DecayFit fit = decay_rate_fit(t, y);
  CHECK(std::fabs(fit.epsilon - 0.7) <= 1e-10);
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(fit.samples == 91);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 0.01);
  std::vector<double> noisy(y);
  for (auto& v : noisy) v *= 1.0 + nd(rng);
  const DecayFit nf = decay_rate_fit(t, noisy);
  CHECK(std::fabs(nf.epsilon - 0.7) <= 0.05);
  CHECK(nf.r_squared > 0.99);

  // Invariance under time shift and scale, and amplitude scale.
  std::vector<double> ts(t), ys(y);
  for (auto& v : ts) v += 12.5;
  for (auto& v : ys) v *= 1e-6;
  CHECK(decay_rate_fit(ts, ys).epsilon == doctest::Approx(0.7).epsilon(1e-10));
  std::vector<double> tt(t);
  for (auto& v : tt) v *= 2.0;
  CHECK(decay_rate_fit(tt, y).epsilon == doctest::Approx(0.35).epsilon(1e-10));

  // Burn-in drops a transient.
  std::vector<double> yb(y);
  for (int k = 0; k < 10; ++k) yb[k] *= 5.0;
  CHECK(decay_rate_fit(t, yb, 0.1).epsilon == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(decay_rate_fit(t, yb, 0.0).epsilon != doctest::Approx(0.7).epsilon(1e-3));
}

TEST_CASE("decay fit errors") {
  std::vector<double> t(10), y(10, 1.0);
  for (int k = 0; k < 10; ++k) t[k] = k;
  CHECK_NOTHROW(decay_rate_fit(t, y, 0.0));
  try {
    decay_rate_fit(t, y, 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSamples);
  }
  y[5] = 0.0;
  try {
    decay_rate_fit(t, y, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonpositiveValue);
  }
  CHECK_THROWS_AS(decay_rate_fit(t, std::vector<double>(9, 1.0)), Error);
  CHECK_THROWS_AS(decay_rate_fit(t, y, 1.0), Error);
}

TEST_CASE("diagnostics record collects all fields") {
  const MomentumGrid g(5.0, 10);
  const auto eq = fermion();
  const auto tab = tabulate(eq, g);
  const auto nu = sqrt_energy(g);
  const Diagnostics d(g, eq, nu, 0.5);
  std::vector<double> F(3 * g.size());
  for (std::size_t k = 0; k < F.size(); ++k)
    F[k] = tab.m[k % g.size()] * (1.0 + 0.1 * std::sin(0.01 * k));
  const auto r = d.record(1.25, F);
  const Moments m = moments(g, F, 0.5);
  const Norms n = norms(g, perturbation(F, tab), nu, 0.5);
  CHECK(r.t == 1.25);
  CHECK(r.mass == m.mass);
  CHECK(r.energy == m.energy);
  CHECK(r.momentum[0] == m.momentum[0]);
  CHECK(r.H == h_functional(g, F, eq.stats, 0.5));
  CHECK(r.l2_f == n.l2);
  CHECK(r.nu_norm_f == n.nu_norm);
  CHECK(r.min_F == *std::min_element(F.begin(), F.end()));
  CHECK(r.max_F == *std::max_element(F.begin(), F.end()));
  CHECK(r.min_F >= 0.0);
  CHECK(r.max_F <= 1.0);
  CHECK_THROWS_AS(Diagnostics(g, eq, std::vector<double>(4), 1.0), Error);
}
