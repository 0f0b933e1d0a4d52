#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "rqbe/error.hpp"
#include "rqbe/reduced_oracle.hpp"
#include "test_util.hpp"

using namespace rqbe;
using namespace rqbe::reduced;
namespace kin = rqbe::kinematics;

namespace {

// Adaptive 61-point Gauss-Kronrod of the defining integral.
double i0_defining(double y) {
  auto f = [y](double phi) { return std::exp(y * (std::cos(phi) - 1.0)); };
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numbers::pi, 20, 1e-15);
  return std::exp(y) * v / std::numbers::pi;
}

// The defining y-integrals of the closed forms, with bessel_I0 inside.
std::array<double, 2> y_integrals(double R, double r) {
  boost::math::quadrature::exp_sinh<double> ig;
  auto fI = [&](double y) {
    const double t = std::sqrt(y * y + 1.0);
    return y / t * std::exp(r * y - R * t) * bessel_I0_scaled(r * y);
  };
  auto fII = [&](double y) {
    const double t = std::sqrt(y * y + 1.0);
    return y * std::exp(r * y - R * t) * bessel_I0_scaled(r * y);
  };
  return {ig.integrate(fI, 0.0, std::numeric_limits<double>::infinity(), 1e-13),
          ig.integrate(fII, 0.0, std::numeric_limits<double>::infinity(), 1e-13)};
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)); }

std::array<std::array<double, 3>, 3> random_rotation(std::mt19937_64& rng) {
  const Vec3 a = testutil::random_unit(rng);
  Vec3 b = testutil::random_unit(rng);
  b = b - dot(a, b) * a;
  b = (1.0 / norm(b)) * b;
  const Vec3 c = cross(a, b);
  return {{{a[0], a[1], a[2]}, {b[0], b[1], b[2]}, {c[0], c[1], c[2]}}};
}

Vec3 rotate(const std::array<std::array<double, 3>, 3>& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

}  // namespace

TEST_CASE("bessel I0 against the defining integral") {
  CHECK(bessel_I0(0.0) == 1.0);
  for (double y : {0.5, 2.0, 10.0, 30.0}) {
    CAPTURE(y);
    CHECK(rel(bessel_I0(y), i0_defining(y)) <= 1e-12);
  }
  double prev = 0.0;
  for (double y = 0.0; y <= 60.0; y += 0.173) {
    const double v = bessel_I0(y);
    CHECK(v > prev);
    CHECK(rel(v, boost::math::cyl_bessel_i(0, y)) <= 1e-12);
    CHECK(rel(bessel_I0_scaled(y), std::exp(-y) * v) <= 1e-13);
    prev = v;
  }
  CHECK(bessel_I0_scaled(1e6) == doctest::Approx(1.0 / std::sqrt(2e6 * std::numbers::pi)).epsilon(1e-6));
  CHECK_THROWS_AS(bessel_I0(-1.0), Error);
}

TEST_CASE("closed forms of the Bessel integrals") {
  for (double R : {1.1, 2.0, 7.5}) {
    CHECK(closed_form_I(R, 0.0) == doctest::Approx(std::exp(-R) / R).epsilon(1e-15));
    CHECK(closed_form_II(R, 0.0) ==
          doctest::Approx(std::exp(-R) * (1.0 + 1.0 / R) / R).epsilon(1e-15));
  }
  for (auto [R, r] : {std::pair{3.0, 1.0}, {5.0, 4.0}, {2.0, 1.9}}) {
    CAPTURE(R);
    CAPTURE(r);
    const auto q = y_integrals(R, r);
    CHECK(rel(closed_form_I(R, r), q[0]) <= 1e-8);
    CHECK(rel(closed_form_II(R, r), q[1]) <= 1e-8);
  }
  double worst = 0.0;
  for (double R = 1.1; R <= 20.0; R *= 1.35)
    for (double f = 0.0; f <= 0.95 + 1e-12; f += 0.19) {
      const double r = f * R;
      const auto q = y_integrals(R, r);
      worst = std::max({worst, rel(closed_form_I(R, r), q[0]), rel(closed_form_II(R, r), q[1])});
    }
  MESSAGE("worst closed-form deviation on the lattice " << worst);
  CHECK(worst <= 1e-8);
  CHECK_THROWS_AS(closed_form_I(1.0, 1.0), Error);
  CHECK_THROWS_AS(closed_form_II(1.0, 2.0), Error);
}

TEST_CASE("reduced geometry invariants and estimates") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 2000; ++t) {
    const kin::FourMomentum p(testutil::random_momentum(rng, 10.0));
    const kin::FourMomentum pp(testutil::random_momentum(rng, 10.0));
    const auto g = ReducedGeometry::make(p, pp);
    CHECK(std::fabs(g.sbar - (g.gbar * g.gbar + 4.0)) <= 1e-12 * g.sbar);
    CHECK(g.R > g.r);
    CHECK(g.r >= 0.0);
    const double D = (g.R - g.r) * (g.R + g.r);
    CHECK(std::fabs(D - g.D) <= 1e-10 * g.R * g.R);
    const Vec3 d = p.p - pp.p;
    CHECK(g.D >= std::max(0.25 * g.gbar * g.gbar + 1.0, 0.25 * dot(d, d)) * (1.0 - 1e-12));
    CHECK(std::sqrt(g.D) >= 1.0 - 1e-12);
    CHECK(1.0 / g.D <= 4.0 / g.sbar * (1.0 + 1e-12));
    const double absorbed = std::exp(-0.5 * (pp.p0 - p.p0)) * std::exp(-std::sqrt(g.D));
    CHECK(absorbed <= std::exp(-0.5 * (pp.p0 - p.p0) - 0.5 * norm(d)) * (1.0 + 1e-12));
    CHECK(absorbed <= 1.0);
    CHECK(std::fabs(pp.p0 - p.p0) <= norm(d) * (1.0 + 1e-12));
  }
  const kin::FourMomentum p({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(ReducedGeometry::make(p, p), Error);
  CHECK_THROWS_AS(reduced_B(p, p), Error);
  CHECK_THROWS_AS(B_upper(p, p), Error);
}

TEST_CASE("reduced B quadrature: bounded kernel reproduces the closed-form chain") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (double a : {1.0, 0.5, 2.0})
    for (int t = 0; t < 40; ++t) {
      const kin::FourMomentum p(testutil::random_momentum(rng, 10.0));
      const kin::FourMomentum pp(testutil::random_momentum(rng, 10.0));
      const double q = reduced_B(p, pp, a, HalfAngle::Bounded);
      worst = std::max(worst, rel(q, B_upper(p, pp, a).chain));
    }
  MESSAGE("worst quadrature vs closed form " << worst);
  CHECK(worst <= 1e-10);
}

TEST_CASE("reduced B is bounded by the chain and the simplified bound") {
  std::mt19937_64 rng(11);
  int checked = 0;
  double max_ratio = 0.0;
  for (int t = 0; t < 500; ++t) {
    const kin::FourMomentum p(testutil::random_momentum(rng, 10.0));
    const kin::FourMomentum pp(testutil::random_momentum(rng, 10.0));
    const double b = reduced_B(p, pp);
    const auto up = B_upper(p, pp);
    CHECK(std::isfinite(b));
    CHECK(b > 0.0);
    CHECK(b <= up.chain * (1.0 + 1e-10));
    CHECK(up.chain <= up.simplified * (1.0 + 1e-12));
    max_ratio = std::max(max_ratio, b / up.chain);
    ++checked;
  }
  CHECK(checked == 500);
  CHECK(max_ratio < 1.0);
  CHECK(simplified_bound_constant(1.0) == doctest::Approx(3.0 * std::numbers::pi));
  for (double a : {0.3, 0.7, 2.5}) {
    for (int t = 0; t < 20; ++t) {
      const kin::FourMomentum p(testutil::random_momentum(rng, 6.0));
      const kin::FourMomentum pp(testutil::random_momentum(rng, 6.0));
      const auto up = B_upper(p, pp, a);
      CHECK(reduced_B(p, pp, a) <= up.chain * (1.0 + 1e-10));
      CHECK(up.chain <= up.simplified * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("reduced B: the bound is approached as gbar shrinks") {
  const kin::FourMomentum p({0.4, -1.2, 2.0});
  double prev = 0.0;
  for (double eps : {1.0, 0.3, 0.1, 0.03, 0.01}) {
    const kin::FourMomentum pp(p.p + Vec3{eps, 0.5 * eps, -0.2 * eps});
    const double ratio = reduced_B(p, pp) / B_upper(p, pp).chain;
    CAPTURE(eps);
    CHECK(ratio > prev);
    CHECK(ratio < 1.0);
    prev = ratio;
  }
  CHECK(prev > 0.99);
}

TEST_CASE("reduced B is rotation invariant") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Vec3 a = testutil::random_momentum(rng, 8.0), b = testutil::random_momentum(rng, 8.0);
    const auto m = random_rotation(rng);
    const double b0 = reduced_B(kin::FourMomentum(a), kin::FourMomentum(b));
    const double b1 = reduced_B(kin::FourMomentum(rotate(m, a)), kin::FourMomentum(rotate(m, b)));
    CHECK(rel(b0, b1) <= 1e-9);
  }
}

TEST_CASE("on-shell identity suite over random quadruples") {
  std::mt19937_64 rng(2024);
  int failures = 0, skipped = 0;
  for (int t = 0; t < 10000; ++t) {
    const kin::FourMomentum p(testutil::random_momentum(rng, 10.0));
    const kin::FourMomentum q(testutil::random_momentum(rng, 10.0));
    const auto quad =
        kin::com_post_momenta(p, q, kin::CollisionGeometry::from_unit(testutil::random_unit(rng)));
    const auto rep = on_shell_identity_suite(quad);
    failures += rep.failures();
    skipped += rep.skipped();
    if (rep.failures() > 0)
      for (const auto& c : rep.checks)
        if (!c.passed) MESSAGE(c.name << " error " << c.error);
  }
  CHECK(failures == 0);
  CHECK(skipped == 0);
}

TEST_CASE("on-shell identity suite: forward scattering degenerates gracefully") {
  const kin::FourMomentum p({0.3, 1.1, -0.7}), q({-2.0, 0.4, 0.9});
  const Vec3 axis = kin::relative_axis(p, q);
  const auto quad = kin::com_post_momenta(p, q, kin::CollisionGeometry::from_unit(axis));
  CHECK(kin::g_squared(quad.p, quad.p_prime) <= 1e-24);
  const auto rep = on_shell_identity_suite(quad);
  CHECK(rep.failures() == 0);
  CHECK(rep.skipped() == 6);
  for (const auto& c : rep.checks)
    if (c.name.rfind("boost", 0) == 0) CHECK(c.skipped);
  // Round trip is exact to 1e-12.
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name.rfind("round trip", 0) == 0) {
      found = true;
      CHECK(c.error <= 1e-12);
    }
  CHECK(found);
}
