#include "rqbe/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rqbe/error.hpp"

namespace rqbe {

namespace {

constexpr double kUnderflowExponent = 700.0;
constexpr double kBosonMargin = 1e-10;

struct Moments2 {
  double mass, energy;
};

Moments2 eq_moments(const MomentumGrid& grid, double a, double c, Statistics stats) {
  const EquilibriumParams prm{a, c, stats};
  double mass = 0.0, energy = 0.0;
  const auto& e = grid.energies();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double m = equilibrium_at(prm, e[i]).m;
    mass += m;
    energy += m * e[i];
  }
  const double dv = grid.cell_volume();
  return {mass * dv, energy * dv};
}

bool admissible(double a, double c, Statistics stats) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(c)) return false;
  return stats == Statistics::Fermion || c + a >= kBosonMargin;
}

// Solves mass(a, c) = target for c at fixed a; mass is decreasing in c.
double solve_c(const MomentumGrid& grid, double a, double target, Statistics stats) {
  double lo = stats == Statistics::Boson ? -a + kBosonMargin : -1.0;
  double hi = 1.0;
  if (stats == Statistics::Fermion)
    while (eq_moments(grid, a, lo, stats).mass < target && lo > -1e4) lo = 2.0 * lo - 1.0;
  while (eq_moments(grid, a, hi, stats).mass > target && hi < 1e4) hi = 2.0 * hi + 1.0;
  if (eq_moments(grid, a, lo, stats).mass < target) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eq_moments(grid, a, mid, stats).mass > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(Statistics s) {
  return s == Statistics::Boson ? "boson" : "fermion";
}

void EquilibriumParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a))
    throw Error(ErrorKind::InvalidParams, "equilibrium requires a > 0");
  if (!std::isfinite(c)) throw Error(ErrorKind::InvalidParams, "equilibrium c must be finite");
  if (stats == Statistics::Boson && c + a < kBosonMargin)
    throw Error(ErrorKind::InvalidParams,
                "boson equilibrium requires c > -a (got a = " + std::to_string(a) +
                    ", c = " + std::to_string(c) + ")");
}

EquilibriumPoint equilibrium_at(const EquilibriumParams& params, double p0) {
  const double x = params.a * p0 + params.c;
  if (x > kUnderflowExponent) return {0.0, 0.0};
  if (params.stats == Statistics::Fermion) {
    if (x >= 0.0) {
      const double e = std::exp(-x);
      return {e / (1.0 + e), std::exp(-0.5 * x) / (1.0 + e)};
    }
    const double e = std::exp(x);
    return {1.0 / (1.0 + e), std::exp(0.5 * x) / (1.0 + e)};
  }
  const double d = std::expm1(x);
  return {1.0 / d, std::exp(0.5 * x) / d};
}

double equilibrium_m(const EquilibriumParams& params, const kinematics::FourMomentum& p) {
  params.validate();
  return equilibrium_at(params, p.p0).m;
}

double juttner_J(double a, double p0) { return std::exp(-a * p0); }

double sqrt_weight(const EquilibriumParams& params, const kinematics::FourMomentum& p) {
  params.validate();
  return equilibrium_at(params, p.p0).w;
}

WeightIdentities weight_identities(const EquilibriumParams& params,
                                   const kinematics::FourMomentum& p) {
  params.validate();
  const auto e = equilibrium_at(params, p.p0);
  return {e.m / e.w, (1.0 + params.tau() * e.m) / e.w};
}

SandwichConstants fermion_sandwich(double c) {
  return {1.0 / (1.0 + std::exp(c)), std::exp(-c)};
}

EquilibriumTable tabulate(const EquilibriumParams& params, const MomentumGrid& grid) {
  params.validate();
  EquilibriumTable t;
  t.m.resize(grid.size());
  t.w.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto e = equilibrium_at(params, grid.p0(i));
    t.m[i] = e.m;
    t.w[i] = e.w;
  }
  return t;
}

EquilibriumParams match_equilibrium_params(const MomentumGrid& grid,
                                           std::span<const double> F0,
                                           Statistics stats) {
  if (F0.size() != grid.size())
    throw Error(ErrorKind::GridMismatch, "distribution size does not match grid");
  double mass = 0.0, energy = 0.0;
  Vec3 mom{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < F0.size(); ++i) {
    const double f = F0[i];
    mass += f;
    energy += f * grid.p0(i);
    const Vec3 p = grid.node(i);
    mom = mom + f * p;
  }
  const double dv = grid.cell_volume();
  mass *= dv;
  energy *= dv;
  mom = dv * mom;
  if (!(mass > 0.0) || !(energy > 0.0) || !std::isfinite(mass) || !std::isfinite(energy))
    throw Error(ErrorKind::InvalidParams, "initial data needs positive finite mass and energy");
  if (norm(mom) / mass >= 1e-8)
    throw Error(ErrorKind::NonzeroMomentum,
                "initial data has nonzero net momentum (|P|/M = " +
                    std::to_string(norm(mom) / mass) + ")");

  // Classical starting point: the Juttner energy ratio fixes a, mass fixes c.
  const double ratio = energy / mass;
  double alo = 1e-4, ahi = 1e4;
  auto juttner_ratio = [&](double a) {
    double s0 = 0.0, s1 = 0.0;
    for (double e : grid.energies()) {
      const double j = std::exp(-a * (e - 1.0));
      s0 += j;
      s1 += j * e;
    }
    return s1 / s0;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(alo * ahi);
    if (juttner_ratio(mid) > ratio)
      alo = mid;
    else
      ahi = mid;
  }
  double a = std::sqrt(alo * ahi);
  double j0 = 0.0;
  for (double e : grid.energies()) j0 += std::exp(-a * (e - 1.0));
  double c = std::log(j0 * dv / mass) - a;
  if (stats == Statistics::Boson) c = std::max(c, -a + 1e-3);

  auto residual = [&](double la, double cc) -> std::array<double, 2> {
    const auto m = eq_moments(grid, std::exp(la), cc, stats);
    return {std::log(m.mass / mass), std::log(m.energy / energy)};
  };
  auto rnorm = [](const std::array<double, 2>& r) { return std::max(std::fabs(r[0]), std::fabs(r[1])); };

  double la = std::log(a);
  auto r = residual(la, c);
  bool converged = false;
  for (int it = 0; it < 100 && std::isfinite(rnorm(r)); ++it) {
    if (rnorm(r) < 1e-13) {
      converged = true;
      break;
    }
    const double d = 1e-6;
    const auto ra = residual(la + d, c), rb = residual(la - d, c);
    const auto rc = residual(la, c + d), rd = residual(la, c - d);
    const double j00 = (ra[0] - rb[0]) / (2 * d), j10 = (ra[1] - rb[1]) / (2 * d);
    const double j01 = (rc[0] - rd[0]) / (2 * d), j11 = (rc[1] - rd[1]) / (2 * d);
    const double det = j00 * j11 - j01 * j10;
    if (!(std::fabs(det) > 0.0)) break;
    const double sla = -(j11 * r[0] - j01 * r[1]) / det;
    const double sc = -(-j10 * r[0] + j00 * r[1]) / det;
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      const double nla = la + step * sla, nc = c + step * sc;
      if (!admissible(std::exp(nla), nc, stats)) continue;
      const auto nr = residual(nla, nc);
      if (rnorm(nr) < rnorm(r)) {
        la = nla;
        c = nc;
        r = nr;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      converged = rnorm(r) < 1e-11;
      break;
    }
  }

  if (!converged) {
    // Nested bisection: inner on c for the mass, outer on a for the energy.
    double lo = 1e-3, hi = 1e3;
    auto energy_ratio = [&](double aa) {
      const double cc = solve_c(grid, aa, mass, stats);
      const auto m = eq_moments(grid, aa, cc, stats);
      return m.energy / m.mass;
    };
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-15; ++it) {
      const double mid = std::sqrt(lo * hi);
      if (energy_ratio(mid) > ratio)
        lo = mid;
      else
        hi = mid;
    }
    la = std::log(std::sqrt(lo * hi));
    c = solve_c(grid, std::exp(la), mass, stats);
    r = residual(la, c);
    if (!(rnorm(r) < 1e-9))
      throw Error(ErrorKind::Nonconvergence,
                  "equilibrium moment matching did not converge (residual " +
                      std::to_string(rnorm(r)) + ")");
  }
  EquilibriumParams out{std::exp(la), c, stats};
  out.validate();
  return out;
}

}  // namespace rqbe
