#include "rqbe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rqbe/error.hpp"

namespace rqbe {

namespace {

std::size_t cells(const MomentumGrid& grid, std::span<const double> F) {
  const std::size_t N = grid.size();
  if (F.size() == 0 || F.size() % N != 0)
    throw Error(ErrorKind::GridMismatch, "phase-space array is not a whole number of grids");
  return F.size() / N;
}

}  // namespace

Moments moments(const MomentumGrid& grid, std::span<const double> F, double dx) {
  const std::size_t N = grid.size(), nx = cells(grid, F);
  Moments m;
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t i = 0; i < N; ++i) {
      const double v = F[ix * N + i];
      const Vec3 p = grid.node(i);
      m.mass += v;
      m.momentum = m.momentum + v * p;
      m.energy += v * grid.p0(i);
    }
  const double vol = grid.cell_volume() * dx;
  m.mass *= vol;
  m.momentum = vol * m.momentum;
  m.energy *= vol;
  return m;
}

double h_functional(const MomentumGrid& grid, std::span<const double> F, Statistics stats,
                    double dx) {
  cells(grid, F);
  const double tau = tau_of(stats);
  double s = 0.0;
  for (double v : F) {
    double e = v > 1e-300 ? v * std::log(v) : 0.0;
    const double u = 1.0 + tau * v;
    if (u > 1e-300) e -= u * std::log1p(tau * v) / tau;
    s += e;
  }
  return s * grid.cell_volume() * dx;
}

std::vector<double> perturbation(std::span<const double> F, const EquilibriumTable& eq) {
  const std::size_t N = eq.m.size();
  if (N == 0 || F.size() % N != 0)
    throw Error(ErrorKind::GridMismatch, "phase-space array does not match the equilibrium table");
  std::vector<double> f(F.size());
  for (std::size_t k = 0; k < F.size(); ++k) {
    const std::size_t i = k % N;
    f[k] = (F[k] - eq.m[i]) / eq.w[i];
  }
  return f;
}

Norms norms(const MomentumGrid& grid, std::span<const double> f, std::span<const double> nu,
            double dx) {
  const std::size_t N = grid.size();
  cells(grid, f);
  if (nu.size() != N) throw Error(ErrorKind::GridMismatch, "nu does not match the grid");
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = f[k] * f[k];
    a += v;
    b += nu[k % N] * v;
  }
  const double vol = grid.cell_volume() * dx;
  return {std::sqrt(a * vol), std::sqrt(b * vol)};
}

DecayFit decay_rate_fit(std::span<const double> t, std::span<const double> y, double burn_in) {
  if (t.size() != y.size()) throw Error(ErrorKind::InvalidParams, "t and y differ in length");
  if (!(burn_in >= 0.0 && burn_in < 1.0))
    throw Error(ErrorKind::InvalidParams, "burn-in fraction must lie in [0, 1)");
  const std::size_t skip = static_cast<std::size_t>(std::floor(burn_in * t.size()));
  const std::size_t n = t.size() - skip;
  if (n < 10)
    throw Error(ErrorKind::InsufficientSamples,
                "decay fit needs 10 samples after burn-in, got " + std::to_string(n));
  double st = 0.0, sy = 0.0;
  for (std::size_t k = skip; k < t.size(); ++k) {
    if (!(y[k] > 0.0))
      throw Error(ErrorKind::NonpositiveValue, "decay fit needs positive values");
    st += t[k];
    sy += std::log(y[k]);
  }
  const double mt = st / n, my = sy / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = skip; k < t.size(); ++k) {
    const double a = t[k] - mt, b = std::log(y[k]) - my;
    stt += a * a;
    sty += a * b;
    syy += b * b;
  }
  if (!(stt > 0.0)) throw Error(ErrorKind::InsufficientSamples, "decay fit needs distinct times");
  DecayFit fit;
  const double slope = sty / stt;
  fit.epsilon = -slope;
  fit.intercept = my - slope * mt;
  const double ss_res = std::max(0.0, syy - slope * sty);
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.samples = n;
  return fit;
}

Diagnostics::Diagnostics(const MomentumGrid& grid, const EquilibriumParams& eq,
                         std::vector<double> nu, double dx)
    : grid_(grid), eq_(eq), table_(tabulate(eq, grid)), nu_(std::move(nu)), dx_(dx) {
  if (nu_.size() != grid_.size()) throw Error(ErrorKind::GridMismatch, "nu does not match the grid");
}

DiagnosticsRecord Diagnostics::record(double t, std::span<const double> F) const {
  DiagnosticsRecord r;
  r.t = t;
  const Moments m = moments(grid_, F, dx_);
  r.mass = m.mass;
  r.momentum = m.momentum;
  r.energy = m.energy;
  r.H = h_functional(grid_, F, eq_.stats, dx_);
  const auto f = perturbation(F, table_);
  const Norms n = norms(grid_, f, nu_, dx_);
  r.l2_f = n.l2;
  r.nu_norm_f = n.nu_norm;
  const auto [lo, hi] = std::minmax_element(F.begin(), F.end());
  r.min_F = *lo;
  r.max_F = *hi;
  return r;
}

}  // namespace rqbe
