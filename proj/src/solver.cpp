#include "rqbe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "rqbe/error.hpp"
#include "rqbe/parallel.hpp"

namespace rqbe {

const char* to_string(SpatialMode m) { return m == SpatialMode::None ? "none" : "torus1d"; }

void SimulationConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Config, what); };
  try {
    eq.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!(pmax > 0.0) || !std::isfinite(pmax)) fail("pmax must be positive");
  if (n < 4 || n % 2 != 0) fail("n must be even and at least 4");
  if (ntheta < 1 || nphi < 1) fail("ntheta and nphi must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail("t_end must be nonnegative");
  if (output_every < 1) fail("output_every must be at least 1");
  if (spatial == SpatialMode::Torus1D) {
    if (nx < 8) fail("nx must be at least 8 on the torus");
    if (dt > dx()) fail("dt exceeds the transport CFL limit dx = 2 pi / nx");
  } else if (nx != 1) {
    fail("nx must be 1 without a spatial dimension");
  }
  const auto& k = perturbation.kind;
  if (k != "none" && k != "bump" && k != "wave" && k != "random")
    fail("unknown perturbation kind '" + k + "'");
  if (k == "wave" && spatial != SpatialMode::Torus1D) fail("perturbation 'wave' needs the torus");
  if (!std::isfinite(perturbation.amplitude)) fail("amplitude must be finite");
  if (!(perturbation.width > 0.0)) fail("width must be positive");
}

double SimulationConfig::dx() const {
  return spatial == SpatialMode::Torus1D ? 2.0 * std::numbers::pi / nx : 1.0;
}

namespace {

std::vector<double> collision_frequency(const CollisionOperator& op) {
  const auto& tab = op.table();
  const auto gl = op.gain_loss(tab.m);
  std::vector<double> nu(tab.m.size());
  for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = gl.R[i] / (1.0 + op.tau() * tab.m[i]);
  return nu;
}

const SimulationConfig& checked(const SimulationConfig& c) {
  c.validate();
  return c;
}

}  // namespace

Solver::Solver(const SimulationConfig& cfg)
    : cfg_(checked(cfg)),
      grid_(cfg.pmax, cfg.n),
      ang_(cfg.ntheta, cfg.nphi),
      op_(grid_, ang_, cfg.eq, cfg.offgrid),
      diag_(grid_, cfg.eq, collision_frequency(op_), cfg.dx()) {}

bool Solver::admissible(std::span<const double> F) const {
  const double hi = op_.upper_bound();
  return std::all_of(F.begin(), F.end(),
                     [hi](double v) { return std::isfinite(v) && v >= 0.0 && v <= hi; });
}

State Solver::initial_state() const {
  const std::size_t N = grid_.size();
  const std::size_t nx = static_cast<std::size_t>(cfg_.nx);
  const auto& tab = op_.table();
  const auto& P = cfg_.perturbation;

  std::vector<double> shape(N, 0.0);
  if (P.kind == "bump" || P.kind == "wave") {
    for (std::size_t i = 0; i < N; ++i) {
      const Vec3 d = grid_.node(i) - P.center;
      shape[i] = P.amplitude * std::exp(-0.5 * dot(d, d) / (P.width * P.width));
    }
  } else if (P.kind == "random") {
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < N; ++i) shape[i] = P.amplitude * tab.m[i] * u(rng);
  }
  if (P.kind == "bump" || P.kind == "random")
    moment_shift(op_.projection(), shape, {0.0, 0.0, 0.0, 0.0, 0.0});

  State s;
  s.nx = nx;
  s.F.resize(nx * N);
  const bool torus = cfg_.spatial == SpatialMode::Torus1D;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double profile = torus && P.kind != "none" ? std::cos(ix * cfg_.dx()) : 1.0;
    for (std::size_t i = 0; i < N; ++i) s.F[ix * N + i] = tab.m[i] + profile * shape[i];
  }
  if (!admissible(s.F))
    throw Error(ErrorKind::Config, "the perturbation takes the initial data out of bounds");
  return s;
}

void Solver::collision_substep(std::span<double> F, double dt) const {
  const std::size_t N = grid_.size();
  if (F.size() != N) throw Error(ErrorKind::GridMismatch, "collision step on a partial cell");
  const double tau = op_.tau(), hi = op_.upper_bound();
  const auto gl = op_.gain_loss(F);
  std::vector<double> delta(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double lam = gl.R[i] - tau * gl.G[i];
    const double x = lam * dt;
    const double decay = std::exp(-x);
    // (1 - exp(-lambda dt)) / lambda, which tends to dt as lambda -> 0.
    const double phi = x == 0.0 ? dt : -std::expm1(-x) / lam;
    const double next = std::clamp(decay * F[i] + gl.G[i] * phi, 0.0, hi);
    delta[i] = next - F[i];
  }
  if (cfg_.conservation_fix) moment_shift(op_.projection(), delta, {0.0, 0.0, 0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < N; ++i) F[i] = std::clamp(F[i] + delta[i], 0.0, hi);
}

void Solver::transport_substep(State& s, double dt) const {
  if (cfg_.spatial != SpatialMode::Torus1D)
    throw Error(ErrorKind::InvalidParams, "transport needs the spatial torus");
  const std::size_t N = grid_.size(), nx = s.nx;
  const double dx = cfg_.dx(), hi = op_.upper_bound();
  const long L = static_cast<long>(nx);
  parallel_for(N, [&](std::size_t begin, std::size_t end) {
    std::vector<double> col(nx);
    for (std::size_t i = begin; i < end; ++i) {
      const double v = grid_.node(i)[0] / grid_.p0(i);
      const double shift = v * dt / dx;  // in cells
      if (shift == 0.0) continue;
      for (std::size_t ix = 0; ix < nx; ++ix) col[ix] = s.F[ix * N + i];
      const double fl = std::floor(-shift);
      const double t = -shift - fl;
      const long k = static_cast<long>(fl);
      // Cubic Lagrange weights on nodes -1, 0, 1, 2 of the cell containing the foot.
      const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
      const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
      const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
      const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
      for (long ix = 0; ix < L; ++ix) {
        auto at = [&](long j) { return col[static_cast<std::size_t>(((j % L) + L) % L)]; };
        const long b = ix + k;
        const double val = w0 * at(b - 1) + w1 * at(b) + w2 * at(b + 1) + w3 * at(b + 2);
        s.F[static_cast<std::size_t>(ix) * N + i] = std::clamp(val, 0.0, hi);
      }
    }
  });
}

void Solver::step(State& s, double dt) const {
  const std::size_t N = grid_.size();
  const bool torus = cfg_.spatial == SpatialMode::Torus1D;
  if (torus) transport_substep(s, 0.5 * dt);
  for (std::size_t ix = 0; ix < s.nx; ++ix)
    collision_substep(std::span<double>(s.F).subspan(ix * N, N), dt);
  if (torus) transport_substep(s, 0.5 * dt);
}

RunResult Solver::run(State& s, const std::function<void(const DiagnosticsRecord&)>& sink) const {
  if (s.F.size() != s.nx * grid_.size() || s.nx != static_cast<std::size_t>(cfg_.nx))
    throw Error(ErrorKind::GridMismatch, "state does not match the configured grid");
  RunResult res;
  auto emit = [&] {
    res.records.push_back(diag_.record(s.t, s.F));
    if (sink) sink(res.records.back());
  };
  emit();
  const double dt = cfg_.dt, t_end = cfg_.t_end;
  State good = s;
  std::uint64_t since = 0;
  while (t_end - s.t > 1e-9 * dt) {
    // A last step shorter than dt lands exactly on t_end.
    const double h = t_end - s.t < dt * (1.0 + 1e-9) ? t_end - s.t : dt;
    step(s, h);
    s.t = t_end - s.t - h <= 1e-9 * dt ? t_end : s.t + h;
    ++s.step;
    ++res.steps;
    if (!std::all_of(s.F.begin(), s.F.end(), [](double v) { return std::isfinite(v); })) {
      const double t_bad = s.t;
      s = good;
      throw Error(ErrorKind::Divergence,
                  "non-finite value at t = " + std::to_string(t_bad) + "; state kept at t = " +
                      std::to_string(s.t));
    }
    good = s;
    if (++since == static_cast<std::uint64_t>(cfg_.output_every) || s.t >= t_end) {
      emit();
      since = 0;
    }
  }
  return res;
}

}  // namespace rqbe
