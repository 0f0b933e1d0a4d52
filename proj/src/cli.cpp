#include "rqbe/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rqbe/error.hpp"
#include "rqbe/io/config.hpp"
#include "rqbe/io/csv.hpp"
#include "rqbe/io/snapshot.hpp"
#include "rqbe/kinematics.hpp"
#include "rqbe/linearized.hpp"
#include "rqbe/parallel.hpp"
#include "rqbe/reduced_oracle.hpp"
#include "rqbe/solver.hpp"

namespace rqbe::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  bool out_given = false;
  int threads = 0;
  std::string resume;
  // oracle
  int samples = 10000;
  std::uint64_t seed = 1;
  double radius = 10.0;
  // spectrum
  std::string eig = "auto";
  std::size_t singular = 8;
  // bench
  std::string thread_list = "1,2,4";
  int repeat = 3;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes text to out and, when an output directory was given, to a file in it.
void emit(const Options& o, std::ostream& out, const std::string& name, const std::string& text) {
  out << text;
  if (!o.out_given) return;
  fs::create_directories(o.out);
  std::ofstream f(fs::path(o.out) / name, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write '" + (fs::path(o.out) / name).string() + "'");
  f << text;
}

SimulationConfig require_config(const Options& o) {
  if (o.config.empty()) throw Error(ErrorKind::Config, "--config is required");
  return io::load_config(o.config);
}

int simulate(const Options& o, bool torus, std::ostream& out, std::ostream& err) {
  const SimulationConfig cfg = require_config(o);
  if (torus && cfg.spatial != SpatialMode::Torus1D)
    throw Error(ErrorKind::Config, "perturb needs spatial = torus1d");
  if (!torus && cfg.spatial != SpatialMode::None)
    throw Error(ErrorKind::Config, "relax is homogeneous and needs spatial = none");
  set_thread_count(o.threads);
  fs::create_directories(o.out);
  const fs::path dir(o.out);

  const Solver solver(cfg);
  State st;
  if (o.resume.empty()) {
    st = solver.initial_state();
  } else {
    io::Snapshot snap;
    try {
      snap = io::read_snapshot(o.resume);
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, std::string("--resume: ") + e.what());
    }
    st = io::restore_state(solver, snap);
  }
  {
    std::ofstream f(dir / "run.cfg", std::ios::binary | std::ios::trunc);
    f << io::format_config(cfg);
  }

  const fs::path csv_path = dir / "diagnostics.csv";
  const bool continuing = !o.resume.empty() && fs::exists(csv_path) && fs::file_size(csv_path) > 0;
  io::CsvWriter csv(csv_path, continuing);
  bool first = true;
  auto sink = [&](const DiagnosticsRecord& r) {
    // A resumed run's first record repeats the last row already on file.
    if (!(first && continuing)) csv.write(r);
    first = false;
  };
  RunResult res;
  try {
    res = solver.run(st, sink);
  } catch (const Error& e) {
    csv.flush();
    if (e.kind() == ErrorKind::Divergence) {
      io::write_snapshot(dir / "last_good.rqbk", io::make_snapshot(solver, st));
      err << "rqbe: divergence: " << e.what() << "; last good state in "
          << (dir / "last_good.rqbk").string() << "\n";
      return kDivergence;
    }
    throw;
  }
  csv.flush();
  io::write_snapshot(dir / "snapshot.rqbk", io::make_snapshot(solver, st));
  const auto& a = res.records.front();
  const auto& b = res.records.back();
  out << (torus ? "perturb" : "relax") << ": " << res.steps << " steps to t = " << fmt(st.t)
      << ", l2_f " << fmt(a.l2_f) << " -> " << fmt(b.l2_f) << ", mass " << fmt(a.mass) << " -> "
      << fmt(b.mass) << "\n";
  return kOk;
}

int spectrum(const Options& o, std::ostream& out) {
  const SimulationConfig cfg = require_config(o);
  set_thread_count(o.threads);
  EigenMethod method = EigenMethod::Auto;
  if (o.eig == "dense") method = EigenMethod::Dense;
  else if (o.eig == "lanczos") method = EigenMethod::Lanczos;
  const MomentumGrid grid(cfg.pmax, cfg.n);
  const AngularQuadrature ang(cfg.ntheta, cfg.nphi);
  const CollisionOperator op(grid, ang, cfg.eq, cfg.offgrid);
  const LinearizedOperator lin(op);
  const auto L = lin.assemble_L();
  const auto sv = smallest_singular_values(L, std::min(o.singular, L.n));
  const auto gap = coercivity_delta(L, method);
  const auto near_zero = std::count_if(sv.begin(), sv.end(), [](double s) { return s <= 1e-6; });
  std::ostringstream s;
  s << "grid n = " << cfg.n << ", pmax = " << fmt(cfg.pmax) << ", angular " << cfg.ntheta << "x"
    << cfg.nphi << ", " << to_string(cfg.eq.stats) << " a = " << fmt(cfg.eq.a)
    << " c = " << fmt(cfg.eq.c) << "\n";
  s << "nodes " << L.n << "\n";
  s << "symmetry defect " << fmt(L.symmetry_defect()) << "\n";
  s << "raw asymmetry " << fmt(L.raw_asymmetry) << "\n";
  s << "raw kernel defect " << fmt(L.raw_kernel) << "\n";
  s << "raw conservation defect " << fmt(L.raw_conservation) << "\n";
  s << "smallest singular values";
  for (double v : sv) s << " " << fmt(v);
  s << "\n";
  s << "near-zero singular values (<= 1e-6) " << near_zero << "\n";
  s << "coercivity delta " << fmt(gap.delta) << " (" << gap.method << ", " << gap.iterations
    << " iterations, residual " << fmt(gap.residual) << ")\n";
  emit(o, out, "spectrum.txt", s.str());
  return kOk;
}

int oracle(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.samples < 1) throw Error(ErrorKind::Config, "--samples must be positive");
  struct Tally {
    long count = 0, failures = 0, skipped = 0;
    double max_error = 0.0;
  };
  std::vector<std::string> order;
  std::map<std::string, Tally> tally;
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> nd;
  auto ball = [&] {
    for (;;) {
      const Vec3 v{u(rng), u(rng), u(rng)};
      if (dot(v, v) <= 1.0) return o.radius * v;
    }
  };
  long failures = 0;
  for (int k = 0; k < o.samples; ++k) {
    const kinematics::FourMomentum p(ball()), q(ball());
    Vec3 w{nd(rng), nd(rng), nd(rng)};
    w = (1.0 / norm(w)) * w;
    const auto quad =
        kinematics::com_post_momenta(p, q, kinematics::CollisionGeometry::from_unit(w));
    const auto rep = reduced::on_shell_identity_suite(quad);
    for (const auto& c : rep.checks) {
      auto [it, fresh] = tally.try_emplace(c.name);
      if (fresh) order.push_back(c.name);
      Tally& t = it->second;
      ++t.count;
      if (c.skipped) {
        ++t.skipped;
      } else {
        if (!c.passed) ++t.failures;
        t.max_error = std::max(t.max_error, c.error);
      }
    }
    failures += rep.failures();
  }
  std::ostringstream s;
  s << "check,samples,failures,skipped,max_error\n";
  for (const auto& name : order) {
    const Tally& t = tally[name];
    s << name << "," << t.count << "," << t.failures << "," << t.skipped << "," << fmt(t.max_error)
      << "\n";
  }
  emit(o, out, "oracle.csv", s.str());
  if (failures > 0) {
    err << "rqbe: " << failures << " identity failures over " << o.samples << " samples\n";
    return kInternalError;
  }
  return kOk;
}

std::vector<int> parse_thread_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "--thread-list: bad entry '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::Config, "--thread-list is empty");
  return out;
}

int bench(const Options& o, std::ostream& out, std::ostream& err) {
  SimulationConfig cfg;
  if (!o.config.empty()) {
    cfg = io::load_config(o.config);
  } else {
    cfg.pmax = 6.0;
    cfg.n = 12;
    cfg.ntheta = 6;
    cfg.nphi = 8;
    cfg.perturbation.kind = "bump";
    cfg.perturbation.amplitude = 0.05;
    cfg.perturbation.center = {0.5, 0.0, 0.0};
  }
  if (o.repeat < 1) throw Error(ErrorKind::Config, "--repeat must be positive");
  const auto threads = parse_thread_list(o.thread_list);
  const Solver solver(cfg);
  const State st = solver.initial_state();
  const std::span<const double> F(st.F.data(), solver.nodes());

  std::ostringstream s;
  s << "threads,seconds_per_Q,nodes_per_second,checksum,fingerprint\n";
  std::string reference;
  bool consistent = true;
  for (int t : threads) {
    set_thread_count(t);
    std::vector<double> Q;
    double best = 1e300;
    for (int r = 0; r < o.repeat; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      Q = solver.collision().apply_Q(F);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    double sum = 0.0;
    for (double q : Q) sum += q;
    // FNV-1a over the bytes of Q ties the timing to one exact result.
    std::uint64_t h = 1469598103934665603ull;
    for (double q : Q) {
      std::uint64_t bits;
      std::memcpy(&bits, &q, sizeof bits);
      for (int k = 0; k < 8; ++k) {
        h ^= (bits >> (8 * k)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    if (reference.empty()) reference = hex;
    consistent = consistent && reference == hex;
    s << t << "," << fmt(best) << "," << fmt(static_cast<double>(Q.size()) / best) << ","
      << fmt(sum) << "," << hex << "\n";
  }
  set_thread_count(o.threads);
  emit(o, out, "bench.csv", s.str());
  if (!consistent) {
    err << "rqbe: Q differs between thread counts\n";
    return kInternalError;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relativistic quantum Boltzmann solver and verification tools", "rqbe"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "configuration file (key = value)");
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  };
  auto* relax = app.add_subcommand("relax", "homogeneous relaxation run");
  common(relax, true);
  relax->add_option("--resume", o.resume, "continue from a snapshot");
  auto* perturb = app.add_subcommand("perturb", "run on the spatial torus");
  common(perturb, true);
  perturb->add_option("--resume", o.resume, "continue from a snapshot");
  auto* spec = app.add_subcommand("spectrum", "assemble L and report its structure");
  common(spec, true);
  spec->add_option("--eig", o.eig, "eigen solver")->check(CLI::IsMember({"auto", "dense", "lanczos"}));
  spec->add_option("--singular", o.singular, "number of smallest singular values to report");
  auto* orc = app.add_subcommand("oracle", "on-shell identity suite over random quadruples");
  orc->add_option("--out", o.out, "output directory");
  orc->add_option("--samples", o.samples, "number of random quadruples");
  orc->add_option("--seed", o.seed, "random seed");
  orc->add_option("--radius", o.radius, "momenta are drawn from the ball of this radius");
  auto* bch = app.add_subcommand("bench", "timed collision operator applications");
  common(bch, false);
  bch->add_option("--thread-list", o.thread_list, "comma separated thread counts");
  bch->add_option("--repeat", o.repeat, "timed repetitions per thread count");
  auto* val = app.add_subcommand("validate-config", "parse and echo the normalized configuration");
  val->add_option("--config", o.config, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, out, msg);
    if (code == 0) return kOk;
    std::string line = msg.str();
    if (!line.empty() && line.back() == '\n') line.pop_back();
    err << "rqbe: " << line << "\n";
    return kConfigError;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->get_option_no_throw("--out") && sub->count("--out") > 0) o.out_given = true;

  try {
    if (*relax) return simulate(o, false, out, err);
    if (*perturb) return simulate(o, true, out, err);
    if (*spec) return spectrum(o, out);
    if (*orc) return oracle(o, out, err);
    if (*bch) return bench(o, out, err);
    if (*val) {
      out << io::format_config(io::load_config(o.config));
      return kOk;
    }
  } catch (const Error& e) {
    err << "rqbe: " << to_string(e.kind()) << ": " << e.what() << "\n";
    if (e.kind() == ErrorKind::Config) return kConfigError;
    if (e.kind() == ErrorKind::Divergence) return kDivergence;
    return kInternalError;
  } catch (const std::exception& e) {
    err << "rqbe: internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace rqbe::cli
