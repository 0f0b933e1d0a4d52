#include "rqbe/io/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rqbe/error.hpp"

namespace rqbe::io {

namespace {

constexpr char kMagic[4] = {'R', 'Q', 'B', 'K'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 1 + 8 + 8 + 12 + 8 + 4 + 8;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t{b_[pos_ + k]} << (8 * k);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t{b_[pos_ + k]} << (8 * k);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::int8_t i8() {
    need(1);
    return static_cast<std::int8_t>(b_[pos_++]);
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw Error(ErrorKind::Io, "snapshot is truncated");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& s) {
  const std::size_t count = std::size_t{s.nx} * s.dims[0] * s.dims[1] * s.dims[2];
  if (s.values.size() != count)
    throw Error(ErrorKind::GridMismatch, "snapshot values do not match its dimensions");
  Writer w;
  w.out.reserve(kHeaderBytes + 8 * count);
  w.bytes(kMagic, 4);
  w.u32(kSnapshotVersion);
  w.out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(s.stats)));
  w.f64(s.a);
  w.f64(s.c);
  for (auto d : s.dims) w.u32(d);
  w.f64(s.pmax);
  w.u32(s.nx);
  w.f64(s.time);
  for (double v : s.values) w.f64(v);
  return w.out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorKind::Io, "not a snapshot (bad magic)");
  Reader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion)
    throw Error(ErrorKind::Io, "unsupported snapshot version " + std::to_string(version));
  Snapshot s;
  const std::int8_t st = r.i8();
  if (st != 1 && st != -1) throw Error(ErrorKind::Io, "snapshot has an invalid statistics byte");
  s.stats = static_cast<Statistics>(st);
  s.a = r.f64();
  s.c = r.f64();
  for (auto& d : s.dims) d = r.u32();
  s.pmax = r.f64();
  s.nx = r.u32();
  s.time = r.f64();
  const std::size_t count = std::size_t{s.nx} * s.dims[0] * s.dims[1] * s.dims[2];
  if (r.remaining() != 8 * count)
    throw Error(ErrorKind::Io, "snapshot payload has " + std::to_string(r.remaining()) +
                                   " bytes, expected " + std::to_string(8 * count));
  s.values.resize(count);
  for (auto& v : s.values) v = r.f64();
  return s;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed on '" + path.string() + "'");
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

Snapshot make_snapshot(const Solver& solver, const State& state) {
  const auto& cfg = solver.config();
  Snapshot s;
  s.stats = cfg.eq.stats;
  s.a = cfg.eq.a;
  s.c = cfg.eq.c;
  const auto n = static_cast<std::uint32_t>(cfg.n);
  s.dims = {n, n, n};
  s.pmax = cfg.pmax;
  s.nx = static_cast<std::uint32_t>(state.nx);
  s.time = state.t;
  s.values = state.F;
  return s;
}

State restore_state(const Solver& solver, const Snapshot& s) {
  const auto& cfg = solver.config();
  const auto n = static_cast<std::uint32_t>(cfg.n);
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::Config, "snapshot does not match the configuration: " + what);
  };
  if (s.stats != cfg.eq.stats) fail("statistics");
  if (s.a != cfg.eq.a || s.c != cfg.eq.c) fail("equilibrium parameters a, c");
  if (s.dims != std::array<std::uint32_t, 3>{n, n, n}) fail("grid size");
  if (s.pmax != cfg.pmax) fail("pmax");
  if (s.nx != static_cast<std::uint32_t>(cfg.nx)) fail("nx");
  State st;
  st.t = s.time;
  st.nx = s.nx;
  st.F = s.values;
  if (!solver.admissible(st.F)) fail("values out of bounds");
  return st;
}

}  // namespace rqbe::io
