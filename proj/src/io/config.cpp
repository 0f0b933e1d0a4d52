#include "rqbe/io/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rqbe/error.hpp"

namespace rqbe::io {

const char* to_string(OffgridMode m) { return m == OffgridMode::Plain ? "plain" : "weighted"; }

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
};

class Reader {
 public:
  Reader(std::string_view origin, std::map<std::string, Entry> entries)
      : origin_(origin), entries_(std::move(entries)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = entries_.find(key);
    std::string where(origin_);
    if (it != entries_.end()) where += ":" + std::to_string(it->second.line);
    throw Error(ErrorKind::Config, where + ": key '" + key + "': " + what);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  double real(const std::string& key) const {
    const std::string& v = raw(key);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      fail(key, "expected a number, got '" + v + "'");
    return out;
  }

  template <class Int>
  Int integer(const std::string& key) const {
    const std::string& v = raw(key);
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      fail(key, "expected an integer, got '" + v + "'");
    return out;
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> options) const {
    const std::string& v = raw(key);
    for (const char* o : options)
      if (v == o) return v;
    std::string list;
    for (const char* o : options) list += (list.empty() ? "" : "|") + std::string(o);
    fail(key, "expected one of " + list + ", got '" + v + "'");
  }

  Vec3 vec3(const std::string& key) const {
    const std::string& v = raw(key);
    Vec3 out{};
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
      const std::size_t comma = v.find(',', start);
      if ((k < 2) != (comma != std::string::npos)) fail(key, "expected x,y,z, got '" + v + "'");
      const std::string_view part = trim(std::string_view(v).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start));
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out[k]);
      if (part.empty() || ec != std::errc() || ptr != part.data() + part.size())
        fail(key, "expected x,y,z, got '" + v + "'");
      start = comma + 1;
    }
    return out;
  }

 private:
  std::string_view origin_;
  std::map<std::string, Entry> entries_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "stats",   "a",          "c",   "pmax",   "n",    "ntheta", "nphi",
      "offgrid", "spatial",    "nx",  "dt",     "t_end", "output_every", "conservation_fix",
      "perturbation", "amplitude", "center", "width", "seed"};
  return keys;
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

SimulationConfig parse_config(std::string_view text, std::string_view origin) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                            : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Config, where + ": expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorKind::Config, where + ": missing key before '='");
    if (!known_keys().count(key)) throw Error(ErrorKind::Config, where + ": unknown key '" + key + "'");
    if (value.empty()) throw Error(ErrorKind::Config, where + ": key '" + key + "' has no value");
    if (entries.count(key))
      throw Error(ErrorKind::Config, where + ": duplicate key '" + key + "' (first on line " +
                                         std::to_string(entries[key].line) + ")");
    entries.emplace(key, Entry{value, line_no});
  }

  const Reader r(origin, entries);
  for (const char* k : {"stats", "a", "c", "pmax", "n", "ntheta", "nphi", "dt", "t_end"})
    if (!r.has(k))
      throw Error(ErrorKind::Config, std::string(origin) + ": missing required key '" + k + "'");

  SimulationConfig cfg;
  cfg.eq.stats = r.choice("stats", {"boson", "fermion"}) == "boson" ? Statistics::Boson
                                                                    : Statistics::Fermion;
  cfg.eq.a = r.real("a");
  cfg.eq.c = r.real("c");
  cfg.pmax = r.real("pmax");
  cfg.n = r.integer<int>("n");
  cfg.ntheta = r.integer<int>("ntheta");
  cfg.nphi = r.integer<int>("nphi");
  cfg.dt = r.real("dt");
  cfg.t_end = r.real("t_end");
  if (r.has("offgrid"))
    cfg.offgrid = r.choice("offgrid", {"weighted", "plain"}) == "plain" ? OffgridMode::Plain
                                                                        : OffgridMode::Weighted;
  if (r.has("spatial"))
    cfg.spatial = r.choice("spatial", {"none", "torus1d"}) == "torus1d" ? SpatialMode::Torus1D
                                                                        : SpatialMode::None;
  if (r.has("nx")) cfg.nx = r.integer<int>("nx");
  if (r.has("output_every")) cfg.output_every = r.integer<int>("output_every");
  if (r.has("conservation_fix"))
    cfg.conservation_fix = r.choice("conservation_fix", {"on", "off"}) == "on";
  if (r.has("perturbation"))
    cfg.perturbation.kind = r.choice("perturbation", {"none", "bump", "wave", "random"});
  if (r.has("amplitude")) cfg.perturbation.amplitude = r.real("amplitude");
  if (r.has("center")) cfg.perturbation.center = r.vec3("center");
  if (r.has("width")) cfg.perturbation.width = r.real("width");
  if (r.has("seed")) cfg.seed = r.integer<std::uint64_t>("seed");
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string(origin) + ": " + e.what());
  }
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string format_config(const SimulationConfig& c) {
  std::string s;
  auto put = [&](const char* k, const std::string& v) { s += std::string(k) + " = " + v + "\n"; };
  put("stats", to_string(c.eq.stats));
  put("a", num(c.eq.a));
  put("c", num(c.eq.c));
  put("pmax", num(c.pmax));
  put("n", std::to_string(c.n));
  put("ntheta", std::to_string(c.ntheta));
  put("nphi", std::to_string(c.nphi));
  put("offgrid", to_string(c.offgrid));
  put("spatial", rqbe::to_string(c.spatial));
  put("nx", std::to_string(c.nx));
  put("dt", num(c.dt));
  put("t_end", num(c.t_end));
  put("output_every", std::to_string(c.output_every));
  put("conservation_fix", c.conservation_fix ? "on" : "off");
  put("perturbation", c.perturbation.kind);
  put("amplitude", num(c.perturbation.amplitude));
  const Vec3& p = c.perturbation.center;
  put("center", num(p[0]) + "," + num(p[1]) + "," + num(p[2]));
  put("width", num(c.perturbation.width));
  put("seed", std::to_string(c.seed));
  return s;
}

}  // namespace rqbe::io
