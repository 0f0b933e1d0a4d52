#include "rqbe/io/csv.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rqbe/error.hpp"

namespace rqbe::io {

namespace {

void append_number(std::string& s, double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  s.append(buf, r.ptr);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_csv_row(const DiagnosticsRecord& r) {
  std::string s;
  const double v[] = {r.t,      r.mass, r.momentum[0], r.momentum[1], r.momentum[2], r.energy,
                      r.H,      r.l2_f, r.nu_norm_f,   r.min_F,       r.max_F};
  for (std::size_t k = 0; k < std::size(v); ++k) {
    if (k) s += ',';
    append_number(s, v[k]);
  }
  s += '\n';
  return s;
}

std::vector<DiagnosticsRecord> parse_csv(std::string_view text) {
  const auto first = text.find('\n');
  if (first == std::string_view::npos || text.substr(0, first) != kCsvHeader)
    throw Error(ErrorKind::Io, "diagnostics CSV header missing or different");
  std::vector<DiagnosticsRecord> out;
  std::size_t pos = first + 1;
  int line = 1;
  while (pos < text.size()) {
    ++line;
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      throw Error(ErrorKind::Io, "diagnostics CSV line " + std::to_string(line) + " is incomplete");
    const std::string_view row = text.substr(pos, nl - pos);
    pos = nl + 1;
    double v[11];
    const char* p = row.data();
    const char* end = row.data() + row.size();
    for (int k = 0; k < 11; ++k) {
      const auto r = std::from_chars(p, end, v[k]);
      if (r.ec != std::errc() || (k < 10 ? (r.ptr == end || *r.ptr != ',') : r.ptr != end))
        throw Error(ErrorKind::Io, "diagnostics CSV line " + std::to_string(line) + " is malformed");
      p = r.ptr + 1;
    }
    DiagnosticsRecord rec;
    rec.t = v[0];
    rec.mass = v[1];
    rec.momentum = {v[2], v[3], v[4]};
    rec.energy = v[5];
    rec.H = v[6];
    rec.l2_f = v[7];
    rec.nu_norm_f = v[8];
    rec.min_F = v[9];
    rec.max_F = v[10];
    out.push_back(rec);
  }
  return out;
}

std::vector<DiagnosticsRecord> read_csv(const std::filesystem::path& path) {
  return parse_csv(slurp(path));
}

CsvWriter::CsvWriter(const std::filesystem::path& path, bool append) : path_(path) {
  bool header = true;
  if (append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
    const std::string text = slurp(path);
    const auto first = text.find('\n');
    if (first == std::string::npos || std::string_view(text).substr(0, first) != kCsvHeader)
      throw Error(ErrorKind::Io, "'" + path.string() + "' is not a diagnostics CSV");
    // Drop a partial last row left by an interrupted run.
    if (text.back() != '\n') std::filesystem::resize_file(path, text.rfind('\n') + 1);
    header = false;
  }
  file_ = std::fopen(path.string().c_str(), header ? "wb" : "ab");
  if (!file_) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  if (header) {
    std::string h(kCsvHeader);
    h += '\n';
    if (std::fwrite(h.data(), 1, h.size(), file_) != h.size())
      throw Error(ErrorKind::Io, "write failed on '" + path_.string() + "'");
  }
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::write(const DiagnosticsRecord& r) {
  const std::string row = format_csv_row(r);
  if (std::fwrite(row.data(), 1, row.size(), file_) != row.size())
    throw Error(ErrorKind::Io, "write failed on '" + path_.string() + "'");
}

void CsvWriter::flush() {
  if (std::fflush(file_) != 0) throw Error(ErrorKind::Io, "flush failed on '" + path_.string() + "'");
}

}  // namespace rqbe::io
