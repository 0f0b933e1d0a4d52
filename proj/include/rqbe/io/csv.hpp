#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rqbe/diagnostics.hpp"

namespace rqbe::io {

inline constexpr std::string_view kCsvHeader =
    "t,mass,px,py,pz,energy,H,l2_f,nu_norm_f,min_F,max_F";

// One row, LF terminated, each value with 17 significant digits so it reads
// back bit-exactly.
std::string format_csv_row(const DiagnosticsRecord& r);

// Parses text written by the writer (header plus rows).
std::vector<DiagnosticsRecord> parse_csv(std::string_view text);
std::vector<DiagnosticsRecord> read_csv(const std::filesystem::path& path);

// Writes the header to a new or empty file. Appending to an existing file
// checks its header and continues after the last complete row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, bool append);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write(const DiagnosticsRecord& r);
  void flush();

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
};

}  // namespace rqbe::io
