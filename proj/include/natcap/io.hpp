#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace natcap::io {

//! Parsed CSV with a header row.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  //! throws ParseError when the column is absent
  std::size_t column(const std::string& name) const;
};

//! RFC-4180 style reader: quoted fields, doubled quotes, LF or CRLF.
CsvTable
read_csv(std::istream& in);

CsvTable
read_csv_file(const std::filesystem::path& path);

//! Shortest decimal text that parses back to the same double.
std::string
format_double(double v);

//! Writes UTF-8, LF-terminated CSV; quotes fields only when required.
class CsvWriter
{
public:
  explicit CsvWriter(std::ostream& out);

  CsvWriter& field(const std::string& s);
  CsvWriter& field(const char* s) { return field(std::string(s)); }
  CsvWriter& field(double v);
  CsvWriter& field(int v);
  CsvWriter& field(long v);
  CsvWriter& field(std::size_t v);
  void end_row();
  void row(const std::vector<std::string>& fields);

private:
  std::ostream& out_;
  bool first_ = true;
};

double
parse_double(const std::string& s, std::size_t line = 0);

int
parse_int(const std::string& s, std::size_t line = 0);

std::string
read_text_file(const std::filesystem::path& path);

void
write_text_file(const std::filesystem::path& path, const std::string& text);

//! Lowercase hex SHA-256 of the file's bytes.
std::string
sha256_file(const std::filesystem::path& path);

} // namespace natcap::io
