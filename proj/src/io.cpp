#include "natcap/io.hpp"
#include "natcap/errors.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace natcap::io {

std::size_t
CsvTable::column(const std::string& name) const
{
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name)
      return i;
  throw ParseError(1, "missing CSV column '" + name + "'");
}

namespace {

// Returns false at end of input.
bool
read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line)
{
  fields.clear();
  std::string field;
  bool quoted = false, any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n')
          ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++line;
      if (!field.empty() && field.back() == '\r')
        field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted)
    throw ParseError(line + 1, "unterminated quoted CSV field");
  if (!any)
    return false;
  if (!field.empty() && field.back() == '\r')
    field.pop_back();
  fields.push_back(std::move(field));
  return true;
}

} // namespace

CsvTable
read_csv(std::istream& in)
{
  CsvTable t;
  std::size_t line = 0;
  std::vector<std::string> fields;
  if (!read_record(in, fields, line))
    throw ParseError(1, "empty CSV input");
  t.header = fields;
  while (read_record(in, fields, line)) {
    if (fields.size() == 1 && fields[0].empty())
      continue;
    if (fields.size() != t.header.size())
      throw ParseError(line, "expected " + std::to_string(t.header.size()) + " CSV fields, got " +
                               std::to_string(fields.size()));
    t.rows.push_back(fields);
  }
  return t;
}

CsvTable
read_csv_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path.string());
  return read_csv(in);
}

std::string
format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out)
  : out_(out)
{}

CsvWriter&
CsvWriter::field(const std::string& s)
{
  if (!first_)
    out_ << ',';
  first_ = false;
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    out_ << s;
  } else {
    out_ << '"';
    for (char c : s) {
      if (c == '"')
        out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  return *this;
}

CsvWriter&
CsvWriter::field(double v)
{
  return field(format_double(v));
}

CsvWriter&
CsvWriter::field(int v)
{
  return field(std::to_string(v));
}

CsvWriter&
CsvWriter::field(long v)
{
  return field(std::to_string(v));
}

CsvWriter&
CsvWriter::field(std::size_t v)
{
  return field(std::to_string(v));
}

void
CsvWriter::end_row()
{
  out_ << '\n';
  first_ = true;
}

void
CsvWriter::row(const std::vector<std::string>& fields)
{
  for (const auto& f : fields)
    field(f);
  end_row();
}

double
parse_double(const std::string& s, std::size_t line)
{
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(line, "not a number: '" + s + "'");
  return v;
}

int
parse_int(const std::string& s, std::size_t line)
{
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(line, "not an integer: '" + s + "'");
  return v;
}

std::string
read_text_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void
write_text_file(const std::filesystem::path& path, const std::string& text)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path.string());
  out << text;
}

std::string
sha256_file(const std::filesystem::path& path)
{
  const std::string bytes = read_text_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed for " + path.string());
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

} // namespace natcap::io
