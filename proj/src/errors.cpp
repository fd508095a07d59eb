#include "natcap/errors.hpp"

namespace natcap {

ParseError::ParseError(std::size_t line, const std::string& what)
  : Error("line " + std::to_string(line) + ": " + what)
  , line_(line)
{}

namespace {
std::string
join_columns(const std::vector<std::string>& cols)
{
  std::string out;
  for (const auto& c : cols) {
    if (!out.empty())
      out += ", ";
    out += c;
  }
  return out;
}
} // namespace

RankDeficientError::RankDeficientError(std::vector<std::string> columns)
  : NumericalError("rank-deficient design; collinear columns: " +
                   join_columns(columns))
  , columns_(std::move(columns))
{}

} // namespace natcap
