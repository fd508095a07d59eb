#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace natcap {

//! Base class for every error raised by the toolkit.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Caller broke a documented precondition (empty author list, bad shapes, ...).
class PreconditionError : public Error
{
public:
  using Error::Error;
};

//! Malformed input line; carries the 1-based line number.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class EmptyCorpusError : public Error
{
public:
  using Error::Error;
};

class EmptyVocabularyError : public Error
{
public:
  using Error::Error;
};

class LookupError : public Error
{
public:
  using Error::Error;
};

//! Numerical breakdown: degenerate KDE, singular design, zero mass.
class NumericalError : public Error
{
public:
  using Error::Error;
};

class RankDeficientError : public NumericalError
{
public:
  explicit RankDeficientError(std::vector<std::string> columns);
  const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
  std::vector<std::string> columns_;
};

} // namespace natcap
