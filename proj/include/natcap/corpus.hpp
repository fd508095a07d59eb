#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace natcap::corpus {

//! One bibliographic record admitted to analysis.
struct PaperRecord
{
  std::string id;
  int year = 0;
  std::string title;
  std::string abstract;
  //! ISO-3166 alpha-2, one entry per author (first affiliation wins).
  std::vector<std::string> author_countries;
  std::vector<std::string> keywords;
};

//! Fractional credit of one paper; fractions sum to one.
struct CountryCredit
{
  std::string paper_id;
  std::map<std::string, double> credits;
};

struct Reject
{
  std::size_t line = 0;
  std::string id;
  std::string reason;
};

struct IngestOptions
{
  int year_min = 1976;
  int year_max = 2016;
};

struct IngestResult
{
  std::vector<PaperRecord> records;
  std::vector<Reject> rejects;
};

//! Reads JSON Lines records. Lines that are not valid JSON throw ParseError;
//! records that parse but cannot be admitted (no year, no resolvable author
//! country, outside the study window) land in `rejects` with a reason code.
IngestResult
ingest(std::istream& in, const IngestOptions& opts = {});

//! Maps a country name or code to ISO alpha-2; nullopt when unresolvable.
std::optional<std::string>
normalize_country(const std::string& raw);

CountryCredit
fractional_credit(const PaperRecord& record);

//! Lowercase, delete non-alphanumeric characters, split on whitespace.
std::vector<std::string>
normalize_tokens(const std::string& text);

enum class TfidfMode
{
  //! max over documents of (count in doc / doc length) * ln(N / df)
  max_document,
  //! (corpus count / corpus tokens) * ln(N / df)
  corpus,
};

struct VocabularyOptions
{
  double tfidf_min = 0.01;
  //! terms need a corpus count strictly greater than this
  long min_count = 10;
  TfidfMode mode = TfidfMode::max_document;
};

struct Vocabulary
{
  std::vector<std::string> terms; // lexicographic
  std::vector<long> df;
  std::vector<long> tf;

  std::size_t size() const { return terms.size(); }
  //! -1 when the term is not in the vocabulary
  int index_of(const std::string& term) const;
};

Vocabulary
build_vocabulary(const std::vector<PaperRecord>& records,
                 const VocabularyOptions& opts = {});

struct Document
{
  std::string id;
  int year = 0;
  std::vector<int> tokens;
  CountryCredit credit;
};

struct TokenizedCorpus
{
  std::vector<std::string> vocab;
  std::vector<Document> docs;
  //! ids of records dropped because no token survived the vocabulary
  std::vector<std::string> excluded;

  std::size_t vocab_size() const { return vocab.size(); }
  std::size_t total_tokens() const;
  //! distinct years in ascending order
  std::vector<int> years() const;
};

TokenizedCorpus
tokenize(const std::vector<PaperRecord>& records, const Vocabulary& vocab);

//! One country row of the collaboration summary table.
struct CollaborationSummary
{
  std::string country;
  double collab_papers = 0.0;
  double total_papers = 0.0;
  double ratio = 0.0;
};

//! Rows sorted by total papers descending, then country code.
std::vector<CollaborationSummary>
collaboration_ratio(const std::vector<PaperRecord>& records);

//! Fractional paper totals per country.
std::map<std::string, double>
country_totals(const std::vector<PaperRecord>& records);

} // namespace natcap::corpus
