#include "natcap/corpus.hpp"
#include "natcap/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <set>
#include <unordered_map>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace natcap::corpus {

using nlohmann::json;

namespace {

std::string
fold_name(const std::string& raw)
{
  std::string out;
  for (unsigned char ch : raw) {
    if (std::isalnum(ch))
      out.push_back(static_cast<char>(std::tolower(ch)));
  }
  return out;
}

// Keys are folded names (lowercase, alphanumerics only).
const std::unordered_map<std::string, std::string>&
alias_table()
{
  static const std::unordered_map<std::string, std::string> table = {
    { "unitedstates", "US" },
    { "unitedstatesofamerica", "US" },
    { "usa", "US" },
    { "america", "US" },
    { "japan", "JP" },
    { "jpn", "JP" },
    { "china", "CN" },
    { "peoplesrepublicofchina", "CN" },
    { "prchina", "CN" },
    { "chn", "CN" },
    { "germany", "DE" },
    { "deu", "DE" },
    { "unitedkingdom", "GB" },
    { "uk", "GB" },
    { "greatbritain", "GB" },
    { "england", "GB" },
    { "scotland", "GB" },
    { "wales", "GB" },
    { "gbr", "GB" },
    { "russia", "RU" },
    { "russianfederation", "RU" },
    { "rus", "RU" },
    { "ussr", "RU" },
    { "sovietunion", "RU" },
    { "france", "FR" },
    { "fra", "FR" },
    { "italy", "IT" },
    { "ita", "IT" },
    { "republicofkorea", "KR" },
    { "southkorea", "KR" },
    { "korea", "KR" },
    { "kor", "KR" },
    { "switzerland", "CH" },
    { "che", "CH" },
    { "india", "IN" },
    { "ind", "IN" },
    { "sweden", "SE" },
    { "swe", "SE" },
    { "canada", "CA" },
    { "can", "CA" },
    { "netherlands", "NL" },
    { "thenetherlands", "NL" },
    { "holland", "NL" },
    { "nld", "NL" },
    { "spain", "ES" },
    { "portugal", "PT" },
    { "belgium", "BE" },
    { "austria", "AT" },
    { "poland", "PL" },
    { "czechrepublic", "CZ" },
    { "czechia", "CZ" },
    { "ukraine", "UA" },
    { "brazil", "BR" },
    { "australia", "AU" },
    { "denmark", "DK" },
    { "finland", "FI" },
    { "norway", "NO" },
    { "ireland", "IE" },
    { "hungary", "HU" },
    { "greece", "GR" },
    { "israel", "IL" },
    { "iran", "IR" },
    { "islamicrepublicofiran", "IR" },
    { "taiwan", "TW" },
    { "mexico", "MX" },
    { "argentina", "AR" },
    { "egypt", "EG" },
    { "turkey", "TR" },
    { "slovenia", "SI" },
    { "slovakia", "SK" },
    { "romania", "RO" },
    { "bulgaria", "BG" },
    { "latvia", "LV" },
    { "croatia", "HR" },
    { "pakistan", "PK" },
    { "singapore", "SG" },
    { "newzealand", "NZ" },
    { "southafrica", "ZA" },
    { "malaysia", "MY" },
    { "thailand", "TH" },
    { "kazakhstan", "KZ" },
    { "chile", "CL" },
    { "colombia", "CO" },
    { "vietnam", "VN" },
    { "indonesia", "ID" },
    { "saudiarabia", "SA" },
    { "uzbekistan", "UZ" },
    { "georgia", "GE" },
    { "belarus", "BY" },
    { "estonia", "EE" },
    { "lithuania", "LT" },
    { "luxembourg", "LU" },
    { "serbia", "RS" },
    { "algeria", "DZ" },
    { "iraq", "IQ" },
    { "bangladesh", "BD" },
    { "nepal", "NP" },
    { "venezuela", "VE" },
    { "cuba", "CU" },
  };
  return table;
}

std::optional<int>
read_year(const json& j)
{
  if (j.is_number_integer())
    return j.get<int>();
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (std::floor(v) == v)
      return static_cast<int>(v);
    return std::nullopt;
  }
  if (j.is_string()) {
    try {
      std::size_t pos = 0;
      int v = std::stoi(j.get<std::string>(), &pos);
      if (pos == j.get<std::string>().size())
        return v;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

// First affiliation wins: either {"country": ...} or
// {"affiliations": [{"country": ...}, ...]}.
std::optional<std::string>
author_country_field(const json& author)
{
  if (!author.is_object())
    return std::nullopt;
  auto it = author.find("country");
  if (it != author.end() && it->is_string())
    return it->get<std::string>();
  auto aff = author.find("affiliations");
  if (aff != author.end() && aff->is_array() && !aff->empty()) {
    const json& first = aff->front();
    if (first.is_object() && first.contains("country") &&
        first["country"].is_string())
      return first["country"].get<std::string>();
    if (first.is_string())
      return first.get<std::string>();
  }
  return std::nullopt;
}

std::string
string_field(const json& obj, const char* key)
{
  auto it = obj.find(key);
  if (it != obj.end() && it->is_string())
    return it->get<std::string>();
  return {};
}

} // namespace

std::optional<std::string>
normalize_country(const std::string& raw)
{
  std::string folded = fold_name(raw);
  if (folded.empty())
    return std::nullopt;
  const auto& table = alias_table();
  if (auto it = table.find(folded); it != table.end())
    return it->second;
  if (folded.size() == 2 && std::isalpha(static_cast<unsigned char>(folded[0])) &&
      std::isalpha(static_cast<unsigned char>(folded[1]))) {
    std::string code = folded;
    for (auto& ch : code)
      ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return code;
  }
  return std::nullopt;
}

IngestResult
ingest(std::istream& in, const IngestOptions& opts)
{
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t non_blank = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) {
          return std::isspace(c);
        }))
      continue;
    ++non_blank;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    if (!j.is_object())
      throw ParseError(line_no, "record is not a JSON object");

    PaperRecord rec;
    rec.id = string_field(j, "id");
    if (rec.id.empty() && j.contains("id") && j["id"].is_number_integer())
      rec.id = std::to_string(j["id"].get<long long>());
    auto reject = [&](const char* reason) {
      result.rejects.push_back({ line_no, rec.id, reason });
    };

    if (rec.id.empty()) {
      reject("missing_id");
      continue;
    }
    if (!j.contains("year")) {
      reject("missing_year");
      continue;
    }
    auto year = read_year(j["year"]);
    if (!year) {
      reject("invalid_year");
      continue;
    }
    rec.year = *year;
    if (rec.year < opts.year_min || rec.year > opts.year_max) {
      reject("year_out_of_window");
      continue;
    }

    auto authors = j.find("authors");
    if (authors == j.end() || !authors->is_array() || authors->empty()) {
      reject("missing_authors");
      continue;
    }
    bool bad_country = false;
    for (const auto& author : *authors) {
      auto raw = author_country_field(author);
      if (!raw) {
        reject("missing_author_country");
        bad_country = true;
        break;
      }
      auto code = normalize_country(*raw);
      if (!code) {
        reject("unknown_country");
        bad_country = true;
        break;
      }
      rec.author_countries.push_back(*code);
    }
    if (bad_country)
      continue;

    rec.title = string_field(j, "title");
    rec.abstract = string_field(j, "abstract");
    if (auto kw = j.find("keywords"); kw != j.end() && kw->is_array()) {
      for (const auto& k : *kw)
        if (k.is_string())
          rec.keywords.push_back(k.get<std::string>());
    }
    result.records.push_back(std::move(rec));
  }

  if (non_blank == 0)
    throw EmptyCorpusError("input contains no records");
  return result;
}

CountryCredit
fractional_credit(const PaperRecord& record)
{
  if (record.author_countries.empty())
    throw PreconditionError("paper " + record.id + " has no author countries");
  std::map<std::string, std::size_t> counts;
  for (const auto& c : record.author_countries)
    ++counts[c];
  const double n = static_cast<double>(record.author_countries.size());
  CountryCredit credit{ record.id, {} };
  for (const auto& [country, k] : counts)
    credit.credits[country] = static_cast<double>(k) / n;
  return credit;
}

std::vector<std::string>
normalize_tokens(const std::string& text)
{
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char ch : text) {
    if (std::isspace(ch)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else if (ch < 0x80 && std::isalnum(ch)) {
      current.push_back(static_cast<char>(std::tolower(ch)));
    }
  }
  if (!current.empty())
    tokens.push_back(std::move(current));
  return tokens;
}

int
Vocabulary::index_of(const std::string& term) const
{
  auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term)
    return -1;
  return static_cast<int>(it - terms.begin());
}

Vocabulary
build_vocabulary(const std::vector<PaperRecord>& records,
                 const VocabularyOptions& opts)
{
  if (opts.tfidf_min < 0.0 || opts.min_count < 0)
    throw PreconditionError("vocabulary thresholds must be non-negative");

  struct Stats
  {
    long tf = 0;
    long df = 0;
    double max_doc_tf = 0.0;
  };
  // std::map keeps the lexicographic order the vocabulary promises.
  std::map<std::string, Stats> stats;
  long total_tokens = 0;
  std::size_t n_docs = 0;

  for (const auto& rec : records) {
    auto tokens = normalize_tokens(rec.abstract);
    if (tokens.empty())
      continue;
    ++n_docs;
    total_tokens += static_cast<long>(tokens.size());
    std::map<std::string, long> local;
    for (auto& t : tokens)
      ++local[t];
    const double len = static_cast<double>(tokens.size());
    for (const auto& [term, count] : local) {
      auto& s = stats[term];
      s.tf += count;
      s.df += 1;
      s.max_doc_tf = std::max(s.max_doc_tf, static_cast<double>(count) / len);
    }
  }
  if (n_docs == 0)
    throw EmptyCorpusError("no record has abstract text");

  Vocabulary vocab;
  const double n = static_cast<double>(n_docs);
  for (const auto& [term, s] : stats) {
    const double idf = std::log(n / static_cast<double>(s.df));
    const double tf = opts.mode == TfidfMode::corpus
                        ? static_cast<double>(s.tf) / static_cast<double>(total_tokens)
                        : s.max_doc_tf;
    if (tf * idf < opts.tfidf_min || s.tf <= opts.min_count)
      continue;
    vocab.terms.push_back(term);
    vocab.df.push_back(s.df);
    vocab.tf.push_back(s.tf);
  }
  if (vocab.terms.empty())
    throw EmptyVocabularyError("every term was filtered out");
  return vocab;
}

std::size_t
TokenizedCorpus::total_tokens() const
{
  std::size_t n = 0;
  for (const auto& d : docs)
    n += d.tokens.size();
  return n;
}

std::vector<int>
TokenizedCorpus::years() const
{
  std::set<int> ys;
  for (const auto& d : docs)
    ys.insert(d.year);
  return { ys.begin(), ys.end() };
}

TokenizedCorpus
tokenize(const std::vector<PaperRecord>& records, const Vocabulary& vocab)
{
  TokenizedCorpus out;
  out.vocab = vocab.terms;
  for (const auto& rec : records) {
    Document doc;
    doc.id = rec.id;
    doc.year = rec.year;
    for (const auto& t : normalize_tokens(rec.abstract)) {
      int idx = vocab.index_of(t);
      if (idx >= 0)
        doc.tokens.push_back(idx);
    }
    if (doc.tokens.empty()) {
      spdlog::info("excluding paper {}: no in-vocabulary tokens", rec.id);
      out.excluded.push_back(rec.id);
      continue;
    }
    doc.credit = fractional_credit(rec);
    out.docs.push_back(std::move(doc));
  }
  return out;
}

std::map<std::string, double>
country_totals(const std::vector<PaperRecord>& records)
{
  std::map<std::string, double> totals;
  for (const auto& rec : records)
    for (const auto& [country, share] : fractional_credit(rec).credits)
      totals[country] += share;
  return totals;
}

std::vector<CollaborationSummary>
collaboration_ratio(const std::vector<PaperRecord>& records)
{
  std::map<std::string, CollaborationSummary> rows;
  for (const auto& rec : records) {
    auto credit = fractional_credit(rec);
    const bool collaborative = credit.credits.size() >= 2;
    for (const auto& [country, share] : credit.credits) {
      auto& row = rows[country];
      row.country = country;
      row.total_papers += share;
      if (collaborative)
        row.collab_papers += share;
    }
  }
  std::vector<CollaborationSummary> out;
  for (auto& [_, row] : rows) {
    if (row.total_papers <= 0.0)
      continue;
    row.ratio = row.collab_papers / row.total_papers;
    out.push_back(row);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.total_papers > b.total_papers;
  });
  return out;
}

} // namespace natcap::corpus
