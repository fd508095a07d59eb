#include "natcap/pipeline.hpp"
#include "natcap/capability.hpp"
#include "natcap/collaboration.hpp"
#include "natcap/io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace natcap::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// configuration

namespace {

// Reads one typed field, reporting the dotted path on type mismatch.
template<typename T>
void
read_field(const json& obj, const std::string& section, const std::string& key, T& out)
{
  if (!obj.contains(key))
    return;
  const std::string path = section.empty() ? key : section + "." + key;
  const json& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean())
        throw ConfigError(path + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer())
        throw ConfigError(path + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number())
        throw ConfigError(path + ": expected a number");
    } else {
      if (!v.is_string())
        throw ConfigError(path + ": expected a string");
    }
    out = v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void
check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed)
{
  if (!obj.is_object())
    throw ConfigError((section.empty() ? std::string("config") : section) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      ok = ok || key == a;
    if (!ok)
      throw ConfigError("unknown config field: " + (section.empty() ? key : section + "." + key));
  }
}

const json&
section_of(const json& j, const char* name)
{
  static const json empty = json::object();
  return j.contains(name) ? j.at(name) : empty;
}

std::string
ward_name(taxonomy::WardVariant v)
{
  return v == taxonomy::WardVariant::ward_d ? "ward.D" : "ward.D2";
}

void
validate(const RunConfig& c)
{
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.year_min > c.year_max)
    fail("window: first year after last year");
  if (!(c.tfidf_min >= 0.0))
    fail("vocabulary.tfidf_min must be non-negative");
  if (c.min_count < 0)
    fail("vocabulary.min_count must be non-negative");
  if (c.k && *c.k < 2)
    fail("topics.k must be at least 2");
  if (c.k_probe < 2)
    fail("topics.k_probe must be at least 2");
  if (c.w_th < 0)
    fail("topics.w_th must be non-negative");
  if (!(c.search_lo >= 0.0 && c.search_lo < c.search_hi && c.search_hi <= 1.0))
    fail("topics.search_lo/search_hi must satisfy 0 <= lo < hi <= 1");
  if (c.hp.alpha && !(*c.hp.alpha > 0.0))
    fail("topics.alpha must be positive");
  if (!(c.hp.eta > 0.0))
    fail("topics.eta must be positive");
  if (!(c.hp.chain_strength >= 0.0))
    fail("topics.chain_strength must be non-negative");
  if (c.hp.sweeps < 1 || c.hp.burn_in < 0 || c.hp.thin < 1)
    fail("topics.sweeps >= 1, burn_in >= 0 and thin >= 1 are required");
  if (c.hp.burn_in >= c.hp.sweeps)
    fail("topics.burn_in must be smaller than topics.sweeps");
  if (c.n_clusters < 1)
    fail("taxonomy.n_clusters must be positive");
  if (c.k && c.n_clusters > *c.k)
    fail("taxonomy.n_clusters exceeds topics.k");
  if (!(c.min_papers >= 0.0))
    fail("capability.min_papers must be non-negative");
  if (!(c.loess_span > 0.0 && c.loess_span <= 1.0))
    fail("capability.loess_span must lie in (0, 1]");
  if (c.gravity_cluster && (*c.gravity_cluster < 0 || *c.gravity_cluster >= c.n_clusters))
    fail("gravity.cluster must lie in [0, n_clusters)");
  if (!(c.epsilon_w >= 0.0))
    fail("gravity.epsilon_w must be non-negative");
  if (c.threads < 1)
    fail("threads must be positive");
  for (const auto& [name, p] : { std::pair{ "inputs.corpus", &c.corpus },
                                 std::pair{ "inputs.capitals", &c.capitals },
                                 std::pair{ "inputs.labels", &c.labels } })
    if (!p->empty() && !fs::exists(*p))
      fail(std::string(name) + ": no such file: " + p->string());
}

} // namespace

RunConfig
config_from_json(const json& j)
{
  check_keys(j,
             "",
             { "seed", "out_dir", "threads", "verbose", "inputs", "window", "vocabulary", "topics",
               "taxonomy", "capability", "gravity", "synth" });
  RunConfig c;

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  std::string s;
  if (j.contains("out_dir")) {
    read_field(j, "", "out_dir", s);
    c.out_dir = s;
  }
  read_field(j, "", "threads", c.threads);
  read_field(j, "", "verbose", c.verbose);

  const json& in = section_of(j, "inputs");
  check_keys(in, "inputs", { "corpus", "capitals", "labels" });
  for (auto [key, target] : { std::pair{ "corpus", &c.corpus },
                              std::pair{ "capitals", &c.capitals },
                              std::pair{ "labels", &c.labels } }) {
    s.clear();
    read_field(in, "inputs", key, s);
    if (!s.empty())
      *target = s;
  }

  const json& win = section_of(j, "window");
  check_keys(win, "window", { "first", "last" });
  read_field(win, "window", "first", c.year_min);
  read_field(win, "window", "last", c.year_max);

  const json& voc = section_of(j, "vocabulary");
  check_keys(voc, "vocabulary", { "tfidf_min", "min_count", "tfidf_mode" });
  read_field(voc, "vocabulary", "tfidf_min", c.tfidf_min);
  read_field(voc, "vocabulary", "min_count", c.min_count);
  if (voc.contains("tfidf_mode")) {
    s.clear();
    read_field(voc, "vocabulary", "tfidf_mode", s);
    if (s == "max_document")
      c.tfidf_mode = corpus::TfidfMode::max_document;
    else if (s == "corpus")
      c.tfidf_mode = corpus::TfidfMode::corpus;
    else
      throw ConfigError("vocabulary.tfidf_mode: expected \"max_document\" or \"corpus\"");
  }

  const json& top = section_of(j, "topics");
  check_keys(top,
             "topics",
             { "k", "k_probe", "w_th", "search_lo", "search_hi", "alpha", "eta", "chain_strength",
               "sweeps", "burn_in", "thin" });
  if (top.contains("k") && !top["k"].is_null()) {
    int k = 0;
    read_field(top, "topics", "k", k);
    c.k = k;
  }
  read_field(top, "topics", "k_probe", c.k_probe);
  read_field(top, "topics", "w_th", c.w_th);
  read_field(top, "topics", "search_lo", c.search_lo);
  read_field(top, "topics", "search_hi", c.search_hi);
  if (top.contains("alpha") && !top["alpha"].is_null()) {
    double a = 0.0;
    read_field(top, "topics", "alpha", a);
    c.hp.alpha = a;
  }
  read_field(top, "topics", "eta", c.hp.eta);
  read_field(top, "topics", "chain_strength", c.hp.chain_strength);
  read_field(top, "topics", "sweeps", c.hp.sweeps);
  read_field(top, "topics", "burn_in", c.hp.burn_in);
  read_field(top, "topics", "thin", c.hp.thin);

  const json& tax = section_of(j, "taxonomy");
  check_keys(tax, "taxonomy", { "n_clusters", "method" });
  read_field(tax, "taxonomy", "n_clusters", c.n_clusters);
  if (tax.contains("method")) {
    s.clear();
    read_field(tax, "taxonomy", "method", s);
    if (s == "ward.D")
      c.ward = taxonomy::WardVariant::ward_d;
    else if (s == "ward.D2")
      c.ward = taxonomy::WardVariant::ward_d2;
    else
      throw ConfigError("taxonomy.method: expected \"ward.D\" or \"ward.D2\"");
  }

  const json& cap = section_of(j, "capability");
  check_keys(cap, "capability", { "min_papers", "loess_span" });
  read_field(cap, "capability", "min_papers", c.min_papers);
  read_field(cap, "capability", "loess_span", c.loess_span);

  const json& gr = section_of(j, "gravity");
  check_keys(gr, "gravity", { "cluster", "robust_se", "epsilon_w", "capability_distance" });
  if (gr.contains("cluster") && !gr["cluster"].is_null()) {
    int cl = 0;
    read_field(gr, "gravity", "cluster", cl);
    c.gravity_cluster = cl;
  }
  read_field(gr, "gravity", "robust_se", c.robust_se);
  read_field(gr, "gravity", "epsilon_w", c.epsilon_w);
  if (gr.contains("capability_distance")) {
    s.clear();
    read_field(gr, "gravity", "capability_distance", s);
    if (s == "full")
      c.distance_mode = gravity::CapabilityDistanceMode::full;
    else if (s == "leave_one_out")
      c.distance_mode = gravity::CapabilityDistanceMode::leave_one_out;
    else
      throw ConfigError("gravity.capability_distance: expected \"full\" or \"leave_one_out\"");
  }

  if (j.contains("synth")) {
    if (!j["synth"].is_object())
      throw ConfigError("synth: expected an object");
    c.synth = j["synth"];
  }

  validate(c);
  return c;
}

json
config_to_json(const RunConfig& c)
{
  json j;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["out_dir"] = c.out_dir.string();
  j["threads"] = c.threads;
  j["verbose"] = c.verbose;
  j["inputs"] = { { "corpus", c.corpus.string() },
                  { "capitals", c.capitals.string() },
                  { "labels", c.labels.string() } };
  j["window"] = { { "first", c.year_min }, { "last", c.year_max } };
  j["vocabulary"] = { { "tfidf_min", c.tfidf_min },
                      { "min_count", c.min_count },
                      { "tfidf_mode",
                        c.tfidf_mode == corpus::TfidfMode::corpus ? "corpus" : "max_document" } };
  j["topics"] = { { "k", c.k ? json(*c.k) : json(nullptr) },
                  { "k_probe", c.k_probe },
                  { "w_th", c.w_th },
                  { "search_lo", c.search_lo },
                  { "search_hi", c.search_hi },
                  { "alpha", c.hp.alpha ? json(*c.hp.alpha) : json(nullptr) },
                  { "eta", c.hp.eta },
                  { "chain_strength", c.hp.chain_strength },
                  { "sweeps", c.hp.sweeps },
                  { "burn_in", c.hp.burn_in },
                  { "thin", c.hp.thin } };
  j["taxonomy"] = { { "n_clusters", c.n_clusters }, { "method", ward_name(c.ward) } };
  j["capability"] = { { "min_papers", c.min_papers }, { "loess_span", c.loess_span } };
  j["gravity"] = { { "cluster", c.gravity_cluster ? json(*c.gravity_cluster) : json(nullptr) },
                   { "robust_se", c.robust_se },
                   { "epsilon_w", c.epsilon_w },
                   { "capability_distance",
                     c.distance_mode == gravity::CapabilityDistanceMode::full ? "full"
                                                                             : "leave_one_out" } };
  j["synth"] = c.synth;
  return j;
}

RunConfig
load_config_file(const fs::path& path)
{
  if (!fs::exists(path))
    throw ConfigError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(io::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void
configure_logging(bool verbose)
{
  // diagnostics go to stderr so artifacts piped from stdout stay clean
  if (!spdlog::get("natcap"))
    spdlog::set_default_logger(spdlog::stderr_color_mt("natcap"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");
}

fs::path
shipped_capitals_path()
{
  if (const char* env = std::getenv("NATCAP_DATA_DIR"))
    return fs::path(env) / "capitals.csv";
  return fs::path(NATCAP_DATA_DIR) / "capitals.csv";
}

// ---------------------------------------------------------------------------
// artifacts

namespace {

// Tracks the files a stage reads and writes for its manifest.
class Stage
{
public:
  Stage(std::string name, const RunConfig& cfg)
    : name_(std::move(name))
    , cfg_(cfg)
  {}

  fs::path artifact(const std::string& file) const { return cfg_.out_dir / file; }

  //! Resolves an upstream artifact, failing with MissingArtifact.
  fs::path require_path(const fs::path& path)
  {
    if (!fs::exists(path))
      throw MissingArtifact(path);
    inputs_.push_back(path);
    return path;
  }
  fs::path require(const std::string& file) { return require_path(artifact(file)); }

  void write(const std::string& file, const std::string& text)
  {
    const fs::path p = artifact(file);
    io::write_text_file(p, text);
    outputs_.push_back(p);
  }

  void finish() const
  {
    auto entry = [&](const fs::path& p) {
      std::error_code ec;
      auto rel = fs::relative(p, cfg_.out_dir, ec);
      std::string shown =
        (!ec && !rel.empty() && *rel.begin() != "..") ? rel.generic_string() : p.generic_string();
      return json{ { "path", shown }, { "sha256", io::sha256_file(p) } };
    };
    json m;
    m["subcommand"] = name_;
    m["version"] = kVersion;
    m["config"] = config_to_json(cfg_);
    m["config"].erase("out_dir");
    m["config"].erase("verbose");
    m["inputs"] = json::array();
    for (const auto& p : inputs_)
      m["inputs"].push_back(entry(p));
    m["outputs"] = json::array();
    for (const auto& p : outputs_)
      m["outputs"].push_back(entry(p));
    io::write_text_file(artifact(name_ + ".manifest.json"), m.dump(2) + "\n");
  }

  std::uint64_t seed() const
  {
    if (!cfg_.seed)
      throw ConfigError("seed is required (set \"seed\" in the config or pass --seed)");
    return *cfg_.seed;
  }

private:
  std::string name_;
  const RunConfig& cfg_;
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
};

std::string
dump_csv(const std::function<void(io::CsvWriter&)>& body)
{
  std::ostringstream out;
  io::CsvWriter w(out);
  body(w);
  return out.str();
}

// ---- ingest artifacts

std::string
records_jsonl(const std::vector<corpus::PaperRecord>& records)
{
  std::string out;
  for (const auto& r : records) {
    json authors = json::array();
    for (const auto& c : r.author_countries)
      authors.push_back({ { "country", c } });
    json j{ { "id", r.id },         { "year", r.year },       { "title", r.title },
            { "abstract", r.abstract }, { "authors", authors }, { "keywords", r.keywords } };
    out += j.dump() + "\n";
  }
  return out;
}

std::string
documents_jsonl(const corpus::TokenizedCorpus& tc)
{
  std::string out;
  for (const auto& d : tc.docs) {
    json credits = json::object();
    for (const auto& [c, v] : d.credit.credits)
      credits[c] = v;
    out += json{ { "id", d.id }, { "year", d.year }, { "tokens", d.tokens }, { "credits", credits } }
             .dump() +
           "\n";
  }
  return out;
}

corpus::TokenizedCorpus
load_tokenized(const fs::path& vocab_csv, const fs::path& docs_jsonl)
{
  corpus::TokenizedCorpus tc;
  const auto vt = io::read_csv_file(vocab_csv);
  const auto term = vt.column("term");
  for (const auto& row : vt.rows)
    tc.vocab.push_back(row[term]);

  std::ifstream in(docs_jsonl);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty())
      continue;
    try {
      const json j = json::parse(line);
      corpus::Document d;
      d.id = j.at("id").get<std::string>();
      d.year = j.at("year").get<int>();
      d.tokens = j.at("tokens").get<std::vector<int>>();
      d.credit.paper_id = d.id;
      for (const auto& [c, v] : j.at("credits").items())
        d.credit.credits[c] = v.get<double>();
      tc.docs.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw ParseError(n, docs_jsonl.string() + ": " + e.what());
    }
  }
  return tc;
}

// ---- topic-model artifacts

topicmodel::TopicModelState
load_model(const fs::path& path)
{
  std::ifstream in(path);
  return topicmodel::load_checkpoint(in);
}

std::map<int, std::string>
load_labels(const fs::path& path)
{
  std::map<int, std::string> labels;
  json j;
  try {
    j = json::parse(io::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("labels file " + path.string() + ": " + e.what());
  }
  if (!j.is_object())
    throw ConfigError("labels file " + path.string() + ": expected an object of id -> name");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string())
      throw ConfigError("labels file " + path.string() + ": label for " + k + " is not a string");
    try {
      labels[std::stoi(k)] = v.get<std::string>();
    } catch (const std::exception&) {
      throw ConfigError("labels file " + path.string() + ": key " + k + " is not a cluster id");
    }
  }
  return labels;
}

taxonomy::ClusterAssignment
load_clusters(const fs::path& path)
{
  const json j = json::parse(io::read_text_file(path));
  taxonomy::ClusterAssignment a;
  a.n_clusters = j.at("n_clusters").get<int>();
  a.cluster_of = j.at("cluster_of").get<std::vector<int>>();
  for (const auto& [k, v] : j.at("labels").items())
    a.labels[std::stoi(k)] = v.get<std::string>();
  return a;
}

std::string
cluster_name(const taxonomy::ClusterAssignment& a, int c)
{
  auto it = a.labels.find(c);
  return it == a.labels.end() ? std::to_string(c) : it->second;
}

// ---- tensors

capability::CapabilityTensor
load_capability(const fs::path& path, int n_clusters)
{
  const auto t = io::read_csv_file(path);
  const auto cy = t.column("year"), cc = t.column("country"), ck = t.column("cluster"),
             cv = t.column("value");
  std::set<int> years;
  std::set<std::string> countries;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    years.insert(io::parse_int(t.rows[r][cy], r + 2));
    countries.insert(t.rows[r][cc]);
  }
  capability::CapabilityTensor R({ years.begin(), years.end() },
                                 { countries.begin(), countries.end() },
                                 n_clusters);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const int j = io::parse_int(row[ck], r + 2);
    if (j < 0 || j >= n_clusters)
      throw ParseError(r + 2, path.string() + ": cluster id out of range");
    R.at(R.year_index(io::parse_int(row[cy], r + 2)), R.country_index(row[cc]), j) =
      io::parse_double(row[cv], r + 2);
  }
  return R;
}

capability::NrcaTensor
load_nrca(const fs::path& path, int n_clusters)
{
  const auto t = io::read_csv_file(path);
  const auto cy = t.column("year"), cc = t.column("country"), ck = t.column("cluster"),
             cv = t.column("nrca"), cb = t.column("binary");
  std::set<int> years;
  std::set<std::string> countries;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    years.insert(io::parse_int(t.rows[r][cy], r + 2));
    countries.insert(t.rows[r][cc]);
  }
  const std::vector<int> yv(years.begin(), years.end());
  const std::vector<std::string> cv_(countries.begin(), countries.end());
  capability::NrcaTensor n{ capability::Tensor3(yv, cv_, n_clusters),
                            capability::Tensor3(yv, cv_, n_clusters) };
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto ti = n.values.year_index(io::parse_int(row[cy], r + 2));
    const auto ci = n.values.country_index(row[cc]);
    const int j = io::parse_int(row[ck], r + 2);
    if (j < 0 || j >= n_clusters)
      throw ParseError(r + 2, path.string() + ": cluster id out of range");
    n.values.at(ti, ci, j) = io::parse_double(row[cv], r + 2);
    n.binary.at(ti, ci, j) = io::parse_double(row[cb], r + 2);
  }
  return n;
}

collaboration::CollaborationTensor
load_collab(const fs::path& path,
            std::vector<int> years,
            std::vector<std::string> countries,
            int n_clusters)
{
  collaboration::CollaborationTensor W(std::move(years), std::move(countries), n_clusters);
  const auto t = io::read_csv_file(path);
  const auto cy = t.column("year"), ck = t.column("cluster"), cm = t.column("country_m"),
             cn = t.column("country_n"), cw = t.column("weight");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto ti = W.year_index(io::parse_int(row[cy], r + 2));
    const int j = io::parse_int(row[ck], r + 2);
    if (j < 0 || j >= n_clusters)
      throw ParseError(r + 2, path.string() + ": cluster id out of range");
    const auto m = W.country_index(row[cm]), n = W.country_index(row[cn]);
    const double w = io::parse_double(row[cw], r + 2);
    W.matrix(ti, j)(m, n) = w;
    W.matrix(ti, j)(n, m) = w;
  }
  return W;
}

// Papers with tokens, their credits, and posterior topic mixtures.
std::vector<capability::PaperContribution>
contributions(const corpus::TokenizedCorpus& tc, const topicmodel::TopicModelState& model)
{
  std::vector<capability::PaperContribution> out;
  out.reserve(tc.docs.size());
  for (const auto& d : tc.docs)
    out.push_back({ d.id, d.year, d.credit, topicmodel::doc_topic_distribution(model, d.id) });
  return out;
}

// ---------------------------------------------------------------------------
// stages

void
stage_synth(const RunConfig& cfg)
{
  Stage st("synth", cfg);
  json spec_json = cfg.synth;
  if (!spec_json.contains("seed"))
    spec_json["seed"] = st.seed();
  synth::SynthSpec spec;
  try {
    spec = synth::spec_from_json(spec_json);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("synth: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth: ") + e.what());
  }
  const auto sc = synth::generate_corpus(spec);
  st.write("corpus.jsonl", synth::to_jsonl(sc.records));
  st.write("capitals.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "code", "lat", "lon" });
             for (const auto& [code, c] : sc.capitals.entries())
               w.field(code).field(c.lat).field(c.lon).end_row();
           }));
  st.write("ground_truth.json", synth::ground_truth_json(spec, sc).dump(2) + "\n");
  st.finish();
  spdlog::info("synth: {} papers, {} countries, {} planted topics",
               sc.records.size(),
               sc.countries.size(),
               spec.n_topics);
}

void
stage_ingest(const RunConfig& cfg)
{
  Stage st("ingest", cfg);
  const fs::path src = st.require_path(cfg.corpus.empty() ? st.artifact("corpus.jsonl") : cfg.corpus);
  std::ifstream in(src);
  const auto result = corpus::ingest(in, { cfg.year_min, cfg.year_max });
  if (result.records.empty())
    throw EmptyCorpusError("no valid records in " + src.string());

  corpus::VocabularyOptions vo{ cfg.tfidf_min, cfg.min_count, cfg.tfidf_mode };
  const auto vocab = corpus::build_vocabulary(result.records, vo);
  const auto tc = corpus::tokenize(result.records, vocab);

  st.write("records.jsonl", records_jsonl(result.records));
  std::string rejects;
  for (const auto& r : result.rejects)
    rejects += json{ { "line", r.line }, { "id", r.id }, { "reason", r.reason } }.dump() + "\n";
  st.write("rejects.jsonl", rejects);
  st.write("vocabulary.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "term", "df", "tf" });
             for (std::size_t i = 0; i < vocab.size(); ++i)
               w.field(vocab.terms[i]).field(vocab.df[i]).field(vocab.tf[i]).end_row();
           }));
  st.write("documents.jsonl", documents_jsonl(tc));
  st.write("collaboration_ratio.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "country", "collaborative", "total", "ratio" });
             for (const auto& s : corpus::collaboration_ratio(result.records))
               w.field(s.country).field(s.collab_papers).field(s.total_papers).field(s.ratio).end_row();
           }));
  st.finish();
  spdlog::info("ingest: {} records kept, {} rejected, {} terms, {} documents with tokens",
               result.records.size(),
               result.rejects.size(),
               vocab.size(),
               tc.docs.size());
}

void
stage_select_k(const RunConfig& cfg)
{
  Stage st("select-k", cfg);
  const auto tc = load_tokenized(st.require("vocabulary.csv"), st.require("documents.jsonl"));
  topicmodel::SelectOptions so;
  so.k_probe = cfg.k_probe;
  so.w_th = cfg.w_th;
  so.search_lo = cfg.search_lo;
  so.search_hi = cfg.search_hi;
  const auto sel = topicmodel::select_num_topics(tc, so, cfg.hp, st.seed());

  st.write("select_k.json",
           json{ { "K", sel.K },
                 { "cutoff", sel.cutoff },
                 { "bandwidth", sel.bandwidth },
                 { "k_probe", cfg.k_probe },
                 { "w_th", cfg.w_th } }
               .dump(2) +
             "\n");
  st.write("topic_usage.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "topic", "n_docs", "n_long", "p" });
             for (const auto& u : sel.profile)
               w.field(u.topic).field(u.n_docs).field(u.n_long).field(u.p).end_row();
           }));
  st.finish();
  spdlog::info("select-k: K = {} (cutoff {:.4f}, bandwidth {:.4f})", sel.K, sel.cutoff, sel.bandwidth);
}

void
stage_fit(const RunConfig& cfg)
{
  Stage st("fit", cfg);
  const auto tc = load_tokenized(st.require("vocabulary.csv"), st.require("documents.jsonl"));
  int K = 0;
  if (cfg.k) {
    K = *cfg.k;
  } else {
    const json sel = json::parse(io::read_text_file(st.require("select_k.json")));
    K = sel.at("K").get<int>();
  }
  const auto model = topicmodel::fit_dynamic(tc, K, cfg.hp, st.seed());

  std::ostringstream ckpt;
  topicmodel::save_checkpoint(model, ckpt);
  st.write("model.json", ckpt.str());

  const std::size_t last = model.epochs.size() - 1;
  const Eigen::MatrixXd& beta = model.beta[last];
  st.write("top_words.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "year", "topic", "rank", "word", "probability" });
             for (int k = 0; k < K; ++k) {
               const auto words = topicmodel::top_words(model, last, k, 10);
               for (std::size_t r = 0; r < words.size(); ++r) {
                 const int v = static_cast<int>(
                   std::find(model.vocab.begin(), model.vocab.end(), words[r]) - model.vocab.begin());
                 w.field(model.epochs[last]).field(k).field(static_cast<int>(r + 1)).field(words[r]);
                 w.field(beta(k, v)).end_row();
               }
             }
           }));
  st.finish();
  spdlog::info("fit: K = {}, {} epochs ({}-{})", K, model.epochs.size(), model.epochs.front(), model.epochs.back());
}

void
stage_cluster_topics(const RunConfig& cfg)
{
  Stage st("cluster-topics", cfg);
  const auto model = load_model(st.require("model.json"));
  if (cfg.n_clusters > model.K)
    throw ConfigError("taxonomy.n_clusters (" + std::to_string(cfg.n_clusters) +
                      ") exceeds the number of topics (" + std::to_string(model.K) + ")");
  const auto D = taxonomy::topic_distance_matrix(model);
  const auto tree = taxonomy::ward_cluster(D, cfg.ward);
  auto clusters = taxonomy::cut_tree(tree, cfg.n_clusters);
  if (!cfg.labels.empty())
    clusters.labels = load_labels(st.require_path(cfg.labels));

  json labels = json::object();
  for (const auto& [k, v] : clusters.labels)
    labels[std::to_string(k)] = v;
  json members = json::array();
  for (int c = 0; c < clusters.n_clusters; ++c)
    members.push_back(clusters.members(c));

  st.write("dendrogram.json", taxonomy::to_json(tree));
  st.write("dendrogram.nwk", taxonomy::to_newick(tree) + "\n");
  st.write("clusters.json",
           json{ { "n_clusters", clusters.n_clusters },
                 { "method", ward_name(cfg.ward) },
                 { "year", model.epochs.back() },
                 { "cluster_of", clusters.cluster_of },
                 { "members", members },
                 { "labels", labels } }
               .dump(2) +
             "\n");
  st.finish();
  spdlog::info("cluster-topics: {} topics into {} clusters", model.K, clusters.n_clusters);
}

void
stage_capability(const RunConfig& cfg)
{
  Stage st("capability", cfg);
  const auto tc = load_tokenized(st.require("vocabulary.csv"), st.require("documents.jsonl"));
  const auto model = load_model(st.require("model.json"));
  const auto clusters = load_clusters(st.require("clusters.json"));
  const auto R = capability::build_capability(contributions(tc, model), clusters);

  st.write("capability.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "year", "country", "cluster", "value" });
             for (std::size_t t = 0; t < R.years().size(); ++t)
               for (std::size_t i = 0; i < R.countries().size(); ++i)
                 for (int j = 0; j < R.n_clusters(); ++j)
                   w.field(R.years()[t]).field(R.countries()[i]).field(j).field(R.at(t, i, j)).end_row();
           }));
  st.finish();
  spdlog::info("capability: {} years x {} countries x {} clusters",
               R.years().size(),
               R.countries().size(),
               R.n_clusters());
}

void
stage_nrca(const RunConfig& cfg)
{
  Stage st("nrca", cfg);
  const auto clusters = load_clusters(st.require("clusters.json"));
  const auto R = load_capability(st.require("capability.csv"), clusters.n_clusters);
  const auto N = capability::nrca(R);

  st.write("nrca.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "year", "country", "cluster", "nrca", "binary" });
             const auto& V = N.values;
             for (std::size_t t = 0; t < V.years().size(); ++t)
               for (std::size_t i = 0; i < V.countries().size(); ++i)
                 for (int j = 0; j < V.n_clusters(); ++j)
                   w.field(V.years()[t])
                     .field(V.countries()[i])
                     .field(j)
                     .field(V.at(t, i, j))
                     .field(static_cast<int>(N.binary.at(t, i, j)))
                     .end_row();
           }));
  st.finish();
  spdlog::info("nrca: {} years", N.values.years().size());
}

void
stage_collab(const RunConfig& cfg)
{
  Stage st("collab", cfg);
  const auto tc = load_tokenized(st.require("vocabulary.csv"), st.require("documents.jsonl"));
  const auto model = load_model(st.require("model.json"));
  const auto clusters = load_clusters(st.require("clusters.json"));

  std::vector<collaboration::PaperCollab> papers;
  papers.reserve(tc.docs.size());
  for (const auto& d : tc.docs)
    papers.push_back(
      { d.year, d.credit, capability::cluster_weights(topicmodel::doc_topic_distribution(model, d.id), clusters) });
  const auto W = collaboration::build_collab_tensor(papers, clusters.n_clusters);

  st.write("collaboration.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "year", "cluster", "country_m", "country_n", "weight" });
             const auto& cs = W.countries();
             for (std::size_t t = 0; t < W.years().size(); ++t)
               for (int j = 0; j < W.n_clusters(); ++j) {
                 const auto& M = W.matrix(t, j);
                 for (std::size_t a = 0; a < cs.size(); ++a)
                   for (std::size_t b = a + 1; b < cs.size(); ++b)
                     if (M(a, b) > 0.0)
                       w.field(W.years()[t]).field(j).field(cs[a]).field(cs[b]).field(M(a, b)).end_row();
               }
           }));
  st.finish();
  spdlog::info("collab: {} years, {} countries", W.years().size(), W.countries().size());
}

std::map<std::string, double>
totals_from_ratio_table(const fs::path& path)
{
  const auto t = io::read_csv_file(path);
  const auto cc = t.column("country"), ct = t.column("total");
  std::map<std::string, double> totals;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    totals[t.rows[r][cc]] = io::parse_double(t.rows[r][ct], r + 2);
  return totals;
}

void
stage_gravity(const RunConfig& cfg)
{
  Stage st("gravity", cfg);
  const auto clusters = load_clusters(st.require("clusters.json"));
  const int J = clusters.n_clusters;
  const auto R = load_capability(st.require("capability.csv"), J);
  const auto N = load_nrca(st.require("nrca.csv"), J);
  const auto W = load_collab(st.require("collaboration.csv"), R.years(), R.countries(), J);
  const auto totals = totals_from_ratio_table(st.require("collaboration_ratio.csv"));

  fs::path cap_path = cfg.capitals;
  if (cap_path.empty())
    cap_path = fs::exists(st.artifact("capitals.csv")) ? st.artifact("capitals.csv") : shipped_capitals_path();
  const auto capitals = gravity::CapitalTable::load_file(st.require_path(cap_path).string());

  gravity::ObservationOptions oo;
  oo.epsilon_w = cfg.epsilon_w;
  oo.distance_mode = cfg.distance_mode;
  for (const auto& c : capability::country_filter(totals, cfg.min_papers))
    if (std::find(R.countries().begin(), R.countries().end(), c) != R.countries().end())
      oo.countries.push_back(c);
  if (oo.countries.size() < 2)
    throw PreconditionError("fewer than two countries pass the min_papers filter");
  const auto obs = gravity::build_observations(W, R, N, capitals, oo);

  std::vector<int> which;
  if (cfg.gravity_cluster) {
    if (*cfg.gravity_cluster >= J)
      throw ConfigError("gravity.cluster out of range");
    which.push_back(*cfg.gravity_cluster);
  } else {
    for (int j = 0; j < J; ++j)
      which.push_back(j);
  }

  gravity::FitOptions fo;
  fo.covariance = cfg.robust_se ? gravity::CovarianceType::hc1 : gravity::CovarianceType::classical;
  fo.epsilon_w = cfg.epsilon_w;

  // one regression per cluster; independent, so fan out over threads
  std::vector<gravity::RegressionResult> results(which.size());
  std::vector<std::exception_ptr> errors(which.size());
  {
    const std::size_t n_threads = std::min<std::size_t>(cfg.threads, which.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < which.size(); i += n_threads) {
          try {
            results[i] = gravity::fit_ols_fixed_effects(obs, which[i], fo);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);

  std::vector<std::string> names;
  for (int j : which)
    names.push_back(cluster_name(clusters, j));

  st.write("gravity_observations.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "year", "cluster", "country_m", "country_n", "w", "p_m", "p_n", "d", "c" });
             for (const auto& o : obs)
               w.field(o.year)
                 .field(o.cluster)
                 .field(o.country_m)
                 .field(o.country_n)
                 .field(o.w)
                 .field(o.p_m)
                 .field(o.p_n)
                 .field(o.d)
                 .field(o.c)
                 .end_row();
           }));
  st.write("gravity.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "cluster", "label", "variable", "estimate", "std_error", "p_value", "stars",
                     "observations", "r_squared" });
             for (std::size_t i = 0; i < results.size(); ++i) {
               const auto& r = results[i];
               auto emit = [&](const gravity::Coefficient& c) {
                 w.field(r.cluster).field(names[i]).field(c.name).field(c.estimate).field(c.std_error);
                 w.field(c.p_value).field(c.stars()).field(r.n_obs).field(r.r_squared).end_row();
               };
               for (const auto& c : r.coefficients)
                 emit(c);
               emit(r.intercept);
             }
           }));
  st.write("gravity_table.txt", gravity::format_table(results, names));
  st.finish();
  spdlog::info("gravity: {} observations, {} regressions over {} countries",
               obs.size(),
               results.size(),
               oo.countries.size());
}

void
stage_report(const RunConfig& cfg)
{
  Stage st("report", cfg);
  const auto ratio = io::read_csv_file(st.require("collaboration_ratio.csv"));
  const auto clusters = load_clusters(st.require("clusters.json"));
  const auto N = load_nrca(st.require("nrca.csv"), clusters.n_clusters);
  const auto grav = io::read_csv_file(st.require("gravity.csv"));

  const auto totals = totals_from_ratio_table(st.artifact("collaboration_ratio.csv"));
  const auto leaders = capability::country_filter(totals, cfg.min_papers);
  const std::set<std::string> leader_set(leaders.begin(), leaders.end());

  st.write("report/table1.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "country", "collaborative", "total", "ratio" });
             const auto cc = ratio.column("country");
             for (const auto& row : ratio.rows)
               if (leader_set.count(row[cc]))
                 w.row({ row[cc], row[ratio.column("collaborative")], row[ratio.column("total")],
                         row[ratio.column("ratio")] });
           }));

  st.write("report/table2.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "cluster", "variable", "coefficient", "std_error", "stars", "observations",
                     "r_squared" });
             for (const auto& row : grav.rows)
               w.row({ row[grav.column("label")], row[grav.column("variable")],
                       row[grav.column("estimate")], row[grav.column("std_error")],
                       row[grav.column("stars")], row[grav.column("observations")],
                       row[grav.column("r_squared")] });
           }));

  std::vector<std::string> shown;
  for (const auto& c : leaders)
    if (std::find(N.values.countries().begin(), N.values.countries().end(), c) != N.values.countries().end())
      shown.push_back(c);
  std::sort(shown.begin(), shown.end());

  st.write("report/fig3.csv", dump_csv([&](io::CsvWriter& w) {
             w.row({ "year", "country", "cluster", "rank", "smoothed_rank" });
             for (int j = 0; j < clusters.n_clusters; ++j) {
               const auto rows = capability::rank_series(N, j, shown);
               for (const auto& country : shown) {
                 std::vector<double> x, y;
                 std::vector<const capability::RankRow*> mine;
                 for (const auto& r : rows)
                   if (r.country == country) {
                     mine.push_back(&r);
                     x.push_back(r.year);
                     y.push_back(r.rank);
                   }
                 const auto smooth = capability::loess_smooth(x, y, cfg.loess_span);
                 for (std::size_t i = 0; i < mine.size(); ++i)
                   w.field(mine[i]->year)
                     .field(country)
                     .field(cluster_name(clusters, j))
                     .field(mine[i]->rank)
                     .field(smooth[i])
                     .end_row();
               }
             }
           }));
  st.finish();
  spdlog::info("report: {} leading countries", leaders.size());
}

using StageFn = void (*)(const RunConfig&);

const std::vector<std::pair<std::string, StageFn>>&
stage_table()
{
  static const std::vector<std::pair<std::string, StageFn>> table = {
    { "synth", stage_synth },
    { "ingest", stage_ingest },
    { "select-k", stage_select_k },
    { "fit", stage_fit },
    { "cluster-topics", stage_cluster_topics },
    { "capability", stage_capability },
    { "nrca", stage_nrca },
    { "collab", stage_collab },
    { "gravity", stage_gravity },
    { "report", stage_report },
  };
  return table;
}

} // namespace

const std::vector<std::string>&
subcommands()
{
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, _] : stage_table())
      v.push_back(n);
    return v;
  }();
  return names;
}

void
run_stage(const std::string& name, const RunConfig& cfg)
{
  for (const auto& [n, fn] : stage_table())
    if (n == name) {
      validate(cfg);
      fn(cfg);
      return;
    }
  throw ConfigError("unknown subcommand: " + name);
}

int
run_subcommand(const std::string& name, const RunConfig& cfg)
{
  try {
    run_stage(name, cfg);
    return kOk;
  } catch (const MissingArtifact& e) {
    spdlog::error("{}: {} (run the upstream stage first)", name, e.what());
    return kMissingDependency;
  } catch (const NumericalError& e) {
    spdlog::error("{}: numerical failure: {}", name, e.what());
    return kNumericalFailure;
  } catch (const Error& e) {
    // configuration, precondition, parse and lookup problems
    spdlog::error("{}: {}", name, e.what());
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("{}: malformed artifact: {}", name, e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", name, e.what());
    return kNumericalFailure;
  }
}

} // namespace natcap::pipeline
