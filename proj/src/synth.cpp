#include "natcap/synth.hpp"
#include "natcap/errors.hpp"
#include "natcap/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace natcap::synth {

using nlohmann::json;

const std::vector<std::string>&
country_codes()
{
  static const std::vector<std::string> codes = {
    "US", "JP", "CN", "DE", "GB", "RU", "FR", "IT", "KR", "CH", "IN", "SE", "CA", "NL",
    "ES", "PT", "BE", "AT", "PL", "CZ", "UA", "BR", "AU", "DK", "FI", "NO", "IE", "HU",
    "GR", "IL", "IR", "TW", "MX", "AR", "EG", "TR", "SI", "SK", "RO", "BG", "LV", "HR",
    "PK", "SG", "NZ", "ZA", "MY", "TH", "KZ", "CL", "CO", "VN", "ID", "SA", "UZ", "GE",
    "BY", "EE", "LT", "LU", "RS", "DZ", "IQ", "BD", "NP", "VE", "CU", "PE", "MA", "TN",
    "NG", "KE", "PH", "IS", "CY", "MT", "UY", "EC", "JO", "LB",
  };
  return codes;
}

gravity::CapitalTable
ring_capitals(const std::vector<std::string>& countries)
{
  gravity::CapitalTable table;
  const double n = static_cast<double>(countries.size());
  for (std::size_t i = 0; i < countries.size(); ++i) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
    // the index-dependent drift breaks the ring's mirror symmetry
    const double drift = static_cast<double>(i);
    table.set(countries[i], { 20.0 + 30.0 * std::sin(theta) + 0.17 * drift, 85.0 * std::cos(theta) + 0.6 * drift });
  }
  return table;
}

std::string
word_name(int index, int vocab_size)
{
  int width = 3;
  for (int v = std::max(vocab_size - 1, 1); v >= 1000; v /= 10)
    ++width;
  std::string digits = std::to_string(index);
  return "w" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') +
         digits;
}

namespace {

std::vector<int>
resolved_topic_cluster(const SynthSpec& spec)
{
  if (!spec.topic_cluster.empty())
    return spec.topic_cluster;
  std::vector<int> tc(spec.n_topics);
  for (int k = 0; k < spec.n_topics; ++k)
    tc[k] = k * spec.n_clusters / spec.n_topics;
  return tc;
}

} // namespace

void
validate(const SynthSpec& spec)
{
  if (spec.n_countries < 1 || spec.n_topics < 1 || spec.n_clusters < 1 || spec.docs_per_year < 1 ||
      spec.vocab_size < 1)
    throw PreconditionError("synth counts must be positive");
  if (static_cast<std::size_t>(spec.n_countries) > country_codes().size())
    throw PreconditionError("at most " + std::to_string(country_codes().size()) + " synthetic countries");
  if (spec.vocab_size < 2 * spec.n_topics)
    throw PreconditionError("vocabulary must hold at least two words per topic");
  if (spec.n_clusters > spec.n_topics)
    throw PreconditionError("more clusters than topics");
  if (spec.year_last < spec.year_first)
    throw PreconditionError("year_last precedes year_first");
  if (!(spec.doc_length_mean > 0.0) || !(spec.doc_length_dispersion > 0.0))
    throw PreconditionError("document length parameters must be positive");
  if (!spec.topic_usage.empty()) {
    if (static_cast<int>(spec.topic_usage.size()) != spec.n_topics)
      throw PreconditionError("topic_usage needs one weight per topic");
    for (double u : spec.topic_usage)
      if (!(u > 0.0))
        throw PreconditionError("topic usage weights must be positive");
  }
  if (!spec.topic_length_mean.empty()) {
    if (static_cast<int>(spec.topic_length_mean.size()) != spec.n_topics)
      throw PreconditionError("topic_length_mean needs one value per topic");
    for (double m : spec.topic_length_mean)
      if (!(m > 0.0))
        throw PreconditionError("topic length means must be positive");
  }
  if (!spec.topic_cluster.empty()) {
    if (static_cast<int>(spec.topic_cluster.size()) != spec.n_topics)
      throw PreconditionError("topic_cluster needs one entry per topic");
    std::vector<int> seen(spec.n_clusters, 0);
    for (int c : spec.topic_cluster) {
      if (c < 0 || c >= spec.n_clusters)
        throw PreconditionError("topic_cluster entry out of range");
      seen[c] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw PreconditionError("every cluster needs at least one topic");
  }
  if (!(spec.topic_purity > 0.0 && spec.topic_purity <= 1.0) || !(spec.doc_concentration > 0.0))
    throw PreconditionError("topic purity must lie in (0, 1] and concentration be positive");
  if (!(spec.block_mass > 0.0 && spec.block_mass <= 1.0) ||
      !(spec.cluster_shared >= 0.0 && spec.cluster_shared < 1.0))
    throw PreconditionError("block_mass in (0, 1], cluster_shared in [0, 1) required");
  if (!(spec.collab_prob >= 0.0 && spec.collab_prob <= 1.0) || spec.mean_extra_authors < 0.0)
    throw PreconditionError("invalid co-authorship parameters");
  for (const auto& a : spec.advantages) {
    if (a.country < 0 || a.country >= spec.n_countries || a.cluster < 0 || a.cluster >= spec.n_clusters)
      throw PreconditionError("advantage refers to an unknown country or cluster");
    if (!(a.multiplier > 0.0))
      throw PreconditionError("advantage multipliers must be positive");
  }
  if (spec.swap && (spec.swap->topic < 0 || spec.swap->topic >= spec.n_topics))
    throw PreconditionError("swap topic out of range");
  const auto& g = spec.gravity;
  if (g.n_countries < 2 || static_cast<std::size_t>(g.n_countries) > country_codes().size() ||
      g.n_years < 2 || g.n_rows < 0 || g.sigma < 0.0)
    throw PreconditionError("invalid gravity parameters");
}

Eigen::MatrixXd
planted_beta(const SynthSpec& spec)
{
  validate(spec);
  const int K = spec.n_topics, V = spec.vocab_size, C = spec.n_clusters;
  const auto tc = resolved_topic_cluster(spec);
  std::vector<std::vector<int>> members(C);
  for (int k = 0; k < K; ++k)
    members[tc[k]].push_back(k);

  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(K, V, (1.0 - spec.block_mass) / V);
  int start = 0;
  int assigned_topics = 0;
  for (int c = 0; c < C; ++c) {
    const int nc = static_cast<int>(members[c].size());
    assigned_topics += nc;
    const int end = c == C - 1 ? V : V * assigned_topics / K;
    const int region = end - start;
    int shared = static_cast<int>(std::floor(region * 0.3));
    if (spec.cluster_shared == 0.0 || region - shared < 2 * nc)
      shared = 0;
    const double shared_mass = shared > 0 ? spec.block_mass * spec.cluster_shared : 0.0;
    const double own_mass = spec.block_mass - shared_mass;
    const int own_words = region - shared;

    for (int m = 0; m < nc; ++m) {
      const int k = members[c][m];
      for (int w = start; w < start + shared; ++w)
        beta(k, w) += shared_mass / shared;
      const int lo = start + shared + own_words * m / nc;
      const int hi = start + shared + own_words * (m + 1) / nc;
      double h = 0.0;
      for (int r = 0; r < hi - lo; ++r)
        h += 1.0 / (r + 1);
      for (int r = 0; r < hi - lo; ++r)
        beta(k, lo + r) += own_mass / ((r + 1) * h);
    }
    start = end;
  }
  for (int k = 0; k < K; ++k)
    beta.row(k) /= beta.row(k).sum();
  return beta;
}

SynthCorpus
generate_corpus(const SynthSpec& spec)
{
  validate(spec);
  const int K = spec.n_topics, V = spec.vocab_size;
  SynthCorpus out;
  out.topic_cluster = resolved_topic_cluster(spec);
  out.countries.assign(country_codes().begin(), country_codes().begin() + spec.n_countries);
  out.capitals = ring_capitals(out.countries);

  const Eigen::MatrixXd base = planted_beta(spec);
  std::vector<int> swap_words;
  if (spec.swap) {
    Eigen::RowVectorXd row = base.row(spec.swap->topic);
    std::vector<int> order(V);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return row[a] > row[b]; });
    swap_words = { order[0], order[1] };
  }

  const int nc = spec.n_countries;
  std::vector<double> size(nc);
  for (int c = 0; c < nc; ++c)
    size[c] = 1.0 / std::pow(c + 1.0, 0.8);
  std::vector<std::vector<double>> mult(nc, std::vector<double>(spec.n_clusters, 1.0));
  for (const auto& a : spec.advantages)
    mult[a.country][a.cluster] *= a.multiplier;

  Eigen::MatrixXd dist(nc, nc);
  for (int a = 0; a < nc; ++a)
    for (int b = 0; b < nc; ++b) {
      const auto& pa = out.capitals.at(out.countries[a]);
      const auto& pb = out.capitals.at(out.countries[b]);
      dist(a, b) = gravity::haversine_km(pa.lat, pa.lon, pb.lat, pb.lon);
    }

  std::vector<double> usage = spec.topic_usage.empty() ? std::vector<double>(K, 1.0) : spec.topic_usage;

  out.tokenized.vocab.reserve(V);
  for (int w = 0; w < V; ++w)
    out.tokenized.vocab.push_back(word_name(w, V));

  std::uint64_t doc_counter = 0;
  for (int year = spec.year_first; year <= spec.year_last; ++year) {
    out.years.push_back(year);
    Eigen::MatrixXd beta = base;
    if (spec.swap && year >= spec.swap->year) {
      const int k = spec.swap->topic;
      std::swap(beta(k, swap_words[0]), beta(k, swap_words[1]));
    }
    out.beta.push_back(beta);
    std::vector<std::vector<double>> rows(K, std::vector<double>(V));
    for (int k = 0; k < K; ++k)
      for (int w = 0; w < V; ++w)
        rows[k][w] = beta(k, w);

    for (int i = 0; i < spec.docs_per_year; ++i, ++doc_counter) {
      Rng rng(mix_seed(spec.seed, doc_counter));
      const int primary = static_cast<int>(draw_categorical(rng, usage));
      const int cluster = out.topic_cluster[primary];

      std::vector<double> conc(K);
      for (int k = 0; k < K; ++k)
        conc[k] = spec.doc_concentration *
                  (k == primary ? spec.topic_purity : (1.0 - spec.topic_purity) / std::max(K - 1, 1));
      std::vector<double> theta(K, 0.0);
      if (K == 1 || spec.topic_purity >= 1.0)
        theta[primary] = 1.0;
      else
        theta = draw_dirichlet(rng, conc);

      const double mean_len =
        spec.topic_length_mean.empty() ? spec.doc_length_mean : spec.topic_length_mean[primary];
      std::gamma_distribution<double> lam(spec.doc_length_dispersion, mean_len / spec.doc_length_dispersion);
      std::poisson_distribution<int> pois(std::max(lam(rng), 1e-9));
      const int len = std::max(1, pois(rng));

      corpus::Document doc;
      std::string text;
      for (int t = 0; t < len; ++t) {
        const auto z = draw_categorical(rng, theta);
        const auto w = static_cast<int>(draw_categorical(rng, rows[z]));
        doc.tokens.push_back(w);
        if (!text.empty())
          text.push_back(' ');
        text += out.tokenized.vocab[w];
      }

      std::vector<double> lead_w(nc);
      for (int c = 0; c < nc; ++c)
        lead_w[c] = size[c] * mult[c][cluster];
      const auto lead = static_cast<int>(draw_categorical(rng, lead_w));
      std::poisson_distribution<int> extra(spec.mean_extra_authors);
      int n_authors = 1 + extra(rng);
      const bool international = nc > 1 && uniform01(rng) < spec.collab_prob;
      if (international)
        n_authors = std::max(n_authors, 2);
      std::vector<int> authors(n_authors, lead);
      if (international) {
        std::vector<double> foreign_w(nc);
        for (int c = 0; c < nc; ++c)
          foreign_w[c] = c == lead ? 0.0 : lead_w[c] / (1.0 + dist(lead, c) / 5000.0);
        bool any_foreign = false;
        for (int a = 1; a < n_authors; ++a)
          if (uniform01(rng) < 0.5) {
            authors[a] = static_cast<int>(draw_categorical(rng, foreign_w));
            any_foreign = true;
          }
        if (!any_foreign)
          authors[1] = static_cast<int>(draw_categorical(rng, foreign_w));
      }

      corpus::PaperRecord rec;
      std::ostringstream id;
      id << "S" << year << "-" << i;
      rec.id = id.str();
      rec.year = year;
      rec.title = "Synthetic paper " + rec.id;
      rec.abstract = std::move(text);
      for (int a : authors)
        rec.author_countries.push_back(out.countries[a]);

      doc.id = rec.id;
      doc.year = year;
      doc.credit = corpus::fractional_credit(rec);
      out.tokenized.docs.push_back(std::move(doc));
      out.records.push_back(std::move(rec));
      out.theta.push_back(Eigen::Map<Eigen::VectorXd>(theta.data(), K));
      out.primary_topic.push_back(primary);
    }
  }
  return out;
}

std::string
to_jsonl(const std::vector<corpus::PaperRecord>& records)
{
  std::string out;
  for (const auto& r : records) {
    json authors = json::array();
    for (const auto& c : r.author_countries)
      authors.push_back({ { "country", c } });
    json j = { { "id", r.id },       { "year", r.year },         { "title", r.title },
               { "abstract", r.abstract }, { "keywords", r.keywords }, { "authors", authors } };
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

nlohmann::json
ground_truth_json(const SynthSpec& spec, const SynthCorpus& corpus)
{
  json j;
  j["spec"] = spec_to_json(spec);
  j["countries"] = corpus.countries;
  j["topic_cluster"] = corpus.topic_cluster;
  json caps = json::object();
  for (const auto& [code, c] : corpus.capitals.entries())
    caps[code] = { c.lat, c.lon };
  j["capitals"] = caps;
  const auto& b = corpus.beta.front();
  json beta = json::array();
  for (Eigen::Index k = 0; k < b.rows(); ++k) {
    std::vector<double> row(static_cast<std::size_t>(b.cols()));
    for (Eigen::Index w = 0; w < b.cols(); ++w)
      row[static_cast<std::size_t>(w)] = b(k, w);
    beta.push_back(row);
  }
  j["beta_first_year"] = beta;
  json docs = json::array();
  for (std::size_t d = 0; d < corpus.records.size(); ++d) {
    const auto& t = corpus.theta[d];
    docs.push_back({ { "id", corpus.records[d].id },
                     { "primary_topic", corpus.primary_topic[d] },
                     { "theta", std::vector<double>(t.data(), t.data() + t.size()) } });
  }
  j["docs"] = docs;
  return j;
}

GravityData
generate_gravity_data(const SynthSpec& spec)
{
  validate(spec);
  const auto& g = spec.gravity;
  Rng rng(mix_seed(spec.seed, 0x67726176ULL));
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::string> countries(country_codes().begin(), country_codes().begin() + g.n_countries);
  auto capitals = ring_capitals(countries);
  std::sort(countries.begin(), countries.end());
  const int nc = g.n_countries;

  GravityData data;
  data.truth = { g.intercept, g.alpha, g.beta, g.gamma, g.lambda, {} };
  std::vector<double> year_effect(g.n_years, 0.0);
  for (int t = 1; t < g.n_years; ++t) {
    year_effect[t] = g.year_effect_sd * normal(rng);
    data.truth.year_effects.emplace_back(spec.year_first + t, year_effect[t]);
  }

  std::vector<double> base(nc);
  for (auto& b : base)
    b = 3.0 + normal(rng);

  std::vector<gravity::GravityObservation> all;
  for (int t = 0; t < g.n_years; ++t) {
    const int year = spec.year_first + t;
    std::vector<double> ln_p(nc);
    std::vector<std::vector<int>> adv(nc, std::vector<int>(5));
    for (int c = 0; c < nc; ++c) {
      ln_p[c] = base[c] + 0.5 * normal(rng);
      for (auto& bit : adv[c])
        bit = uniform01(rng) < 0.5;
    }
    for (int a = 0; a < nc; ++a)
      for (int b = a + 1; b < nc; ++b) {
        const auto& pa = capitals.at(countries[a]);
        const auto& pb = capitals.at(countries[b]);
        gravity::GravityObservation o;
        o.country_m = countries[a];
        o.country_n = countries[b];
        o.cluster = 0;
        o.year = year;
        o.p_m = std::exp(ln_p[a]);
        o.p_n = std::exp(ln_p[b]);
        o.d = gravity::haversine_km(pa.lat, pa.lon, pb.lat, pb.lon);
        o.c = capability::capability_distance(adv[a], adv[b]);
        const double ln_w = g.intercept + g.alpha * ln_p[a] + g.beta * ln_p[b] + g.gamma * std::log(o.d) +
                            g.lambda * o.c + year_effect[t] + g.sigma * normal(rng);
        o.w = std::exp(ln_w);
        all.push_back(o);
      }
  }

  if (g.n_rows > 0 && static_cast<std::size_t>(g.n_rows) < all.size()) {
    std::vector<std::size_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
      std::swap(idx[i], idx[std::min(j, i)]);
    }
    idx.resize(static_cast<std::size_t>(g.n_rows));
    std::sort(idx.begin(), idx.end());
    for (auto i : idx)
      data.observations.push_back(all[i]);
  } else {
    data.observations = std::move(all);
  }
  return data;
}

SynthSpec
spec_from_json(const json& j)
{
  SynthSpec s;
  if (!j.contains("seed"))
    throw PreconditionError("synth spec requires a seed");
  s.seed = j.at("seed").get<std::uint64_t>();
  s.n_countries = j.value("n_countries", s.n_countries);
  s.n_topics = j.value("n_topics", s.n_topics);
  s.n_clusters = j.value("n_clusters", s.n_clusters);
  s.topic_cluster = j.value("topic_cluster", s.topic_cluster);
  s.year_first = j.value("year_first", s.year_first);
  s.year_last = j.value("year_last", s.year_last);
  s.docs_per_year = j.value("docs_per_year", s.docs_per_year);
  s.vocab_size = j.value("vocab_size", s.vocab_size);
  s.doc_length_mean = j.value("doc_length_mean", s.doc_length_mean);
  s.doc_length_dispersion = j.value("doc_length_dispersion", s.doc_length_dispersion);
  s.topic_usage = j.value("topic_usage", s.topic_usage);
  s.topic_length_mean = j.value("topic_length_mean", s.topic_length_mean);
  s.topic_purity = j.value("topic_purity", s.topic_purity);
  s.doc_concentration = j.value("doc_concentration", s.doc_concentration);
  s.block_mass = j.value("block_mass", s.block_mass);
  s.cluster_shared = j.value("cluster_shared", s.cluster_shared);
  s.collab_prob = j.value("collab_prob", s.collab_prob);
  s.mean_extra_authors = j.value("mean_extra_authors", s.mean_extra_authors);
  if (j.contains("swap") && !j["swap"].is_null())
    s.swap = WordSwap{ j["swap"].at("topic").get<int>(), j["swap"].at("year").get<int>() };
  if (j.contains("advantages"))
    for (const auto& a : j["advantages"])
      s.advantages.push_back(
        { a.at("country").get<int>(), a.at("cluster").get<int>(), a.at("multiplier").get<double>() });
  if (j.contains("gravity")) {
    const auto& g = j["gravity"];
    auto& o = s.gravity;
    o.n_countries = g.value("n_countries", o.n_countries);
    o.n_years = g.value("n_years", o.n_years);
    o.n_rows = g.value("n_rows", o.n_rows);
    o.intercept = g.value("intercept", o.intercept);
    o.alpha = g.value("alpha", o.alpha);
    o.beta = g.value("beta", o.beta);
    o.gamma = g.value("gamma", o.gamma);
    o.lambda = g.value("lambda", o.lambda);
    o.sigma = g.value("sigma", o.sigma);
    o.year_effect_sd = g.value("year_effect_sd", o.year_effect_sd);
  }
  validate(s);
  return s;
}

json
spec_to_json(const SynthSpec& s)
{
  json j = {
    { "seed", s.seed },
    { "n_countries", s.n_countries },
    { "n_topics", s.n_topics },
    { "n_clusters", s.n_clusters },
    { "topic_cluster", s.topic_cluster },
    { "year_first", s.year_first },
    { "year_last", s.year_last },
    { "docs_per_year", s.docs_per_year },
    { "vocab_size", s.vocab_size },
    { "doc_length_mean", s.doc_length_mean },
    { "doc_length_dispersion", s.doc_length_dispersion },
    { "topic_usage", s.topic_usage },
    { "topic_length_mean", s.topic_length_mean },
    { "topic_purity", s.topic_purity },
    { "doc_concentration", s.doc_concentration },
    { "block_mass", s.block_mass },
    { "cluster_shared", s.cluster_shared },
    { "collab_prob", s.collab_prob },
    { "mean_extra_authors", s.mean_extra_authors },
  };
  j["swap"] = s.swap ? json{ { "topic", s.swap->topic }, { "year", s.swap->year } } : json(nullptr);
  j["advantages"] = json::array();
  for (const auto& a : s.advantages)
    j["advantages"].push_back({ { "country", a.country }, { "cluster", a.cluster }, { "multiplier", a.multiplier } });
  const auto& g = s.gravity;
  j["gravity"] = { { "n_countries", g.n_countries }, { "n_years", g.n_years },     { "n_rows", g.n_rows },
                   { "intercept", g.intercept },     { "alpha", g.alpha },         { "beta", g.beta },
                   { "gamma", g.gamma },             { "lambda", g.lambda },       { "sigma", g.sigma },
                   { "year_effect_sd", g.year_effect_sd } };
  return j;
}

} // namespace natcap::synth
