#include "natcap/topicmodel.hpp"
#include "natcap/errors.hpp"
#include "natcap/gibbs.hpp"
#include "natcap/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace natcap::topicmodel {

using nlohmann::json;

namespace {

void
check_hyperparams(const Hyperparams& hp, int K)
{
  if (K < 1)
    throw PreconditionError("topic count must be at least 1");
  if (hp.sweeps < 1 || hp.burn_in < 0 || hp.thin < 1)
    throw PreconditionError("sweeps >= 1, burn_in >= 0 and thin >= 1 required");
  if (!(hp.eta > 0.0) || !(hp.alpha_for(K) > 0.0))
    throw PreconditionError("alpha and eta must be positive");
  if (hp.chain_strength < 0.0)
    throw PreconditionError("chain strength must be non-negative");
}

void
run(GibbsSampler& sampler, const Hyperparams& hp)
{
  for (int s = 0; s < hp.sweeps; ++s) {
    sampler.sweep();
    if (s >= hp.burn_in && (s - hp.burn_in) % hp.thin == 0)
      sampler.accumulate();
  }
}

void
check_corpus(const corpus::TokenizedCorpus& corpus, int K)
{
  if (corpus.docs.empty() || corpus.total_tokens() == 0)
    throw EmptyCorpusError("topic model needs at least one token");
  if (corpus.vocab.empty())
    throw EmptyVocabularyError("topic model needs a vocabulary");
  if (static_cast<std::size_t>(K) > corpus.docs.size())
    spdlog::warn("topic count {} exceeds document count {}", K, corpus.docs.size());
}

TopicModelState
empty_state(const corpus::TokenizedCorpus& corpus, int K)
{
  TopicModelState st;
  st.K = K;
  st.vocab = corpus.vocab;
  st.doc_ids.reserve(corpus.docs.size());
  for (const auto& d : corpus.docs) {
    st.doc_ids.push_back(d.id);
    st.doc_years.push_back(d.year);
  }
  st.doc_theta.resize(corpus.docs.size());
  return st;
}

} // namespace

std::size_t
TopicModelState::epoch_index(int year) const
{
  auto it = std::find(epochs.begin(), epochs.end(), year);
  if (it == epochs.end())
    throw LookupError("year " + std::to_string(year) + " is not a model epoch");
  return static_cast<std::size_t>(it - epochs.begin());
}

std::size_t
TopicModelState::doc_index(const std::string& id) const
{
  auto it = std::find(doc_ids.begin(), doc_ids.end(), id);
  if (it == doc_ids.end())
    throw LookupError("unknown document id " + id);
  return static_cast<std::size_t>(it - doc_ids.begin());
}

TopicModelState
fit_static_lda(const corpus::TokenizedCorpus& corpus,
               int K,
               const Hyperparams& hp,
               std::uint64_t seed)
{
  check_hyperparams(hp, K);
  check_corpus(corpus, K);
  const int V = static_cast<int>(corpus.vocab_size());

  std::vector<std::vector<int>> docs;
  docs.reserve(corpus.docs.size());
  for (const auto& d : corpus.docs)
    docs.push_back(d.tokens);

  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(K, hp.alpha_for(K));
  GibbsSampler sampler(std::move(docs), alpha,
                       Eigen::MatrixXd::Constant(K, V, hp.eta), seed);
  run(sampler, hp);

  auto st = empty_state(corpus, K);
  st.epochs = { corpus.years().back() };
  st.beta = { sampler.beta() };
  st.alpha = { alpha };
  st.doc_theta = sampler.theta();
  return st;
}

TopicModelState
fit_dynamic(const corpus::TokenizedCorpus& corpus,
            int K,
            const Hyperparams& hp,
            std::uint64_t seed)
{
  check_hyperparams(hp, K);
  check_corpus(corpus, K);
  const int V = static_cast<int>(corpus.vocab_size());

  auto years = corpus.years();
  std::map<int, std::vector<std::size_t>> by_year;
  for (std::size_t i = 0; i < corpus.docs.size(); ++i)
    by_year[corpus.docs[i].year].push_back(i);

  auto st = empty_state(corpus, K);
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(K, hp.alpha_for(K));

  std::size_t e = 0;
  for (int year = years.front(); year <= years.back(); ++year, ++e) {
    st.epochs.push_back(year);
    st.alpha.push_back(alpha);

    auto it = by_year.find(year);
    if (it == by_year.end()) {
      spdlog::warn("epoch {} has no documents; carrying beta forward", year);
      st.beta.push_back(st.beta.back());
      continue;
    }

    std::vector<std::vector<int>> docs;
    for (auto idx : it->second)
      docs.push_back(corpus.docs[idx].tokens);

    Eigen::MatrixXd prior = Eigen::MatrixXd::Constant(K, V, hp.eta);
    InitMode init = InitMode::uniform;
    std::uint64_t epoch_seed = seed;
    if (e > 0) {
      prior += hp.chain_strength * st.beta.back();
      init = InitMode::sequential;
      epoch_seed = mix_seed(seed, e);
    }

    GibbsSampler sampler(std::move(docs), alpha, prior, epoch_seed, init);
    run(sampler, hp);
    st.beta.push_back(sampler.beta());
    auto theta = sampler.theta();
    for (std::size_t j = 0; j < it->second.size(); ++j)
      st.doc_theta[it->second[j]] = std::move(theta[j]);
    spdlog::debug("epoch {}: {} documents", year, it->second.size());
  }
  return st;
}

Eigen::VectorXd
doc_topic_distribution(const TopicModelState& state, const std::string& doc_id)
{
  return state.doc_theta[state.doc_index(doc_id)];
}

std::vector<std::string>
top_words(const TopicModelState& state, std::size_t epoch, int topic, std::size_t n)
{
  if (epoch >= state.beta.size())
    throw LookupError("epoch index out of range");
  if (topic < 0 || topic >= state.K)
    throw LookupError("topic index out of range");
  const auto& row = state.beta[epoch].row(topic);
  std::vector<std::size_t> order(state.vocab.size());
  std::iota(order.begin(), order.end(), 0);
  n = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (row[a] != row[b])
                        return row[a] > row[b];
                      return state.vocab[a] < state.vocab[b];
                    });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(state.vocab[order[i]]);
  return out;
}

std::vector<TopicUsage>
usage_profile(const TopicModelState& probe,
              const corpus::TokenizedCorpus& corpus,
              int w_th)
{
  if (probe.doc_theta.size() != corpus.docs.size())
    throw PreconditionError("probe model was not fitted on this corpus");
  std::vector<TopicUsage> usage(probe.K);
  for (int k = 0; k < probe.K; ++k)
    usage[k].topic = k;
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    Eigen::Index k = 0;
    probe.doc_theta[d].maxCoeff(&k);
    ++usage[k].n_docs;
    if (static_cast<long>(corpus.docs[d].tokens.size()) > w_th)
      ++usage[k].n_long;
  }
  std::vector<TopicUsage> used;
  for (auto& u : usage) {
    if (u.n_docs == 0)
      continue;
    u.p = static_cast<double>(u.n_long) / static_cast<double>(u.n_docs);
    used.push_back(u);
  }
  return used;
}

KSelection
select_num_topics(const TopicModelState& probe,
                  const corpus::TokenizedCorpus& corpus,
                  const SelectOptions& opts)
{
  if (opts.grid_points < 2)
    throw PreconditionError("KDE grid needs at least two points");
  KSelection sel;
  sel.profile = usage_profile(probe, corpus, opts.w_th);
  if (sel.profile.size() < 2)
    throw NumericalError("fewer than two used topics; KDE is degenerate");

  std::vector<double> p;
  for (const auto& u : sel.profile)
    p.push_back(u.p);
  if (std::all_of(p.begin(), p.end(), [&](double v) { return v == p.front(); })) {
    // identical usage: no cutoff can separate topics
    sel.K = static_cast<int>(p.size());
    sel.cutoff = p.front();
    return sel;
  }

  kde::GaussianKde density(p);
  sel.bandwidth = density.bandwidth();
  const double lo = kde::quantile(p, opts.search_lo);
  const double hi = kde::quantile(p, opts.search_hi);

  double best = std::numeric_limits<double>::infinity();
  double cutoff = 0.0;
  auto scan = [&](bool restricted) {
    for (int g = 0; g < opts.grid_points; ++g) {
      const double x = static_cast<double>(g) / (opts.grid_points - 1);
      if (restricted && (x < lo || x > hi))
        continue;
      const double slope = density.derivative(x);
      if (slope < best) {
        best = slope;
        cutoff = x;
      }
    }
  };
  scan(true);
  if (!std::isfinite(best))
    scan(false);

  sel.cutoff = cutoff;
  sel.K = static_cast<int>(std::count_if(p.begin(), p.end(),
                                         [&](double v) { return v > cutoff; }));
  return sel;
}

KSelection
select_num_topics(const corpus::TokenizedCorpus& corpus,
                  const SelectOptions& opts,
                  const Hyperparams& hp,
                  std::uint64_t seed)
{
  auto probe = fit_static_lda(corpus, opts.k_probe, hp, seed);
  return select_num_topics(probe, corpus, opts);
}

void
save_checkpoint(const TopicModelState& state, std::ostream& out)
{
  json j;
  j["format"] = "natcap-topic-model";
  j["version"] = 1;
  j["K"] = state.K;
  j["epochs"] = state.epochs;
  j["vocab"] = state.vocab;
  json beta = json::array();
  for (const auto& b : state.beta) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(b.size()));
    for (Eigen::Index k = 0; k < b.rows(); ++k)
      for (Eigen::Index w = 0; w < b.cols(); ++w)
        flat.push_back(b(k, w));
    beta.push_back(std::move(flat));
  }
  j["beta"] = std::move(beta);
  json alpha = json::array();
  for (const auto& a : state.alpha)
    alpha.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  j["alpha"] = std::move(alpha);
  json docs = json::array();
  for (std::size_t d = 0; d < state.doc_ids.size(); ++d) {
    const auto& t = state.doc_theta[d];
    docs.push_back({ { "id", state.doc_ids[d] },
                     { "year", state.doc_years[d] },
                     { "theta", std::vector<double>(t.data(), t.data() + t.size()) } });
  }
  j["docs"] = std::move(docs);
  out << j.dump() << '\n';
}

TopicModelState
load_checkpoint(std::istream& in)
{
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("model checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "natcap-topic-model" || j.value("version", 0) != 1)
    throw ParseError(1, "not a version-1 topic model checkpoint");

  TopicModelState st;
  try {
    st.K = j.at("K").get<int>();
    st.epochs = j.at("epochs").get<std::vector<int>>();
    st.vocab = j.at("vocab").get<std::vector<std::string>>();
    const auto V = static_cast<Eigen::Index>(st.vocab.size());
    for (const auto& flat_j : j.at("beta")) {
      auto flat = flat_j.get<std::vector<double>>();
      if (static_cast<Eigen::Index>(flat.size()) != st.K * V)
        throw ParseError(1, "beta block has the wrong size");
      Eigen::MatrixXd b(st.K, V);
      for (Eigen::Index k = 0; k < st.K; ++k)
        for (Eigen::Index w = 0; w < V; ++w)
          b(k, w) = flat[static_cast<std::size_t>(k * V + w)];
      st.beta.push_back(std::move(b));
    }
    for (const auto& a : j.at("alpha")) {
      auto v = a.get<std::vector<double>>();
      st.alpha.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    for (const auto& d : j.at("docs")) {
      st.doc_ids.push_back(d.at("id").get<std::string>());
      st.doc_years.push_back(d.at("year").get<int>());
      auto v = d.at("theta").get<std::vector<double>>();
      if (static_cast<int>(v.size()) != st.K)
        throw ParseError(1, "document theta has the wrong length");
      st.doc_theta.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), st.K));
    }
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("model checkpoint: ") + e.what());
  }
  if (st.beta.size() != st.epochs.size() || st.alpha.size() != st.epochs.size())
    throw ParseError(1, "epoch count mismatch in checkpoint");
  return st;
}

} // namespace natcap::topicmodel
