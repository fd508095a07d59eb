// Shared test fixtures.
#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "natcap/gibbs.hpp"
#include "natcap/synth.hpp"
#include "natcap/topicmodel.hpp"
#include "oracles.hpp"

namespace fixture {

//! 2 topics, 6 words, 20 documents, 22 tokens; small enough to enumerate.
struct MicroCorpus
{
  std::vector<std::vector<int>> docs;
  Eigen::Vector2d alpha;
  Eigen::MatrixXd prior; // 2 x 6, asymmetric as a chained epoch prior would be
};

inline MicroCorpus
micro_corpus()
{
  MicroCorpus m;
  for (int d = 0; d < 18; ++d)
    m.docs.push_back({ (d * 5 + d / 6) % 6 });
  m.docs.push_back({ 0, 5 });
  m.docs.push_back({ 2, 3 });
  m.alpha = Eigen::Vector2d(0.5, 0.5);
  m.prior.resize(2, 6);
  // eta + strength * previous beta
  const double eta = 0.1, strength = 4.0;
  const double prev0[6] = { 0.40, 0.30, 0.15, 0.08, 0.05, 0.02 };
  const double prev1[6] = { 0.02, 0.05, 0.08, 0.15, 0.30, 0.40 };
  for (int w = 0; w < 6; ++w) {
    m.prior(0, w) = eta + strength * prev0[w];
    m.prior(1, w) = eta + strength * prev1[w];
  }
  return m;
}

//! Empirical p(z_i = 0) per token from the library sampler.
inline std::vector<std::vector<double>>
sampler_marginals(const MicroCorpus& m, std::uint64_t seed, int burn_in, int samples)
{
  natcap::topicmodel::GibbsSampler s(m.docs, m.alpha, m.prior, seed);
  for (int i = 0; i < burn_in; ++i)
    s.sweep();
  std::vector<std::vector<double>> hits(m.docs.size());
  for (std::size_t d = 0; d < m.docs.size(); ++d)
    hits[d].assign(m.docs[d].size(), 0.0);
  for (int i = 0; i < samples; ++i) {
    s.sweep();
    const auto& z = s.assignments();
    for (std::size_t d = 0; d < z.size(); ++d)
      for (std::size_t j = 0; j < z[d].size(); ++j)
        hits[d][j] += z[d][j] == 0;
  }
  for (auto& row : hits)
    for (auto& v : row)
      v /= samples;
  return hits;
}

//! Largest per-token total-variation distance between two marginal sets.
inline double
max_tv(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b)
{
  double worst = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d)
    for (std::size_t j = 0; j < a[d].size(); ++j)
      worst = std::max(worst, std::abs(a[d][j] - b[d][j]));
  return worst;
}

inline std::vector<int>
argmax_topics(const natcap::topicmodel::TopicModelState& state)
{
  std::vector<int> out;
  out.reserve(state.doc_theta.size());
  for (const auto& t : state.doc_theta) {
    Eigen::Index k;
    t.maxCoeff(&k);
    out.push_back(static_cast<int>(k));
  }
  return out;
}

//! For every fitted label, the planted label it co-occurs with most often.
inline std::map<int, int>
majority_map(const std::vector<int>& fitted, const std::vector<int>& planted)
{
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < fitted.size(); ++i)
    ++counts[fitted[i]][planted[i]];
  std::map<int, int> out;
  for (const auto& [f, row] : counts)
    out[f] = std::max_element(row.begin(), row.end(), [](auto& a, auto& b) {
               return a.second < b.second;
             })->first;
  return out;
}

//! A small well-separated planted-topic corpus.
inline natcap::synth::SynthSpec
small_topic_spec(std::uint64_t seed, int n_topics = 4, int years = 1, int docs_per_year = 200)
{
  natcap::synth::SynthSpec s;
  s.seed = seed;
  s.n_topics = n_topics;
  s.n_clusters = n_topics;
  s.n_countries = 4;
  s.year_first = 2000;
  s.year_last = 2000 + years - 1;
  s.docs_per_year = docs_per_year;
  s.vocab_size = 40 * n_topics;
  s.doc_length_mean = 40;
  s.topic_purity = 0.95;
  s.block_mass = 0.97;
  return s;
}

} // namespace fixture
