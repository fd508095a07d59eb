#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "natcap/corpus.hpp"

namespace natcap::topicmodel {

struct Hyperparams
{
  //! symmetric document-topic prior; unset means 50 / K
  std::optional<double> alpha;
  //! symmetric topic-word smoothing
  double eta = 0.01;
  //! pseudo-counts per topic carried from one epoch's beta to the next
  double chain_strength = 100.0;
  int sweeps = 1000;
  int burn_in = 200;
  //! post-burn-in sweeps between accumulated samples
  int thin = 10;

  double alpha_for(int K) const { return alpha.value_or(50.0 / K); }
};

//! Fitted topic model. Static fits have a single epoch.
struct TopicModelState
{
  int K = 0;
  std::vector<int> epochs;
  std::vector<std::string> vocab;
  //! per epoch, K x V row-stochastic
  std::vector<Eigen::MatrixXd> beta;
  //! per epoch, length K
  std::vector<Eigen::VectorXd> alpha;
  std::vector<std::string> doc_ids;
  std::vector<int> doc_years;
  std::vector<Eigen::VectorXd> doc_theta;

  //! throws LookupError for years outside the model
  std::size_t epoch_index(int year) const;
  std::size_t doc_index(const std::string& id) const;
};

TopicModelState
fit_static_lda(const corpus::TokenizedCorpus& corpus,
               int K,
               const Hyperparams& hp,
               std::uint64_t seed);

//! Per-epoch collapsed Gibbs sampling in year order. Epoch t's topic-word
//! prior is eta + chain_strength * beta_{t-1}; the first epoch uses eta alone.
//! Years without documents copy the previous epoch's beta.
TopicModelState
fit_dynamic(const corpus::TokenizedCorpus& corpus,
            int K,
            const Hyperparams& hp,
            std::uint64_t seed);

Eigen::VectorXd
doc_topic_distribution(const TopicModelState& state, const std::string& doc_id);

std::vector<std::string>
top_words(const TopicModelState& state,
          std::size_t epoch,
          int topic,
          std::size_t n = 10);

struct TopicUsage
{
  int topic = 0;
  long n_docs = 0;
  //! documents with more than w_th tokens
  long n_long = 0;
  double p = 0.0;
};

struct SelectOptions
{
  int k_probe = 500;
  int w_th = 50;
  int grid_points = 512;
  //! quantiles of the observed p(t) bounding the cutoff search
  double search_lo = 0.10;
  double search_hi = 0.90;
};

struct KSelection
{
  int K = 0;
  double cutoff = 0.0;
  double bandwidth = 0.0;
  //! topics with at least one assigned document
  std::vector<TopicUsage> profile;
};

std::vector<TopicUsage>
usage_profile(const TopicModelState& probe,
              const corpus::TokenizedCorpus& corpus,
              int w_th);

//! Cutoff selection on an already fitted probe model.
KSelection
select_num_topics(const TopicModelState& probe,
                  const corpus::TokenizedCorpus& corpus,
                  const SelectOptions& opts);

//! Fits the static probe model, then selects.
KSelection
select_num_topics(const corpus::TokenizedCorpus& corpus,
                  const SelectOptions& opts,
                  const Hyperparams& hp,
                  std::uint64_t seed);

void
save_checkpoint(const TopicModelState& state, std::ostream& out);

TopicModelState
load_checkpoint(std::istream& in);

} // namespace natcap::topicmodel
