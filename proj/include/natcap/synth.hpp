#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "natcap/corpus.hpp"
#include "natcap/gravity.hpp"

namespace natcap::synth {

//! Country `country` (index into the generated country list) over-produces in
//! `cluster` by `multiplier`.
struct Advantage
{
  int country = 0;
  int cluster = 0;
  double multiplier = 1.0;
};

//! From `year` on, topic `topic` exchanges its two heaviest words.
struct WordSwap
{
  int topic = 0;
  int year = 0;
};

struct GravityParams
{
  int n_countries = 14;
  int n_years = 41;
  //! rows kept after random deletion; 0 keeps every pair-year
  long n_rows = 3518;
  double intercept = 1.0;
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = -0.5;
  double lambda = -0.8;
  double sigma = 0.5;
  double year_effect_sd = 0.3;
};

struct SynthSpec
{
  int n_countries = 14;
  int n_topics = 10;
  int n_clusters = 5;
  //! planted topic -> cluster; empty means contiguous blocks
  std::vector<int> topic_cluster;
  int year_first = 1976;
  int year_last = 2016;
  int docs_per_year = 50;
  int vocab_size = 500;
  double doc_length_mean = 65.0;
  //! negative-binomial size parameter of document lengths
  double doc_length_dispersion = 10.0;
  //! relative topic popularity; empty means uniform
  std::vector<double> topic_usage;
  //! per-topic mean document length; empty means doc_length_mean everywhere
  std::vector<double> topic_length_mean;
  //! expected share of a document's primary topic
  double topic_purity = 0.9;
  double doc_concentration = 10.0;
  //! beta mass a topic keeps on its own cluster's vocabulary region
  double block_mass = 0.9;
  //! of that mass, the share shared by every topic of the cluster
  double cluster_shared = 0.3;
  std::optional<WordSwap> swap;
  //! probability a paper has foreign co-authors
  double collab_prob = 0.3;
  double mean_extra_authors = 3.0;
  std::vector<Advantage> advantages;
  GravityParams gravity;
  std::uint64_t seed = 0;
};

//! Throws PreconditionError on invalid specs.
void
validate(const SynthSpec& spec);

SynthSpec
spec_from_json(const nlohmann::json& j);

nlohmann::json
spec_to_json(const SynthSpec& spec);

struct SynthCorpus
{
  std::vector<corpus::PaperRecord> records;
  //! every generated word is in the vocabulary; no filtering applied
  corpus::TokenizedCorpus tokenized;
  std::vector<std::string> countries;
  gravity::CapitalTable capitals;
  std::vector<int> topic_cluster;
  std::vector<int> years;
  //! planted K x V matrix per year
  std::vector<Eigen::MatrixXd> beta;
  std::vector<Eigen::VectorXd> theta;
  std::vector<int> primary_topic;
};

//! ISO alpha-2 codes handed out to generated countries, in order.
const std::vector<std::string>&
country_codes();

//! Capitals on a ring so every pair has a distinct positive distance.
gravity::CapitalTable
ring_capitals(const std::vector<std::string>& countries);

std::string
word_name(int index, int vocab_size);

//! Planted (K x V) topic-word matrix before any drift.
Eigen::MatrixXd
planted_beta(const SynthSpec& spec);

SynthCorpus
generate_corpus(const SynthSpec& spec);

nlohmann::json
ground_truth_json(const SynthSpec& spec, const SynthCorpus& corpus);

//! Writes one JSON object per record in the ingest format.
std::string
to_jsonl(const std::vector<corpus::PaperRecord>& records);

struct GravityTruth
{
  double intercept = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  std::vector<std::pair<int, double>> year_effects;
};

struct GravityData
{
  std::vector<gravity::GravityObservation> observations;
  GravityTruth truth;
};

//! Cluster-0 observations with ln w drawn from the planted log-linear model.
GravityData
generate_gravity_data(const SynthSpec& spec);

} // namespace natcap::synth
