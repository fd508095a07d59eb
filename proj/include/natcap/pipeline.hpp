#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "natcap/corpus.hpp"
#include "natcap/errors.hpp"
#include "natcap/gravity.hpp"
#include "natcap/synth.hpp"
#include "natcap/taxonomy.hpp"
#include "natcap/topicmodel.hpp"

namespace natcap::pipeline {

inline constexpr const char* kVersion = "0.1.0";

//! Invalid configuration; exit code 1.
class ConfigError : public Error
{
public:
  using Error::Error;
};

//! An upstream artifact is absent; exit code 2.
class MissingArtifact : public Error
{
public:
  explicit MissingArtifact(const std::filesystem::path& path)
    : Error("missing upstream artifact: " + path.string())
    , path_(path)
  {}
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

enum ExitCode : int
{
  kOk = 0,
  kConfigError = 1,
  kMissingDependency = 2,
  kNumericalFailure = 3,
};

struct RunConfig
{
  std::filesystem::path out_dir = "run";
  //! JSON Lines corpus; empty means <out_dir>/corpus.jsonl
  std::filesystem::path corpus;
  //! capital coordinates CSV; empty means <out_dir>/capitals.csv when present,
  //! else the shipped table
  std::filesystem::path capitals;
  //! optional JSON map cluster id -> name
  std::filesystem::path labels;

  int year_min = 1976;
  int year_max = 2016;

  double tfidf_min = 0.01;
  long min_count = 10;
  corpus::TfidfMode tfidf_mode = corpus::TfidfMode::max_document;

  std::optional<int> k;
  int k_probe = 500;
  int w_th = 50;
  double search_lo = 0.10;
  double search_hi = 0.90;
  topicmodel::Hyperparams hp;

  int n_clusters = 5;
  taxonomy::WardVariant ward = taxonomy::WardVariant::ward_d;

  double min_papers = 250.0;
  double loess_span = 0.75;

  std::optional<int> gravity_cluster;
  bool robust_se = false;
  double epsilon_w = 0.0;
  gravity::CapabilityDistanceMode distance_mode = gravity::CapabilityDistanceMode::full;

  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool verbose = false;

  //! generator settings for the synth subcommand (seed defaults to `seed`)
  nlohmann::json synth = nlohmann::json::object();
};

//! Parses the configuration tree; unknown keys and wrong types raise
//! ConfigError naming the field.
RunConfig
config_from_json(const nlohmann::json& j);

nlohmann::json
config_to_json(const RunConfig& cfg);

RunConfig
load_config_file(const std::filesystem::path& path);

const std::vector<std::string>&
subcommands();

//! Runs one stage; throws on failure.
void
run_stage(const std::string& name, const RunConfig& cfg);

//! Runs one stage and maps failures onto exit codes, logging the reason.
int
run_subcommand(const std::string& name, const RunConfig& cfg);

//! Sets the log level and a compact message pattern.
void
configure_logging(bool verbose);

//! Default capital coordinates shipped with the toolkit.
std::filesystem::path
shipped_capitals_path();

} // namespace natcap::pipeline
