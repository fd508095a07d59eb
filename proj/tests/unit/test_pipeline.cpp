#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include <json.hpp>

#include "natcap/errors.hpp"
#include "natcap/io.hpp"
#include "natcap/pipeline.hpp"

namespace fs = std::filesystem;
using namespace natcap;

namespace {

const std::vector<std::string> kStages = { "synth",      "ingest", "select-k", "fit",     "cluster-topics",
                                           "capability", "nrca",   "collab",   "gravity", "report" };

struct CliResult
{
  int status = -1;
  std::string err;
};

CliResult
run_cli(const std::string& args, const fs::path& scratch)
{
  const auto err_path = scratch / "stderr.txt";
  const std::string cmd = std::string(NATCAP_CLI) + " " + args + " >/dev/null 2>" + err_path.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = fs::exists(err_path) ? io::read_text_file(err_path) : "";
  return r;
}

fs::path
scratch_dir(const std::string& name)
{
  const auto d = fs::temp_directory_path() / ("natcap_pipeline_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path
write_config(const fs::path& dir, const fs::path& out_dir, const nlohmann::json& patch = nlohmann::json::object())
{
  auto j = nlohmann::json::parse(R"({
    "seed": 11,
    "window": {"first": 2000, "last": 2005},
    "vocabulary": {"tfidf_min": 0.01, "min_count": 5},
    "topics": {"k": 6, "k_probe": 12, "sweeps": 60, "burn_in": 30, "thin": 5},
    "taxonomy": {"n_clusters": 3},
    "capability": {"min_papers": 15},
    "synth": {"n_countries": 8, "n_topics": 6, "n_clusters": 3, "year_first": 2000,
              "year_last": 2005, "docs_per_year": 60, "vocab_size": 240}
  })");
  j["out_dir"] = out_dir.string();
  j.merge_patch(patch);
  const auto path = dir / "config.json";
  io::write_text_file(path, j.dump(2));
  return path;
}

void
run_all(const fs::path& config, const fs::path& scratch)
{
  for (const auto& stage : kStages) {
    INFO("stage " << stage);
    const auto r = run_cli(stage + " --config " + config.string(), scratch);
    INFO(r.err);
    REQUIRE(r.status == 0);
  }
}

} // namespace

TEST_CASE("config parsing names bad fields")
{
  CHECK_THROWS_WITH_AS(pipeline::config_from_json(nlohmann::json::parse(R"({"topics": {"kk": 3}})")),
                       doctest::Contains("topics.kk"), pipeline::ConfigError);
  CHECK_THROWS_AS(pipeline::config_from_json(nlohmann::json::parse(R"({"taxonomy": {"method": "single"}})")),
                  pipeline::ConfigError);
  const auto cfg = pipeline::config_from_json(nlohmann::json::parse(R"({"seed": 3, "topics": {"k": 9}})"));
  CHECK(cfg.seed == 3u);
  CHECK(cfg.k == 9);
  const auto back = pipeline::config_from_json(pipeline::config_to_json(cfg));
  CHECK(pipeline::config_to_json(back) == pipeline::config_to_json(cfg));
}

TEST_CASE("end-to-end run emits every artifact and reruns byte-identically")
{
  const auto scratch = scratch_dir("e2e");
  const auto out = scratch / "run";
  const auto config = write_config(scratch, out);
  run_all(config, scratch);

  for (const char* f : { "corpus.jsonl", "records.jsonl", "rejects.jsonl", "vocabulary.csv", "documents.jsonl",
                         "collaboration_ratio.csv", "select_k.json", "topic_usage.csv", "model.json",
                         "top_words.csv", "dendrogram.json", "dendrogram.nwk", "clusters.json", "capability.csv",
                         "nrca.csv", "collaboration.csv", "gravity_observations.csv", "gravity.csv",
                         "gravity_table.txt", "report/table1.csv", "report/table2.csv", "report/fig3.csv" })
    CHECK_MESSAGE(fs::exists(out / f), f);
  for (const auto& stage : kStages)
    CHECK_MESSAGE(fs::exists(out / (stage + ".manifest.json")), stage);

  const auto nrca = io::read_csv_file(out / "nrca.csv");
  CHECK(nrca.header == std::vector<std::string>{ "year", "country", "cluster", "nrca", "binary" });
  CHECK(!nrca.rows.empty());

  // same config into a second directory: identical manifests and outputs
  const auto out2 = scratch / "run2";
  const auto config2 = write_config(scratch, out2);
  run_all(config2, scratch);
  for (const auto& stage : kStages) {
    INFO(stage);
    CHECK(io::read_text_file(out / (stage + ".manifest.json")) ==
          io::read_text_file(out2 / (stage + ".manifest.json")));
  }
  fs::remove_all(scratch);
}

TEST_CASE("missing upstream artifacts exit with code 2")
{
  const auto scratch = scratch_dir("missing");
  const auto config = write_config(scratch, scratch / "run");
  for (const char* stage : { "report", "nrca", "fit", "gravity" }) {
    const auto r = run_cli(std::string(stage) + " --config " + config.string(), scratch);
    INFO(stage << ": " << r.err);
    CHECK(r.status == pipeline::kMissingDependency);
  }
  fs::remove_all(scratch);
}

TEST_CASE("configuration errors exit with code 1 and name the field")
{
  const auto scratch = scratch_dir("badcfg");
  const auto config = write_config(scratch, scratch / "run", { { "vocabulary", { { "tfidf_minimum", 0.1 } } } });
  const auto r = run_cli("synth --config " + config.string(), scratch);
  CHECK(r.status == pipeline::kConfigError);
  CHECK(r.err.find("vocabulary.tfidf_minimum") != std::string::npos);

  const auto no_seed = run_cli("synth --out-dir " + (scratch / "x").string(), scratch);
  CHECK(no_seed.status == pipeline::kConfigError);
  CHECK(no_seed.err.find("seed") != std::string::npos);

  const auto bogus = run_cli("frobnicate", scratch);
  CHECK(bogus.status == pipeline::kConfigError);
  fs::remove_all(scratch);
}
