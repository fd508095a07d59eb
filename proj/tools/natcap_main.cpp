// Command-line driver: one subcommand per pipeline stage.
#include <CLI11.hpp>
#include <iostream>

#include "natcap/pipeline.hpp"

namespace pl = natcap::pipeline;

int
main(int argc, char** argv)
{
  CLI::App app{ "natcap: national research-capability pipeline" };
  app.require_subcommand(1, 1);
  // global options may appear before or after the subcommand
  app.fallthrough();

  std::string config_path, out_dir, corpus, capitals, labels;
  std::uint64_t seed = 0;
  int threads = 1;
  bool verbose = false;
  int k = 0, k_probe = 0, w_th = 0, sweeps = 0, n_clusters = 0, cluster = 0;
  double chain_strength = 0.0, epsilon_w = 0.0, min_papers = 0.0;
  bool robust_se = false;

  auto* o_config = app.add_option("--config", config_path, "JSON run configuration");
  auto* o_out = app.add_option("--out-dir", out_dir, "artifact directory");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_threads = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "debug logging");
  auto* o_corpus = app.add_option("--input", corpus, "JSON Lines corpus (ingest)");
  auto* o_capitals = app.add_option("--capitals", capitals, "capital coordinates CSV");
  auto* o_labels = app.add_option("--labels", labels, "cluster label JSON");
  auto* o_k = app.add_option("--k", k, "number of topics for fit");
  auto* o_kprobe = app.add_option("--k-probe", k_probe, "probe topic count for select-k");
  auto* o_wth = app.add_option("--w-th", w_th, "long-document word threshold");
  auto* o_sweeps = app.add_option("--sweeps", sweeps, "Gibbs sweeps");
  auto* o_chain = app.add_option("--chain-strength", chain_strength, "chained prior strength");
  auto* o_nclusters = app.add_option("--n-clusters", n_clusters, "topic clusters");
  auto* o_minpapers = app.add_option("--min-papers", min_papers, "country inclusion threshold");
  auto* o_cluster = app.add_option("--cluster", cluster, "gravity: fit this cluster only");
  auto* o_robust = app.add_flag("--robust-se", robust_se, "gravity: HC1 standard errors");
  auto* o_eps = app.add_option("--epsilon-w", epsilon_w, "gravity: shift added to w before logs");

  for (const auto& name : pl::subcommands())
    app.add_subcommand(name, "run the " + name + " stage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pl::kConfigError;
  }

  pl::configure_logging(verbose);

  pl::RunConfig cfg;
  try {
    if (*o_config)
      cfg = pl::load_config_file(config_path);
    if (*o_out)
      cfg.out_dir = out_dir;
    if (*o_seed)
      cfg.seed = seed;
    if (*o_threads)
      cfg.threads = threads;
    cfg.verbose = verbose;
    if (*o_corpus)
      cfg.corpus = corpus;
    if (*o_capitals)
      cfg.capitals = capitals;
    if (*o_labels)
      cfg.labels = labels;
    if (*o_k)
      cfg.k = k;
    if (*o_kprobe)
      cfg.k_probe = k_probe;
    if (*o_wth)
      cfg.w_th = w_th;
    if (*o_sweeps)
      cfg.hp.sweeps = sweeps;
    if (*o_chain)
      cfg.hp.chain_strength = chain_strength;
    if (*o_nclusters)
      cfg.n_clusters = n_clusters;
    if (*o_minpapers)
      cfg.min_papers = min_papers;
    if (*o_cluster)
      cfg.gravity_cluster = cluster;
    if (*o_robust)
      cfg.robust_se = robust_se;
    if (*o_eps)
      cfg.epsilon_w = epsilon_w;
  } catch (const natcap::Error& e) {
    std::cerr << "[error] " << e.what() << "\n";
    return pl::kConfigError;
  }

  return pl::run_subcommand(app.get_subcommands().front()->get_name(), cfg);
}
