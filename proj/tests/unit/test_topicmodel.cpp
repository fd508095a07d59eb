#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "natcap/errors.hpp"
#include "natcap/topicmodel.hpp"

using namespace natcap;
using namespace natcap::topicmodel;

namespace {

Hyperparams
quick(int sweeps = 150, int burn_in = 50, int thin = 5)
{
  Hyperparams hp;
  hp.sweeps = sweeps;
  hp.burn_in = burn_in;
  hp.thin = thin;
  return hp;
}

// Documents of the given word ids, all in one year.
corpus::TokenizedCorpus
corpus_of(const std::vector<std::vector<int>>& docs, int V, int year = 2000)
{
  corpus::TokenizedCorpus tc;
  for (int w = 0; w < V; ++w)
    tc.vocab.push_back("w" + std::to_string(w));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    corpus::Document doc;
    doc.id = "d" + std::to_string(d);
    doc.year = year;
    doc.tokens = docs[d];
    doc.credit.credits["US"] = 1.0;
    tc.docs.push_back(doc);
  }
  return tc;
}

void
check_row_stochastic(const TopicModelState& s)
{
  for (const auto& b : s.beta)
    for (int k = 0; k < b.rows(); ++k)
      CHECK(std::abs(b.row(k).sum() - 1.0) <= 1e-9);
  for (const auto& t : s.doc_theta)
    CHECK(std::abs(t.sum() - 1.0) <= 1e-9);
}

} // namespace

TEST_CASE("Gibbs marginals match exhaustive enumeration on the micro-corpus")
{
  const auto m = fixture::micro_corpus();
  const auto exact = oracle::lda_two_topic_marginals(m.docs, m.alpha, m.prior);
  const auto sampled = fixture::sampler_marginals(m, 17, 500, 30000);
  CHECK(fixture::max_tv(exact, sampled) <= 0.05);
}

TEST_CASE("static LDA separates disjoint vocabularies")
{
  // topic A uses words 0..9, topic B words 10..19
  std::mt19937_64 rng(4);
  std::vector<std::vector<int>> docs;
  for (int d = 0; d < 120; ++d) {
    const int base = d % 2 ? 10 : 0;
    std::vector<int> doc(30);
    for (auto& w : doc)
      w = base + static_cast<int>(rng() % 10);
    docs.push_back(doc);
  }
  const auto s = fit_static_lda(corpus_of(docs, 20), 2, quick(), 9);
  const auto& beta = s.beta.back();
  for (int k = 0; k < 2; ++k) {
    const double lo = beta.row(k).head(10).sum(), hi = beta.row(k).tail(10).sum();
    CHECK(std::max(lo, hi) >= 0.95);
  }
  CHECK((beta.row(0).head(10).sum() > 0.5) != (beta.row(1).head(10).sum() > 0.5));
  check_row_stochastic(s);
}

TEST_CASE("a single topic gives every document mixture (1.0)")
{
  const auto s = fit_static_lda(corpus_of({ { 0, 1 }, { 2 }, { 1, 1, 3 } }, 4), 1, quick(20, 5, 1), 1);
  for (const auto& t : s.doc_theta) {
    REQUIRE(t.size() == 1);
    CHECK(t[0] == 1.0);
  }
}

TEST_CASE("same seed gives bit-identical fits")
{
  const auto sc = synth::generate_corpus(fixture::small_topic_spec(2, 3, 2, 60));
  const auto a = fit_dynamic(sc.tokenized, 3, quick(60, 20, 5), 42);
  const auto b = fit_dynamic(sc.tokenized, 3, quick(60, 20, 5), 42);
  REQUIRE(a.beta.size() == b.beta.size());
  for (std::size_t e = 0; e < a.beta.size(); ++e)
    CHECK(a.beta[e] == b.beta[e]);
  for (std::size_t d = 0; d < a.doc_theta.size(); ++d)
    CHECK(a.doc_theta[d] == b.doc_theta[d]);
  const auto c = fit_dynamic(sc.tokenized, 3, quick(60, 20, 5), 43);
  CHECK(c.beta.back() != a.beta.back());
}

TEST_CASE("zero-token corpus is an error; more topics than documents only warns")
{
  CHECK_THROWS(fit_static_lda(corpus_of({}, 3), 2, quick(), 1));
  CHECK_NOTHROW(fit_static_lda(corpus_of({ { 0, 1 }, { 2 } }, 3), 4, quick(20, 5, 1), 1));
}

TEST_CASE("single-epoch dynamic fit equals the static fit")
{
  const auto sc = synth::generate_corpus(fixture::small_topic_spec(8, 3, 1, 80));
  const auto st = fit_static_lda(sc.tokenized, 3, quick(), 5);
  const auto dy = fit_dynamic(sc.tokenized, 3, quick(), 5);
  REQUIRE(dy.epochs.size() == 1);
  CHECK(dy.beta[0] == st.beta[0]);
}

TEST_CASE("constant planted topics drift little between epochs")
{
  const auto sc = synth::generate_corpus(fixture::small_topic_spec(21, 3, 4, 600));
  const auto s = fit_dynamic(sc.tokenized, 3, quick(), 3);
  REQUIRE(s.beta.size() == 4);
  for (std::size_t e = 1; e < s.beta.size(); ++e)
    for (int k = 0; k < 3; ++k) {
      const double tv = 0.5 * (s.beta[e].row(k) - s.beta[e - 1].row(k)).cwiseAbs().sum();
      CHECK(tv < 0.1);
    }
  check_row_stochastic(s);
}

TEST_CASE("a planted top-word swap shows up near its year")
{
  auto spec = fixture::small_topic_spec(31, 3, 8, 150);
  spec.swap = synth::WordSwap{ 1, 2004 };
  const auto sc = synth::generate_corpus(spec);
  auto hp = quick();
  hp.chain_strength = 20.0;
  const auto s = fit_dynamic(sc.tokenized, 3, hp, 7);

  // fitted topic carrying planted topic 1
  const auto map = fixture::majority_map(fixture::argmax_topics(s), sc.primary_topic);
  int fitted = -1;
  for (const auto& [f, p] : map)
    if (p == 1)
      fitted = f;
  REQUIRE(fitted >= 0);

  // the planted pair before the swap
  Eigen::Index w0, w1;
  Eigen::RowVectorXd row = sc.beta.front().row(1);
  row.maxCoeff(&w0);
  row[w0] = -1.0;
  row.maxCoeff(&w1);

  int first_swapped = -1;
  for (std::size_t e = 0; e < s.epochs.size(); ++e)
    if (s.beta[e](fitted, w1) > s.beta[e](fitted, w0)) {
      first_swapped = s.epochs[e];
      break;
    }
  REQUIRE(first_swapped > 0);
  CHECK(std::abs(first_swapped - 2004) <= 2);
}

TEST_CASE("chain strength controls drift monotonically")
{
  auto spec = fixture::small_topic_spec(12, 3, 3, 60);
  const auto sc = synth::generate_corpus(spec);
  auto drift = [&](double strength) {
    auto hp = quick();
    hp.chain_strength = strength;
    const auto s = fit_dynamic(sc.tokenized, 3, hp, 5);
    double total = 0.0;
    for (std::size_t e = 1; e < s.beta.size(); ++e)
      total += (s.beta[e] - s.beta[e - 1]).cwiseAbs().sum();
    return total;
  };
  const double d0 = drift(0.0), d1 = drift(100.0), d2 = drift(1e6);
  CHECK(d1 < d0);
  CHECK(d2 < d1);
  CHECK(d2 < 0.02);
}

TEST_CASE("an empty year carries beta forward")
{
  auto tc = corpus_of({ { 0, 0, 1 }, { 2, 3, 3 } }, 4, 2000);
  auto later = corpus_of({ { 1, 0 }, { 3, 2 } }, 4, 2002);
  for (auto& d : later.docs) {
    d.id += "b";
    tc.docs.push_back(d);
  }
  const auto s = fit_dynamic(tc, 2, quick(30, 10, 2), 1);
  REQUIRE(s.epochs == std::vector<int>{ 2000, 2001, 2002 });
  CHECK(s.beta[1] == s.beta[0]);
}

TEST_CASE("document mixtures: length K, argmax recovery, unknown ids")
{
  auto spec = fixture::small_topic_spec(5, 4, 1, 200);
  spec.topic_purity = 1.0;
  spec.doc_concentration = 1e6;
  const auto sc = synth::generate_corpus(spec);
  const auto s = fit_static_lda(sc.tokenized, 4, quick(), 2);

  CHECK(doc_topic_distribution(s, sc.tokenized.docs[0].id).size() == 4);
  CHECK_THROWS_AS(doc_topic_distribution(s, "nope"), LookupError);

  const auto fitted = fixture::argmax_topics(s);
  const auto map = fixture::majority_map(fitted, sc.primary_topic);
  for (int planted = 0; planted < 4; ++planted) {
    int hit = 0, total = 0;
    for (std::size_t d = 0; d < fitted.size(); ++d)
      if (sc.primary_topic[d] == planted) {
        ++total;
        hit += map.at(fitted[d]) == planted;
      }
    CHECK(static_cast<double>(hit) / total >= 0.95);
  }
}

TEST_CASE("top words: ordering, truncation, ties")
{
  TopicModelState s;
  s.K = 1;
  s.epochs = { 2000 };
  s.vocab = { "b", "a", "c", "d" };
  Eigen::MatrixXd beta(1, 4);
  beta << 0.3, 0.3, 0.1, 0.3;
  s.beta = { beta };
  CHECK(top_words(s, 0, 0, 3) == std::vector<std::string>{ "a", "b", "d" });
  CHECK(top_words(s, 0, 0, 0).empty());
  CHECK(top_words(s, 0, 0, 99).size() == 4);
  CHECK_THROWS(top_words(s, 1, 0, 2));
  CHECK_THROWS(top_words(s, 0, 1, 2));
}

TEST_CASE("planted top word ranks first after fitting")
{
  const auto sc = synth::generate_corpus(fixture::small_topic_spec(14, 3, 1, 200));
  const auto s = fit_static_lda(sc.tokenized, 3, quick(), 4);
  const auto map = fixture::majority_map(fixture::argmax_topics(s), sc.primary_topic);
  for (const auto& [fitted, planted] : map) {
    Eigen::Index w;
    sc.beta[0].row(planted).maxCoeff(&w);
    CHECK(top_words(s, 0, fitted, 1).front() == sc.tokenized.vocab[w]);
  }
}

TEST_CASE("usage profile and K selection")
{
  // hand-built probe: 6 topics, three used by long documents
  const int K = 6;
  std::vector<std::vector<int>> docs;
  std::vector<int> topic_of;
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < 10; ++i) {
      const bool long_doc = k < 3 ? i < 9 : i < 1;
      docs.push_back(std::vector<int>(long_doc ? 60 : 10, 0));
      topic_of.push_back(k);
    }
  const auto tc = corpus_of(docs, 1);
  TopicModelState probe;
  probe.K = K;
  probe.epochs = { 2000 };
  for (std::size_t d = 0; d < docs.size(); ++d) {
    probe.doc_ids.push_back(tc.docs[d].id);
    probe.doc_years.push_back(2000);
    Eigen::VectorXd t = Eigen::VectorXd::Constant(K, 0.02);
    t[topic_of[d]] = 0.9;
    probe.doc_theta.push_back(t);
  }

  const auto prof = usage_profile(probe, tc, 50);
  REQUIRE(prof.size() == K);
  for (const auto& u : prof) {
    CHECK(u.n_long <= u.n_docs);
    CHECK(u.p >= 0.0);
    CHECK(u.p <= 1.0);
  }
  CHECK(prof[0].p == doctest::Approx(0.9));
  CHECK(prof[5].p == doctest::Approx(0.1));

  SelectOptions so;
  so.w_th = 50;
  const auto sel = select_num_topics(probe, tc, so);
  CHECK(sel.K == 3);
  CHECK(sel.cutoff > 0.1);
  CHECK(sel.cutoff < 0.9);
}

TEST_CASE("identical usage keeps every topic; one used topic is degenerate")
{
  std::vector<std::vector<int>> docs(8, std::vector<int>(60, 0));
  const auto tc = corpus_of(docs, 1);
  TopicModelState probe;
  probe.K = 4;
  probe.epochs = { 2000 };
  for (std::size_t d = 0; d < docs.size(); ++d) {
    probe.doc_ids.push_back(tc.docs[d].id);
    probe.doc_years.push_back(2000);
    Eigen::VectorXd t = Eigen::VectorXd::Constant(4, 0.1);
    t[d % 4] = 0.7;
    probe.doc_theta.push_back(t);
  }
  CHECK(select_num_topics(probe, tc, {}).K == 4);

  for (auto& t : probe.doc_theta) {
    t.setConstant(0.1);
    t[0] = 0.7;
  }
  CHECK_THROWS_AS(select_num_topics(probe, tc, {}), NumericalError);
}

TEST_CASE("checkpoint round trip preserves the state")
{
  const auto sc = synth::generate_corpus(fixture::small_topic_spec(6, 3, 2, 40));
  const auto s = fit_dynamic(sc.tokenized, 3, quick(30, 10, 5), 1);
  std::stringstream buf;
  save_checkpoint(s, buf);
  const auto r = load_checkpoint(buf);
  CHECK(r.K == s.K);
  CHECK(r.epochs == s.epochs);
  CHECK(r.vocab == s.vocab);
  CHECK(r.doc_ids == s.doc_ids);
  for (std::size_t e = 0; e < s.beta.size(); ++e)
    CHECK(r.beta[e] == s.beta[e]);
  for (std::size_t d = 0; d < s.doc_theta.size(); ++d)
    CHECK(r.doc_theta[d] == s.doc_theta[d]);

  std::stringstream bad("{\"format\":\"something-else\"}");
  CHECK_THROWS(load_checkpoint(bad));
}
