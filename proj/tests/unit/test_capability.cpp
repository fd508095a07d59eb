#include <doctest.h>

#include <random>

#include "natcap/capability.hpp"
#include "natcap/errors.hpp"
#include "oracles.hpp"

using namespace natcap;
using namespace natcap::capability;

namespace {

taxonomy::ClusterAssignment
clusters_of(std::vector<int> cluster_of)
{
  taxonomy::ClusterAssignment a;
  a.cluster_of = std::move(cluster_of);
  a.n_clusters = *std::max_element(a.cluster_of.begin(), a.cluster_of.end()) + 1;
  return a;
}

PaperContribution
contribution(const std::string& id, int year, std::map<std::string, double> credits,
             std::vector<double> theta)
{
  PaperContribution p;
  p.id = id;
  p.year = year;
  p.credit.paper_id = id;
  p.credit.credits = std::move(credits);
  p.theta = Eigen::Map<Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  return p;
}

CapabilityTensor
random_tensor(std::mt19937_64& rng, int years, int countries, int clusters)
{
  std::vector<int> ys(years);
  std::iota(ys.begin(), ys.end(), 2000);
  std::vector<std::string> cs;
  for (int i = 0; i < countries; ++i)
    cs.push_back("C" + std::to_string(i));
  CapabilityTensor R(ys, cs, clusters);
  std::gamma_distribution<double> g(0.7, 3.0);
  for (int t = 0; t < years; ++t)
    for (int i = 0; i < countries; ++i)
      for (int j = 0; j < clusters; ++j)
        R.at(t, i, j) = g(rng);
  return R;
}

// NRCA evaluated directly from its definition.
double
nrca_direct(const CapabilityTensor& R, std::size_t t, std::size_t i, std::size_t j)
{
  double Rt = 0, Ri = 0, Rj = 0;
  for (std::size_t a = 0; a < R.countries().size(); ++a)
    for (int b = 0; b < R.n_clusters(); ++b) {
      Rt += R.at(t, a, b);
      if (a == i)
        Ri += R.at(t, a, b);
      if (b == static_cast<int>(j))
        Rj += R.at(t, a, b);
    }
  return R.at(t, i, j) / Rt - Ri * Rj / (Rt * Rt);
}

} // namespace

TEST_CASE("a single paper in one cluster fills a single cell")
{
  const auto R = build_capability({ contribution("a", 2000, { { "US", 1.0 } }, { 0.0, 1.0, 0.0 }) },
                                  clusters_of({ 0, 1, 1 }));
  CHECK(R.at(0, 0, 1) == 1.0);
  CHECK(R.at(0, 0, 0) == 0.0);
}

TEST_CASE("credit shares split a paper's topic mass")
{
  const auto R = build_capability(
    { contribution("a", 2000, { { "US", 0.6 }, { "KR", 0.4 } }, { 0.25, 0.75 }) },
    clusters_of({ 0, 1 }));
  const auto us = R.country_index("US"), kr = R.country_index("KR");
  CHECK(R.at(0, us, 0) + R.at(0, us, 1) == doctest::Approx(0.6));
  CHECK(R.at(0, us, 1) == doctest::Approx(0.45));
  CHECK(R.at(0, kr, 0) == doctest::Approx(0.1));
}

TEST_CASE("capability equals the dense A^T B product aggregated by cluster")
{
  std::mt19937_64 rng(4);
  const std::vector<std::string> cs = { "CN", "JP", "US" };
  const auto cl = clusters_of({ 0, 0, 1, 2, 1 });
  std::vector<PaperContribution> papers;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(10, 3); // paper x country
  Eigen::MatrixXd B(10, 5);                         // paper x topic
  for (int p = 0; p < 10; ++p) {
    const auto credit = oracle::random_simplex(rng, 3, true);
    const auto theta = oracle::random_simplex(rng, 5);
    std::map<std::string, double> cm;
    for (int c = 0; c < 3; ++c)
      if (credit[c] > 0) {
        cm[cs[c]] = credit[c];
        A(p, c) = credit[c];
      }
    B.row(p) = theta.transpose();
    papers.push_back(
      contribution("p" + std::to_string(p), 2000, cm, { theta.data(), theta.data() + 5 }));
  }
  const Eigen::MatrixXd AB = A.transpose() * B; // country x topic
  const auto R = build_capability(papers, cl);
  for (std::size_t i = 0; i < R.countries().size(); ++i) {
    const int c = static_cast<int>(std::find(cs.begin(), cs.end(), R.countries()[i]) - cs.begin());
    for (int j = 0; j < 3; ++j) {
      double expected = 0.0;
      for (int k = 0; k < 5; ++k)
        if (cl.cluster_of[k] == j)
          expected += AB(c, k);
      CHECK(R.at(0, i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < R.countries().size(); ++i)
    for (int j = 0; j < 3; ++j)
      mass += R.at(0, i, j);
  CHECK(mass == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("build_capability names the offending paper")
{
  try {
    build_capability({ contribution("bad-7", 2000, {}, { 1.0 }) }, clusters_of({ 0 }));
    FAIL("expected an error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("bad-7") != std::string::npos);
  }
  CHECK_THROWS(build_capability({ contribution("m", 2000, { { "US", 1 } }, {}) }, clusters_of({ 0 })));
}

TEST_CASE("NRCA examples")
{
  // proportional country: shares equal global shares
  CapabilityTensor R({ 2000 }, { "A", "B" }, 2);
  R.at(0, 0, 0) = 1;
  R.at(0, 0, 1) = 3;
  R.at(0, 1, 0) = 2;
  R.at(0, 1, 1) = 6;
  auto N = nrca(R);
  for (int j = 0; j < 2; ++j)
    CHECK(std::abs(N.values.at(0, 0, j)) < 1e-15);

  CapabilityTensor one({ 2000, 2001 }, { "A" }, 1);
  one.at(0, 0, 0) = 5;
  one.at(1, 0, 0) = 2;
  N = nrca(one);
  CHECK(N.values.at(0, 0, 0) == 0.0);
  CHECK(N.values.at(1, 0, 0) == 0.0);
  CHECK(N.binary.at(0, 0, 0) == 0.0);
}

TEST_CASE("NRCA on a 3x2 hand tensor")
{
  CapabilityTensor R({ 2000 }, { "A", "B", "C" }, 2);
  const double v[3][2] = { { 4, 1 }, { 1, 2 }, { 0, 2 } };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      R.at(0, i, j) = v[i][j];
  const auto N = nrca(R);
  // R_t = 10; column totals 5, 5; row totals 5, 3, 2
  CHECK(N.values.at(0, 0, 0) == doctest::Approx(4.0 / 10 - 5.0 * 5 / 100));
  CHECK(N.values.at(0, 1, 1) == doctest::Approx(2.0 / 10 - 3.0 * 5 / 100));
  CHECK(N.values.at(0, 2, 0) == doctest::Approx(0.0 - 2.0 * 5 / 100));
  CHECK(N.binary.at(0, 0, 0) == 1.0);
  CHECK(N.binary.at(0, 2, 0) == 0.0);
  CHECK(N.binary_vector(0, 0) == std::vector<int>{ 1, 0 });
}

TEST_CASE("NRCA zero-sum identities, scale invariance and binarization")
{
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    const int Y = 1 + rng() % 3, C = 1 + rng() % 20, J = 1 + rng() % 5;
    auto R = random_tensor(rng, Y, C, J);
    const auto N = nrca(R);
    for (int t = 0; t < Y; ++t) {
      for (int i = 0; i < C; ++i) {
        double s = 0;
        for (int j = 0; j < J; ++j) {
          s += N.values.at(t, i, j);
          CHECK(N.values.at(t, i, j) == doctest::Approx(nrca_direct(R, t, i, j)).epsilon(1e-12));
          CHECK(N.binary.at(t, i, j) == (N.values.at(t, i, j) > 0 ? 1.0 : 0.0));
        }
        CHECK(std::abs(s) < 1e-9);
      }
      for (int j = 0; j < J; ++j) {
        double s = 0;
        for (int i = 0; i < C; ++i)
          s += N.values.at(t, i, j);
        CHECK(std::abs(s) < 1e-9);
      }
    }
    auto scaled = R;
    for (int i = 0; i < C; ++i)
      for (int j = 0; j < J; ++j)
        scaled.at(0, i, j) *= 37.5;
    const auto M = nrca(scaled);
    for (int i = 0; i < C; ++i)
      for (int j = 0; j < J; ++j)
        CHECK(std::abs(M.values.at(0, i, j) - N.values.at(0, i, j)) < 1e-9);
  }
}

TEST_CASE("years with zero mass are dropped from NRCA")
{
  CapabilityTensor R({ 2000, 2001 }, { "A", "B" }, 2);
  R.at(1, 0, 0) = 1;
  R.at(1, 1, 1) = 1;
  const auto N = nrca(R);
  CHECK(N.values.years() == std::vector<int>{ 2001 });
}

TEST_CASE("capability distance examples and metric range")
{
  CHECK(capability_distance({ 1, 0, 1 }, { 1, 0, 1 }) == 0.0);
  CHECK(capability_distance({ 1, 0 }, { 0, 1 }) == 1.0);
  CHECK(capability_distance({ 1, 1, 0, 0, 0 }, { 1, 0, 1, 0, 0 }) == doctest::Approx(2.0 / 3.0));
  CHECK(capability_distance({ 0, 0 }, { 0, 0 }) == 0.0);
  CHECK_THROWS(capability_distance({ 1 }, { 1, 0 }));
  for (int a = 0; a < 32; ++a)
    for (int b = 0; b < 32; ++b) {
      std::vector<int> va(5), vb(5);
      for (int j = 0; j < 5; ++j) {
        va[j] = (a >> j) & 1;
        vb[j] = (b >> j) & 1;
      }
      const double d = capability_distance(va, vb);
      CHECK((d == 0.0 || (d >= 0.2 - 1e-12 && d <= 1.0)));
    }
}

TEST_CASE("rank series: ordering and min ties")
{
  Tensor3 v({ 2000, 2001 }, { "A", "B", "C" }, 1);
  v.at(0, 0, 0) = 0.2;
  v.at(0, 1, 0) = -0.2;
  v.at(0, 2, 0) = 0.2;
  v.at(1, 0, 0) = -0.1;
  v.at(1, 1, 0) = 0.3;
  v.at(1, 2, 0) = 0.0;
  const NrcaTensor n{ v, v };
  const auto rows = rank_series(n, 0);
  std::map<std::pair<int, std::string>, int> rank;
  for (const auto& r : rows)
    rank[{ r.year, r.country }] = r.rank;
  CHECK(rank[{ 2000, "A" }] == 1);
  CHECK(rank[{ 2000, "C" }] == 1);
  CHECK(rank[{ 2000, "B" }] == 3);
  CHECK(rank[{ 2001, "B" }] == 1);
  CHECK(rank[{ 2001, "C" }] == 2);
  CHECK(rank[{ 2001, "A" }] == 3);

  const auto two = rank_series(n, 0, { "A", "B" });
  for (const auto& r : two)
    CHECK(r.country != "C");
  CHECK_THROWS(rank_series(n, 1));
}

TEST_CASE("planted dominance holds rank 1 every year")
{
  std::mt19937_64 rng(1);
  auto R = random_tensor(rng, 10, 6, 3);
  for (int t = 0; t < 10; ++t)
    R.at(t, 4, 2) *= 50.0;
  const auto rows = rank_series(nrca(R), 2);
  for (const auto& r : rows)
    if (r.country == "C4")
      CHECK(r.rank == 1);
}

TEST_CASE("LOESS reproduces constants and lines")
{
  std::vector<double> x, c, line;
  for (int i = 0; i < 25; ++i) {
    x.push_back(1990 + i);
    c.push_back(4.0);
    line.push_back(2.0 * (1990 + i) + 1.0);
  }
  for (double v : loess_smooth(x, c))
    CHECK(v == doctest::Approx(4.0).epsilon(1e-12));
  const auto fitted = loess_smooth(x, line);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(fitted[i] - line[i]) < 1e-9);
}

TEST_CASE("LOESS matches the independent reference on a noisy sine")
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<double> x, y;
  for (int i = 0; i < 41; ++i) {
    x.push_back(i * 0.25 + (i % 3) * 0.01);
    y.push_back(std::sin(x.back()) + noise(rng));
  }
  for (double span : { 0.3, 0.5, 0.75, 1.0 }) {
    const auto a = loess_smooth(x, y, span), b = oracle::loess(x, y, span);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(std::abs(a[i] - b[i]) < 1e-6);
  }
}

TEST_CASE("LOESS edge cases")
{
  const std::vector<double> x = { 1, 2 }, y = { 5, 7 };
  CHECK(loess_smooth(x, y) == y);
  CHECK_THROWS(loess_smooth({ 1, 2, 3 }, { 1, 2, 3 }, 0.0));
  CHECK_THROWS(loess_smooth({ 1, 2, 3 }, { 1, 2, 3 }, 1.5));
  CHECK_THROWS(loess_smooth({ 1, 2, 3 }, { 1, 2 }));
}

TEST_CASE("country filter is strict and ordered by total")
{
  const std::map<std::string, double> totals = {
    { "US", 7646.4 }, { "JP", 3000.0 }, { "KR", 250.0 }, { "DE", 250.5 }, { "XX", 0.0 }
  };
  CHECK(country_filter(totals) == std::vector<std::string>{ "US", "JP", "DE" });
  CHECK(country_filter(totals, 0.0) == std::vector<std::string>{ "US", "JP", "DE", "KR" });

  // large summary fixture: 14 countries above the threshold, US first
  std::map<std::string, double> t1;
  const std::vector<std::string> codes = { "US", "JP", "CN", "DE", "GB", "RU", "FR", "IT",
                                           "KR", "CH", "IN", "SE", "CA", "NL", "ES", "PT" };
  for (std::size_t i = 0; i < codes.size(); ++i)
    t1[codes[i]] = i < 14 ? 7646.4 - 500.0 * i : 200.0;
  const auto top = country_filter(t1);
  CHECK(top.size() == 14);
  CHECK(top.front() == "US");
}
