#include <doctest.h>

#include <random>

#include "natcap/collaboration.hpp"
#include "natcap/errors.hpp"
#include "oracles.hpp"

using namespace natcap;
using namespace natcap::collaboration;

namespace {

corpus::CountryCredit
credit(std::map<std::string, double> c)
{
  corpus::CountryCredit cc;
  cc.credits = std::move(c);
  return cc;
}

Eigen::VectorXd
vec(std::initializer_list<double> v)
{
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v)
    out[i++] = x;
  return out;
}

} // namespace

TEST_CASE("paper matrix is the credit outer product")
{
  const std::vector<std::string> cs = { "KR", "US" };
  const auto M = paper_collab_matrix(credit({ { "US", 0.6 }, { "KR", 0.4 } }), cs);
  CHECK(M(0, 1) == doctest::Approx(0.24));
  CHECK(M(1, 0) == doctest::Approx(0.24));
  CHECK(M(1, 1) == doctest::Approx(0.36));

  const auto solo = paper_collab_matrix(credit({ { "US", 1.0 } }), cs);
  CHECK(solo(0, 1) == 0.0);

  const std::vector<std::string> three = { "A", "B", "C" };
  const auto T = paper_collab_matrix(credit({ { "A", 1.0 / 3 }, { "B", 1.0 / 3 }, { "C", 1.0 / 3 } }),
                                     three);
  CHECK(T(0, 2) == doctest::Approx(1.0 / 9));
  CHECK(T(1, 2) == doctest::Approx(1.0 / 9));
}

TEST_CASE("off-diagonal mass equals one minus the sum of squared credits")
{
  std::mt19937_64 rng(2);
  const std::vector<std::string> cs = { "A", "B", "C", "D", "E" };
  for (int rep = 0; rep < 200; ++rep) {
    const auto v = oracle::random_simplex(rng, 5, true);
    std::map<std::string, double> c;
    for (int i = 0; i < 5; ++i)
      if (v[i] > 0)
        c[cs[i]] = v[i];
    const auto M = paper_collab_matrix(credit(c), cs);
    const double off = M.sum() - M.diagonal().sum();
    CHECK(off == doctest::Approx(1.0 - v.squaredNorm()).epsilon(1e-12));
    CHECK(off < 1.0);
    CHECK((off == 0.0) == (c.size() == 1));
  }
}

TEST_CASE("cluster weights route a paper's mass")
{
  const auto W = build_collab_tensor(
    { { 2000, credit({ { "US", 0.5 }, { "JP", 0.5 } }), vec({ 1, 0, 0, 0, 0 }) } }, 5);
  const auto us = W.country_index("US"), jp = W.country_index("JP");
  CHECK(W.matrix(0, 0)(us, jp) == doctest::Approx(0.25));
  for (int j = 1; j < 5; ++j)
    CHECK(W.matrix(0, j).isZero());
}

TEST_CASE("cluster decomposition sums to the unweighted total")
{
  std::mt19937_64 rng(9);
  const std::vector<std::string> cs = { "A", "B", "C", "D" };
  std::vector<PaperCollab> papers;
  Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(4, 4);
  for (int p = 0; p < 50; ++p) {
    const auto v = oracle::random_simplex(rng, 4, true);
    std::map<std::string, double> c;
    for (int i = 0; i < 4; ++i)
      if (v[i] > 0)
        c[cs[i]] = v[i];
    // direct summation of outer products, no matrix helper
    for (const auto& [a, x] : c)
      for (const auto& [b, y] : c)
        direct(a[0] - 'A', b[0] - 'A') += x * y;
    papers.push_back({ 2001, credit(c), oracle::random_simplex(rng, 3) });
  }
  const auto W = build_collab_tensor(papers, 3, {}, cs);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(4, 4);
  for (int j = 0; j < 3; ++j) {
    CHECK(W.matrix(0, j) == W.matrix(0, j).transpose());
    sum += W.matrix(0, j);
  }
  CHECK((sum - direct).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((W.total(0) - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("explicit empty years hold zero matrices")
{
  const auto W = build_collab_tensor(
    { { 2000, credit({ { "US", 0.5 }, { "JP", 0.5 } }), vec({ 0.5, 0.5 }) } }, 2, { 2000, 2001 });
  CHECK(W.matrix(W.year_index(2001), 0).isZero());
  CHECK(W.matrix(W.year_index(2001), 1).isZero());
}

TEST_CASE("cluster weights must sum to one")
{
  CHECK_THROWS_AS(build_collab_tensor(
                    { { 2000, credit({ { "US", 1.0 } }), vec({ 0.5, 0.4 }) } }, 2),
                  PreconditionError);
  CHECK_THROWS(build_collab_tensor({ { 2000, credit({ { "US", 1.0 } }), vec({ 1.0 }) } }, 2));
}
