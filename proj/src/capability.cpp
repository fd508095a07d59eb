#include "natcap/capability.hpp"
#include "natcap/errors.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

namespace natcap::capability {

Tensor3::Tensor3(std::vector<int> years, std::vector<std::string> countries, int n_clusters)
  : years_(std::move(years))
  , countries_(std::move(countries))
  , n_clusters_(n_clusters)
  , data_(years_.size() * countries_.size() * static_cast<std::size_t>(n_clusters), 0.0)
{
  if (n_clusters < 1)
    throw PreconditionError("tensor needs at least one cluster");
}

double&
Tensor3::at(std::size_t t, std::size_t i, std::size_t j)
{
  return data_[(t * countries_.size() + i) * n_clusters_ + j];
}

double
Tensor3::at(std::size_t t, std::size_t i, std::size_t j) const
{
  return data_[(t * countries_.size() + i) * n_clusters_ + j];
}

std::size_t
Tensor3::year_index(int year) const
{
  auto it = std::find(years_.begin(), years_.end(), year);
  if (it == years_.end())
    throw LookupError("year " + std::to_string(year) + " not in tensor");
  return static_cast<std::size_t>(it - years_.begin());
}

std::size_t
Tensor3::country_index(const std::string& code) const
{
  auto it = std::find(countries_.begin(), countries_.end(), code);
  if (it == countries_.end())
    throw LookupError("country " + code + " not in tensor");
  return static_cast<std::size_t>(it - countries_.begin());
}

double
CapabilityTensor::country_total(std::size_t t, std::size_t i) const
{
  double s = 0.0;
  for (int j = 0; j < n_clusters(); ++j)
    s += at(t, i, j);
  return s;
}

double
CapabilityTensor::cluster_total(std::size_t t, std::size_t j) const
{
  double s = 0.0;
  for (std::size_t i = 0; i < countries().size(); ++i)
    s += at(t, i, j);
  return s;
}

double
CapabilityTensor::year_total(std::size_t t) const
{
  double s = 0.0;
  for (std::size_t i = 0; i < countries().size(); ++i)
    s += country_total(t, i);
  return s;
}

std::vector<int>
NrcaTensor::binary_vector(std::size_t t, std::size_t i) const
{
  std::vector<int> v(binary.n_clusters());
  for (int j = 0; j < binary.n_clusters(); ++j)
    v[j] = binary.at(t, i, j) > 0.5 ? 1 : 0;
  return v;
}

Eigen::VectorXd
cluster_weights(const Eigen::VectorXd& theta, const taxonomy::ClusterAssignment& clusters)
{
  if (static_cast<std::size_t>(theta.size()) != clusters.cluster_of.size())
    throw PreconditionError("cluster map does not cover every topic");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(clusters.n_clusters);
  for (Eigen::Index k = 0; k < theta.size(); ++k)
    w[clusters.cluster_of[k]] += theta[k];
  return w;
}

CapabilityTensor
build_capability(const std::vector<PaperContribution>& papers,
                 const taxonomy::ClusterAssignment& clusters)
{
  std::set<int> year_set;
  std::set<std::string> country_set;
  for (const auto& p : papers) {
    if (p.credit.credits.empty())
      throw PreconditionError("paper " + p.id + " has no country credits");
    if (p.theta.size() == 0)
      throw PreconditionError("paper " + p.id + " has no topic mixture");
    year_set.insert(p.year);
    for (const auto& [c, _] : p.credit.credits)
      country_set.insert(c);
  }

  CapabilityTensor R({ year_set.begin(), year_set.end() },
                     { country_set.begin(), country_set.end() },
                     clusters.n_clusters);
  for (const auto& p : papers) {
    if (static_cast<std::size_t>(p.theta.size()) != clusters.cluster_of.size())
      throw PreconditionError("paper " + p.id + ": topic mixture length does not match the cluster map");
    const auto t = R.year_index(p.year);
    const Eigen::VectorXd w = cluster_weights(p.theta, clusters);
    for (const auto& [c, share] : p.credit.credits) {
      const auto i = R.country_index(c);
      for (int j = 0; j < clusters.n_clusters; ++j)
        R.at(t, i, j) += share * w[j];
    }
  }
  return R;
}

NrcaTensor
nrca(const CapabilityTensor& R)
{
  std::vector<std::size_t> kept;
  std::vector<int> years;
  for (std::size_t t = 0; t < R.years().size(); ++t) {
    if (R.year_total(t) > 0.0) {
      kept.push_back(t);
      years.push_back(R.years()[t]);
    } else {
      spdlog::warn("year {} has zero capability mass; excluded from NRCA", R.years()[t]);
    }
  }

  NrcaTensor out{ Tensor3(years, R.countries(), R.n_clusters()),
                  Tensor3(years, R.countries(), R.n_clusters()) };
  const std::size_t nc = R.countries().size();
  const int nk = R.n_clusters();
  for (std::size_t s = 0; s < kept.size(); ++s) {
    const auto t = kept[s];
    const double total = R.year_total(t);
    std::vector<double> row(nc), col(nk);
    for (std::size_t i = 0; i < nc; ++i)
      row[i] = R.country_total(t, i);
    for (int j = 0; j < nk; ++j)
      col[j] = R.cluster_total(t, j);
    for (std::size_t i = 0; i < nc; ++i)
      for (int j = 0; j < nk; ++j) {
        const double v = R.at(t, i, j) / total - row[i] * col[j] / (total * total);
        out.values.at(s, i, j) = v;
        out.binary.at(s, i, j) = v > 0.0 ? 1.0 : 0.0;
      }
  }
  return out;
}

double
capability_distance(const std::vector<int>& a, const std::vector<int>& b)
{
  if (a.size() != b.size())
    throw PreconditionError("capability vectors differ in length");
  int inter = 0, uni = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const bool x = a[j] != 0, y = b[j] != 0;
    inter += x && y;
    uni += x || y;
  }
  if (uni == 0)
    return 0.0;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<RankRow>
rank_series(const NrcaTensor& nrca, int cluster, const std::vector<std::string>& countries)
{
  const auto& v = nrca.values;
  if (cluster < 0 || cluster >= v.n_clusters())
    throw PreconditionError("cluster index out of range");
  std::vector<std::size_t> idx;
  if (countries.empty()) {
    for (std::size_t i = 0; i < v.countries().size(); ++i)
      idx.push_back(i);
  } else {
    for (const auto& c : countries)
      idx.push_back(v.country_index(c));
  }

  std::vector<RankRow> out;
  for (std::size_t t = 0; t < v.years().size(); ++t) {
    for (auto i : idx) {
      const double mine = v.at(t, i, cluster);
      int higher = 0;
      for (auto k : idx)
        higher += v.at(t, k, cluster) > mine;
      out.push_back({ v.years()[t], v.countries()[i], higher + 1 });
    }
  }
  return out;
}

std::vector<std::string>
country_filter(const std::map<std::string, double>& totals, double min_papers)
{
  std::vector<std::pair<std::string, double>> kept;
  for (const auto& [c, total] : totals)
    if (total > min_papers)
      kept.emplace_back(c, total);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (auto& [c, _] : kept)
    out.push_back(c);
  return out;
}

std::vector<std::string>
country_filter(const std::vector<corpus::PaperRecord>& records, double min_papers)
{
  return country_filter(corpus::country_totals(records), min_papers);
}

} // namespace natcap::capability
