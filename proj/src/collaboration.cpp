#include "natcap/collaboration.hpp"
#include "natcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace natcap::collaboration {

Eigen::MatrixXd
paper_collab_matrix(const corpus::CountryCredit& credit,
                    const std::vector<std::string>& countries)
{
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(countries.size()));
  for (const auto& [c, share] : credit.credits) {
    auto it = std::find(countries.begin(), countries.end(), c);
    if (it == countries.end())
      throw LookupError("country " + c + " missing from the collaboration index");
    v[it - countries.begin()] = share;
  }
  return v * v.transpose();
}

CollaborationTensor::CollaborationTensor(std::vector<int> years,
                                         std::vector<std::string> countries,
                                         int n_clusters)
  : years_(std::move(years))
  , countries_(std::move(countries))
  , n_clusters_(n_clusters)
{
  if (n_clusters < 1)
    throw PreconditionError("collaboration tensor needs at least one cluster");
  const auto n = static_cast<Eigen::Index>(countries_.size());
  data_.assign(years_.size() * static_cast<std::size_t>(n_clusters), Eigen::MatrixXd::Zero(n, n));
}

const Eigen::MatrixXd&
CollaborationTensor::matrix(std::size_t t, int cluster) const
{
  return data_[t * n_clusters_ + cluster];
}

Eigen::MatrixXd&
CollaborationTensor::matrix(std::size_t t, int cluster)
{
  return data_[t * n_clusters_ + cluster];
}

Eigen::MatrixXd
CollaborationTensor::total(std::size_t t) const
{
  Eigen::MatrixXd sum = matrix(t, 0);
  for (int j = 1; j < n_clusters_; ++j)
    sum += matrix(t, j);
  return sum;
}

std::size_t
CollaborationTensor::year_index(int year) const
{
  auto it = std::find(years_.begin(), years_.end(), year);
  if (it == years_.end())
    throw LookupError("year " + std::to_string(year) + " not in collaboration tensor");
  return static_cast<std::size_t>(it - years_.begin());
}

std::size_t
CollaborationTensor::country_index(const std::string& code) const
{
  auto it = std::find(countries_.begin(), countries_.end(), code);
  if (it == countries_.end())
    throw LookupError("country " + code + " not in collaboration tensor");
  return static_cast<std::size_t>(it - countries_.begin());
}

CollaborationTensor
build_collab_tensor(const std::vector<PaperCollab>& papers,
                    int n_clusters,
                    std::vector<int> years,
                    std::vector<std::string> countries)
{
  if (years.empty()) {
    std::set<int> ys;
    for (const auto& p : papers)
      ys.insert(p.year);
    years.assign(ys.begin(), ys.end());
  }
  if (countries.empty()) {
    std::set<std::string> cs;
    for (const auto& p : papers)
      for (const auto& [c, _] : p.credit.credits)
        cs.insert(c);
    countries.assign(cs.begin(), cs.end());
  }

  CollaborationTensor out(std::move(years), std::move(countries), n_clusters);
  for (const auto& p : papers) {
    if (p.cluster_weights.size() != n_clusters)
      throw PreconditionError("paper " + p.credit.paper_id + ": wrong cluster weight length");
    if (std::abs(p.cluster_weights.sum() - 1.0) > 1e-9)
      throw PreconditionError("paper " + p.credit.paper_id + ": cluster weights must sum to 1");
    const auto t = out.year_index(p.year);
    const Eigen::MatrixXd m = paper_collab_matrix(p.credit, out.countries());
    for (int j = 0; j < n_clusters; ++j)
      if (p.cluster_weights[j] != 0.0)
        out.matrix(t, j) += p.cluster_weights[j] * m;
  }
  return out;
}

} // namespace natcap::collaboration
