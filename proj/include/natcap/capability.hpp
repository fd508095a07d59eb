#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "natcap/corpus.hpp"
#include "natcap/taxonomy.hpp"

namespace natcap::capability {

//! One paper's inputs to the capability tensor.
struct PaperContribution
{
  std::string id;
  int year = 0;
  corpus::CountryCredit credit;
  //! topic mixture (length K)
  Eigen::VectorXd theta;
};

//! Dense year x country x cluster tensor, row-major in that order.
class Tensor3
{
public:
  Tensor3() = default;
  Tensor3(std::vector<int> years, std::vector<std::string> countries, int n_clusters);

  double& at(std::size_t t, std::size_t i, std::size_t j);
  double at(std::size_t t, std::size_t i, std::size_t j) const;

  const std::vector<int>& years() const { return years_; }
  const std::vector<std::string>& countries() const { return countries_; }
  int n_clusters() const { return n_clusters_; }

  //! throws LookupError when absent
  std::size_t year_index(int year) const;
  std::size_t country_index(const std::string& code) const;

private:
  std::vector<int> years_;
  std::vector<std::string> countries_;
  int n_clusters_ = 0;
  std::vector<double> data_;
};

//! Fractional publication mass R[t][country][cluster].
class CapabilityTensor : public Tensor3
{
public:
  using Tensor3::Tensor3;

  double country_total(std::size_t t, std::size_t i) const;  // R^i_t
  double cluster_total(std::size_t t, std::size_t j) const;  // R_{j,t}
  double year_total(std::size_t t) const;                    // R_t
};

//! Signed NRCA values plus their positive-part indicator.
struct NrcaTensor
{
  Tensor3 values;
  Tensor3 binary;

  //! binary advantage vector of one country-year over all clusters
  std::vector<int> binary_vector(std::size_t t, std::size_t i) const;
};

//! Per cluster, sums of theta over the cluster's topics.
Eigen::VectorXd
cluster_weights(const Eigen::VectorXd& theta, const taxonomy::ClusterAssignment& clusters);

//! Years are the distinct paper years; countries the sorted union of credited
//! countries.
CapabilityTensor
build_capability(const std::vector<PaperContribution>& papers,
                 const taxonomy::ClusterAssignment& clusters);

//! Years with zero total mass are dropped with a warning.
NrcaTensor
nrca(const CapabilityTensor& R);

//! Jaccard distance between the positive sets; two empty sets are at 0.
double
capability_distance(const std::vector<int>& a, const std::vector<int>& b);

struct RankRow
{
  int year = 0;
  std::string country;
  int rank = 0;
};

//! Rank 1 is the largest NRCA; tied values share the smallest rank of the
//! tie ("min" ranking). An empty `countries` ranks every country.
std::vector<RankRow>
rank_series(const NrcaTensor& nrca, int cluster, const std::vector<std::string>& countries = {});

//! Local linear regression with tricube weights over the nearest
//! floor(span * n) points, evaluated at every x.
std::vector<double>
loess_smooth(const std::vector<double>& x, const std::vector<double>& y, double span = 0.75);

//! Countries whose fractional total is strictly above `min_papers`, largest
//! first.
std::vector<std::string>
country_filter(const std::vector<corpus::PaperRecord>& records, double min_papers = 250.0);

std::vector<std::string>
country_filter(const std::map<std::string, double>& totals, double min_papers = 250.0);

} // namespace natcap::capability
