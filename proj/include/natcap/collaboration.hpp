#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "natcap/corpus.hpp"

namespace natcap::collaboration {

//! Outer product of a paper's credit vector with itself, over `countries`.
//! Only off-diagonal entries count as collaboration.
Eigen::MatrixXd
paper_collab_matrix(const corpus::CountryCredit& credit,
                    const std::vector<std::string>& countries);

struct PaperCollab
{
  int year = 0;
  corpus::CountryCredit credit;
  //! theta mass per cluster; must sum to one
  Eigen::VectorXd cluster_weights;
};

//! Symmetric matrices w[year][cluster] over a fixed country list.
class CollaborationTensor
{
public:
  CollaborationTensor() = default;
  CollaborationTensor(std::vector<int> years, std::vector<std::string> countries, int n_clusters);

  const Eigen::MatrixXd& matrix(std::size_t t, int cluster) const;
  Eigen::MatrixXd& matrix(std::size_t t, int cluster);
  //! sum over clusters
  Eigen::MatrixXd total(std::size_t t) const;

  const std::vector<int>& years() const { return years_; }
  const std::vector<std::string>& countries() const { return countries_; }
  int n_clusters() const { return n_clusters_; }
  std::size_t year_index(int year) const;
  std::size_t country_index(const std::string& code) const;

private:
  std::vector<int> years_;
  std::vector<std::string> countries_;
  int n_clusters_ = 0;
  std::vector<Eigen::MatrixXd> data_;
};

//! Aggregates cluster-weighted paper matrices by year. Empty `years` or
//! `countries` are derived from the papers; listed years without papers get
//! zero matrices.
CollaborationTensor
build_collab_tensor(const std::vector<PaperCollab>& papers,
                    int n_clusters,
                    std::vector<int> years = {},
                    std::vector<std::string> countries = {});

} // namespace natcap::collaboration
