#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "natcap/topicmodel.hpp"

namespace natcap::taxonomy {

//! Square root of the base-2 Jensen-Shannon divergence; lies in [0, 1].
double
js_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

//! Pairwise js_distance between the topic rows of one epoch.
Eigen::MatrixXd
topic_distance_matrix(const topicmodel::TopicModelState& state, int year);

//! Same, for the last epoch.
Eigen::MatrixXd
topic_distance_matrix(const topicmodel::TopicModelState& state);

enum class WardVariant
{
  //! Lance-Williams Ward update on the distances as given
  ward_d,
  //! update on squared distances, heights reported as square roots
  ward_d2,
};

//! Node ids: leaves are 0..n-1, merge i creates node n + i.
struct Merge
{
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram
{
  int n_leaves = 0;
  std::vector<Merge> merges;
  //! optional leaf names used by the Newick export
  std::vector<std::string> leaf_labels;
};

Dendrogram
ward_cluster(const Eigen::MatrixXd& distances,
             WardVariant variant = WardVariant::ward_d);

struct ClusterAssignment
{
  //! topic -> cluster id; ids are contiguous from 0, numbered in order of
  //! each cluster's smallest topic index
  std::vector<int> cluster_of;
  int n_clusters = 0;
  std::map<int, std::string> labels;

  //! topics belonging to cluster `c`
  std::vector<int> members(int c) const;
};

ClusterAssignment
cut_tree(const Dendrogram& tree, int n_clusters);

std::string
to_newick(const Dendrogram& tree);

std::string
to_json(const Dendrogram& tree);

Dendrogram
dendrogram_from_json(const std::string& text);

} // namespace natcap::taxonomy
