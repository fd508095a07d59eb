#include "natcap/taxonomy.hpp"
#include "natcap/errors.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace natcap::taxonomy {

double
js_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
  if (p.size() != q.size())
    throw PreconditionError("js_distance: dimension mismatch");
  double div = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0)
      div += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0)
      div += 0.5 * q[i] * std::log2(q[i] / m);
  }
  // rounding can leave a tiny negative or push past 1
  return std::sqrt(std::clamp(div, 0.0, 1.0));
}

Eigen::MatrixXd
topic_distance_matrix(const topicmodel::TopicModelState& state, int year)
{
  const auto& beta = state.beta[state.epoch_index(year)];
  const Eigen::Index K = beta.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = i + 1; j < K; ++j) {
      d(i, j) = js_distance(beta.row(i).transpose(), beta.row(j).transpose());
      d(j, i) = d(i, j);
    }
  return d;
}

Eigen::MatrixXd
topic_distance_matrix(const topicmodel::TopicModelState& state)
{
  if (state.epochs.empty())
    throw LookupError("model has no epochs");
  return topic_distance_matrix(state, state.epochs.back());
}

Dendrogram
ward_cluster(const Eigen::MatrixXd& distances, WardVariant variant)
{
  const Eigen::Index n = distances.rows();
  if (n < 1 || distances.cols() != n)
    throw PreconditionError("distance matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0)
      throw PreconditionError("distance matrix must have a zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (distances(i, j) != distances(j, i))
        throw PreconditionError("distance matrix is not symmetric");
      if (distances(i, j) < 0.0 || !std::isfinite(distances(i, j)))
        throw PreconditionError("distances must be finite and non-negative");
    }
  }

  Eigen::MatrixXd d = distances;
  if (variant == WardVariant::ward_d2)
    d = d.cwiseAbs2();

  Dendrogram tree;
  tree.n_leaves = static_cast<int>(n);
  std::vector<bool> active(n, true);
  std::vector<int> node(n), size(n, 1), min_leaf(n);
  std::iota(node.begin(), node.end(), 0);
  std::iota(min_leaf.begin(), min_leaf.end(), 0);

  for (Eigen::Index step = 0; step + 1 < n; ++step) {
    Eigen::Index bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i])
        continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (!active[j])
          continue;
        const double v = d(i, j);
        bool better = v < best;
        if (!better && v == best) {
          // tie: prefer the pair whose smaller leaf, then larger leaf, is lowest
          auto key = [&](Eigen::Index a, Eigen::Index b) {
            return std::pair{ std::min(min_leaf[a], min_leaf[b]),
                              std::max(min_leaf[a], min_leaf[b]) };
          };
          better = key(i, j) < key(bi, bj);
        }
        if (better) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }

    const double ni = size[bi], nj = size[bj];
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj)
        continue;
      const double nk = size[k];
      const double updated =
        ((ni + nk) * d(bi, k) + (nj + nk) * d(bj, k) - nk * best) / (ni + nj + nk);
      d(bi, k) = updated;
      d(k, bi) = updated;
    }

    Merge m;
    int a = node[bi], b = node[bj];
    if (min_leaf[bj] < min_leaf[bi])
      std::swap(a, b);
    m.left = a;
    m.right = b;
    m.height = variant == WardVariant::ward_d2 ? std::sqrt(best) : best;
    m.size = size[bi] + size[bj];
    tree.merges.push_back(m);

    node[bi] = static_cast<int>(n + step);
    size[bi] += size[bj];
    min_leaf[bi] = std::min(min_leaf[bi], min_leaf[bj]);
    active[bj] = false;
  }
  return tree;
}

std::vector<int>
ClusterAssignment::members(int c) const
{
  std::vector<int> out;
  for (std::size_t t = 0; t < cluster_of.size(); ++t)
    if (cluster_of[t] == c)
      out.push_back(static_cast<int>(t));
  return out;
}

namespace {

struct UnionFind
{
  std::vector<int> parent;
  explicit UnionFind(int n)
    : parent(n)
  {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x)
  {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Any leaf under `node`, found by descending left branches.
int
some_leaf(const Dendrogram& tree, int node)
{
  while (node >= tree.n_leaves)
    node = tree.merges[node - tree.n_leaves].left;
  return node;
}

} // namespace

ClusterAssignment
cut_tree(const Dendrogram& tree, int n_clusters)
{
  const int n = tree.n_leaves;
  if (n_clusters < 1 || n_clusters > n)
    throw PreconditionError("cluster count must lie in [1, n_leaves]");
  UnionFind uf(n);
  for (int i = 0; i < n - n_clusters; ++i) {
    const auto& m = tree.merges[i];
    uf.unite(some_leaf(tree, m.left), some_leaf(tree, m.right));
  }
  ClusterAssignment out;
  out.cluster_of.assign(n, -1);
  std::vector<int> id_of_root(n, -1);
  int next = 0;
  for (int leaf = 0; leaf < n; ++leaf) {
    int root = uf.find(leaf);
    if (id_of_root[root] < 0)
      id_of_root[root] = next++;
    out.cluster_of[leaf] = id_of_root[root];
  }
  out.n_clusters = next;
  return out;
}

std::string
to_newick(const Dendrogram& tree)
{
  const int n = tree.n_leaves;
  auto leaf_name = [&](int leaf) {
    if (static_cast<std::size_t>(leaf) < tree.leaf_labels.size())
      return tree.leaf_labels[leaf];
    return "T" + std::to_string(leaf);
  };
  auto height = [&](int node) {
    return node < n ? 0.0 : tree.merges[node - n].height;
  };
  std::ostringstream os;
  os.precision(10);
  std::function<void(int)> emit = [&](int node) {
    if (node < n) {
      os << leaf_name(node);
      return;
    }
    const auto& m = tree.merges[node - n];
    os << '(';
    emit(m.left);
    os << ':' << m.height - height(m.left) << ',';
    emit(m.right);
    os << ':' << m.height - height(m.right) << ')';
  };
  if (n == 1)
    os << leaf_name(0);
  else
    emit(n + static_cast<int>(tree.merges.size()) - 1);
  os << ';';
  return os.str();
}

std::string
to_json(const Dendrogram& tree)
{
  nlohmann::json j;
  j["n_leaves"] = tree.n_leaves;
  j["leaf_labels"] = tree.leaf_labels;
  j["merges"] = nlohmann::json::array();
  for (const auto& m : tree.merges)
    j["merges"].push_back(
      { { "left", m.left }, { "right", m.right }, { "height", m.height }, { "size", m.size } });
  return j.dump(2);
}

Dendrogram
dendrogram_from_json(const std::string& text)
{
  try {
    auto j = nlohmann::json::parse(text);
    Dendrogram tree;
    tree.n_leaves = j.at("n_leaves").get<int>();
    tree.leaf_labels = j.value("leaf_labels", std::vector<std::string>{});
    for (const auto& m : j.at("merges"))
      tree.merges.push_back({ m.at("left").get<int>(), m.at("right").get<int>(),
                              m.at("height").get<double>(), m.at("size").get<int>() });
    if (static_cast<int>(tree.merges.size()) != std::max(tree.n_leaves - 1, 0))
      throw ParseError(1, "dendrogram must have n_leaves - 1 merges");
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("dendrogram: ") + e.what());
  }
}

} // namespace natcap::taxonomy
