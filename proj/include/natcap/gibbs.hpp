#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "natcap/random.hpp"

namespace natcap::topicmodel {

enum class InitMode
{
  //! topics drawn uniformly at random
  uniform,
  //! each token drawn from the conditional given the tokens seen so far;
  //! keeps topic identities aligned with an informative word prior
  sequential,
};

//! Collapsed Gibbs sampler for LDA with an arbitrary (K x V) topic-word
//! Dirichlet prior and a length-K document-topic prior.
class GibbsSampler
{
public:
  GibbsSampler(std::vector<std::vector<int>> docs,
               Eigen::VectorXd alpha,
               const Eigen::MatrixXd& topic_word_prior,
               std::uint64_t seed,
               InitMode init = InitMode::uniform);

  void sweep();

  //! Adds the current state's smoothed estimates to the running means.
  void accumulate();

  //! Posterior-mean topic-word matrix (K x V). Falls back to the current
  //! state when nothing was accumulated.
  Eigen::MatrixXd beta() const;
  //! Posterior-mean topic mixture of every document.
  std::vector<Eigen::VectorXd> theta() const;

  const std::vector<std::vector<int>>& assignments() const { return z_; }
  int num_topics() const { return K_; }
  int vocab_size() const { return V_; }

private:
  Eigen::MatrixXd current_beta() const;
  Eigen::VectorXd current_theta(std::size_t d) const;
  int draw(std::size_t d, int w);
  double uniform();

  int K_;
  int V_;
  std::vector<std::vector<int>> docs_;
  std::vector<std::vector<int>> z_;
  Eigen::VectorXd alpha_;
  double alpha_sum_;
  // word-major layout: entry (w, k) at w * K + k
  std::vector<double> prior_;
  std::vector<double> prior_row_sum_;
  std::vector<int> n_wk_;
  std::vector<int> n_k_;
  std::vector<std::vector<int>> n_dk_;
  std::vector<double> scratch_;
  std::mt19937_64 rng_;

  Eigen::MatrixXd beta_acc_;
  std::vector<Eigen::VectorXd> theta_acc_;
  int n_acc_ = 0;
};

} // namespace natcap::topicmodel
