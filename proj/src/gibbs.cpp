#include "natcap/gibbs.hpp"
#include "natcap/errors.hpp"

namespace natcap::topicmodel {

GibbsSampler::GibbsSampler(std::vector<std::vector<int>> docs,
                           Eigen::VectorXd alpha,
                           const Eigen::MatrixXd& topic_word_prior,
                           std::uint64_t seed,
                           InitMode init)
  : K_(static_cast<int>(topic_word_prior.rows()))
  , V_(static_cast<int>(topic_word_prior.cols()))
  , docs_(std::move(docs))
  , alpha_(std::move(alpha))
  , rng_(seed)
{
  if (K_ < 1 || V_ < 1)
    throw PreconditionError("topic-word prior must be non-empty");
  if (alpha_.size() != K_)
    throw PreconditionError("alpha length must equal the topic count");
  if ((alpha_.array() <= 0.0).any() || (topic_word_prior.array() <= 0.0).any())
    throw PreconditionError("Dirichlet priors must be positive");
  alpha_sum_ = alpha_.sum();

  prior_.resize(static_cast<std::size_t>(K_) * V_);
  prior_row_sum_.assign(K_, 0.0);
  for (int w = 0; w < V_; ++w)
    for (int k = 0; k < K_; ++k) {
      prior_[static_cast<std::size_t>(w) * K_ + k] = topic_word_prior(k, w);
      prior_row_sum_[k] += topic_word_prior(k, w);
    }

  n_wk_.assign(static_cast<std::size_t>(K_) * V_, 0);
  n_k_.assign(K_, 0);
  n_dk_.assign(docs_.size(), std::vector<int>(K_, 0));
  z_.resize(docs_.size());
  scratch_.resize(K_);

  for (std::size_t d = 0; d < docs_.size(); ++d) {
    z_[d].resize(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const int w = docs_[d][i];
      if (w < 0 || w >= V_)
        throw PreconditionError("token index outside the vocabulary");
      int k;
      if (init == InitMode::sequential)
        k = draw(d, w);
      else
        k = static_cast<int>(uniform() * K_) % K_;
      z_[d][i] = k;
      ++n_dk_[d][k];
      ++n_wk_[static_cast<std::size_t>(w) * K_ + k];
      ++n_k_[k];
    }
  }

  beta_acc_ = Eigen::MatrixXd::Zero(K_, V_);
  theta_acc_.assign(docs_.size(), Eigen::VectorXd::Zero(K_));
}

double
GibbsSampler::uniform()
{
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

int
GibbsSampler::draw(std::size_t d, int w)
{
  const std::size_t base = static_cast<std::size_t>(w) * K_;
  const auto& ndk = n_dk_[d];
  double total = 0.0;
  for (int k = 0; k < K_; ++k) {
    total += (ndk[k] + alpha_[k]) * (n_wk_[base + k] + prior_[base + k]) /
             (n_k_[k] + prior_row_sum_[k]);
    scratch_[k] = total;
  }
  const double u = uniform() * total;
  int k = 0;
  while (k < K_ - 1 && scratch_[k] <= u)
    ++k;
  return k;
}

void
GibbsSampler::sweep()
{
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    auto& zd = z_[d];
    auto& ndk = n_dk_[d];
    for (std::size_t i = 0; i < zd.size(); ++i) {
      const int w = docs_[d][i];
      const std::size_t base = static_cast<std::size_t>(w) * K_;
      int k = zd[i];
      --ndk[k];
      --n_wk_[base + k];
      --n_k_[k];
      k = draw(d, w);
      zd[i] = k;
      ++ndk[k];
      ++n_wk_[base + k];
      ++n_k_[k];
    }
  }
}

Eigen::MatrixXd
GibbsSampler::current_beta() const
{
  Eigen::MatrixXd b(K_, V_);
  for (int k = 0; k < K_; ++k) {
    const double denom = n_k_[k] + prior_row_sum_[k];
    for (int w = 0; w < V_; ++w) {
      const std::size_t idx = static_cast<std::size_t>(w) * K_ + k;
      b(k, w) = (n_wk_[idx] + prior_[idx]) / denom;
    }
  }
  return b;
}

Eigen::VectorXd
GibbsSampler::current_theta(std::size_t d) const
{
  Eigen::VectorXd t(K_);
  const double denom = static_cast<double>(docs_[d].size()) + alpha_sum_;
  for (int k = 0; k < K_; ++k)
    t[k] = (n_dk_[d][k] + alpha_[k]) / denom;
  return t;
}

void
GibbsSampler::accumulate()
{
  beta_acc_ += current_beta();
  for (std::size_t d = 0; d < docs_.size(); ++d)
    theta_acc_[d] += current_theta(d);
  ++n_acc_;
}

Eigen::MatrixXd
GibbsSampler::beta() const
{
  if (n_acc_ == 0)
    return current_beta();
  Eigen::MatrixXd b = beta_acc_ / n_acc_;
  // renormalize away accumulated rounding
  for (int k = 0; k < K_; ++k)
    b.row(k) /= b.row(k).sum();
  return b;
}

std::vector<Eigen::VectorXd>
GibbsSampler::theta() const
{
  std::vector<Eigen::VectorXd> out(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    out[d] = n_acc_ == 0 ? current_theta(d) : Eigen::VectorXd(theta_acc_[d] / n_acc_);
    out[d] /= out[d].sum();
  }
  return out;
}

} // namespace natcap::topicmodel
