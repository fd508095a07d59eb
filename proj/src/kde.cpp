#include "natcap/kde.hpp"
#include "natcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace natcap::kde {

double
quantile(std::vector<double> x, double prob)
{
  if (x.empty())
    throw PreconditionError("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double
silverman_bandwidth(std::span<const double> x)
{
  const std::size_t n = x.size();
  if (n < 2)
    throw NumericalError("bandwidth needs at least two samples");
  double mean = 0.0;
  for (double v : x)
    mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x)
    ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> copy(x.begin(), x.end());
  const double iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
  double scale = std::min(sd, iqr / 1.34);
  if (!(scale > 0.0)) {
    scale = sd;
    if (!(scale > 0.0))
      scale = std::abs(x[0]);
    if (!(scale > 0.0))
      scale = 1.0;
  }
  return 0.9 * scale * std::pow(static_cast<double>(n), -0.2);
}

GaussianKde::GaussianKde(std::vector<double> samples, double bandwidth)
  : samples_(std::move(samples))
  , bandwidth_(bandwidth)
{
  if (samples_.empty())
    throw PreconditionError("KDE needs samples");
  if (!(bandwidth_ > 0.0))
    throw NumericalError("KDE bandwidth must be positive");
}

GaussianKde::GaussianKde(std::vector<double> samples)
  : GaussianKde(samples, silverman_bandwidth(samples))
{}

double
GaussianKde::density(double x) const
{
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (double s : samples_) {
    const double u = (x - s) / bandwidth_;
    acc += norm * std::exp(-0.5 * u * u);
  }
  return acc / (static_cast<double>(samples_.size()) * bandwidth_);
}

double
GaussianKde::derivative(double x) const
{
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (double s : samples_) {
    const double u = (x - s) / bandwidth_;
    acc -= u * norm * std::exp(-0.5 * u * u);
  }
  return acc / (static_cast<double>(samples_.size()) * bandwidth_ * bandwidth_);
}

} // namespace natcap::kde
