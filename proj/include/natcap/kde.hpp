#pragma once

#include <span>
#include <vector>

namespace natcap::kde {

//! Rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5), falling back
//! to sd (then |x0|, then 1) when the robust scale is zero.
double
silverman_bandwidth(std::span<const double> x);

//! Gaussian kernel density estimate with fixed bandwidth.
class GaussianKde
{
public:
  GaussianKde(std::vector<double> samples, double bandwidth);
  explicit GaussianKde(std::vector<double> samples);

  double density(double x) const;
  double derivative(double x) const;
  double bandwidth() const { return bandwidth_; }

private:
  std::vector<double> samples_;
  double bandwidth_;
};

//! Empirical quantile, type-7 (linear interpolation between order statistics).
double
quantile(std::vector<double> x, double prob);

} // namespace natcap::kde
