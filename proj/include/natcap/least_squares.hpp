#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace natcap::gravity {

enum class CovarianceType
{
  classical,
  //! heteroskedasticity-consistent, n / (n - p) scaled sandwich
  hc1,
};

struct LeastSquaresFit
{
  Eigen::VectorXd coef;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd residuals;
  double ssr = 0.0;
  //! residual degrees of freedom, rows - columns
  long dof = 0;
};

//! Column-pivoted Householder QR solve of min ||X b - y||. Throws
//! RankDeficientError naming the dropped columns (by `names` when given,
//! otherwise by index). The covariance is NaN when dof == 0.
LeastSquaresFit
solve_least_squares(const Eigen::MatrixXd& X,
                    const Eigen::VectorXd& y,
                    const std::vector<std::string>& names = {},
                    CovarianceType cov = CovarianceType::classical);

} // namespace natcap::gravity
