#include "natcap/least_squares.hpp"
#include "natcap/errors.hpp"

#include <limits>

namespace natcap::gravity {

LeastSquaresFit
solve_least_squares(const Eigen::MatrixXd& X,
                    const Eigen::VectorXd& y,
                    const std::vector<std::string>& names,
                    CovarianceType cov)
{
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n)
    throw PreconditionError("response length does not match the design rows");
  if (p == 0 || n < p)
    throw PreconditionError("least squares needs rows >= columns >= 1");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p) {
    std::vector<std::string> dropped;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index r = qr.rank(); r < p; ++r) {
      const auto col = perm[r];
      dropped.push_back(static_cast<std::size_t>(col) < names.size()
                          ? names[col]
                          : "column " + std::to_string(col));
    }
    throw RankDeficientError(std::move(dropped));
  }

  LeastSquaresFit fit;
  fit.coef = qr.solve(y);
  fit.residuals = y - X * fit.coef;
  fit.ssr = fit.residuals.squaredNorm();
  fit.dof = n - p;

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
    R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd xtx_inv_perm = Rinv * Rinv.transpose();
  const auto P = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = P * xtx_inv_perm * P.transpose();

  if (fit.dof == 0) {
    fit.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  } else if (cov == CovarianceType::classical) {
    fit.covariance = xtx_inv * (fit.ssr / static_cast<double>(fit.dof));
  } else {
    const Eigen::MatrixXd meat = X.transpose() * fit.residuals.cwiseAbs2().asDiagonal() * X;
    fit.covariance = xtx_inv * meat * xtx_inv *
                     (static_cast<double>(n) / static_cast<double>(fit.dof));
  }
  return fit;
}

} // namespace natcap::gravity
