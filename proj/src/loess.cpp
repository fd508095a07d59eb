#include "natcap/capability.hpp"
#include "natcap/errors.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace natcap::capability {

namespace {

double
tricube(double u)
{
  if (u >= 1.0)
    return 0.0;
  const double t = 1.0 - u * u * u;
  return t * t * t;
}

} // namespace

std::vector<double>
loess_smooth(const std::vector<double>& x, const std::vector<double>& y, double span)
{
  if (x.size() != y.size())
    throw PreconditionError("loess: x and y differ in length");
  if (!(span > 0.0 && span <= 1.0))
    throw PreconditionError("loess: span must lie in (0, 1]");
  const std::size_t n = x.size();
  if (n < 3) {
    spdlog::warn("loess needs at least 3 points; returning input unchanged");
    return y;
  }

  auto q = static_cast<std::size_t>(std::floor(span * static_cast<double>(n)));
  q = std::clamp<std::size_t>(q, 2, n);

  std::vector<double> fitted(n), dist(n), sorted(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double x0 = x[e];
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = std::abs(x[i] - x0);
    sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(q - 1), sorted.end());
    const double h = sorted[q - 1];

    double sw = 0.0, sx = 0.0, sy = 0.0;
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = h > 0.0 ? tricube(dist[i] / h) : (dist[i] == 0.0 ? 1.0 : 0.0);
      sw += w[i];
      sx += w[i] * x[i];
      sy += w[i] * y[i];
    }
    const double xbar = sx / sw, ybar = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
      sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    // a single distinct abscissa carries all weight: local constant fit
    fitted[e] = sxx > 0.0 ? ybar + sxy / sxx * (x0 - xbar) : ybar;
  }
  return fitted;
}

} // namespace natcap::capability
