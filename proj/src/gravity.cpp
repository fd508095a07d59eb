#include "natcap/gravity.hpp"
#include "natcap/errors.hpp"
#include "natcap/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <spdlog/spdlog.h>

namespace natcap::gravity {

double
haversine_km(double lat1, double lon1, double lat2, double lon2)
{
  for (double lat : { lat1, lat2 })
    if (!(lat >= -90.0 && lat <= 90.0))
      throw PreconditionError("latitude outside [-90, 90]");
  for (double lon : { lon1, lon2 })
    if (!(lon >= -180.0 && lon <= 180.0))
      throw PreconditionError("longitude outside [-180, 180]");
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

CapitalTable
CapitalTable::load_csv(std::istream& in)
{
  auto csv = io::read_csv(in);
  const auto ci = csv.column("code"), la = csv.column("lat"), lo = csv.column("lon");
  CapitalTable t;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    Coordinates c{ io::parse_double(row[la], r + 2), io::parse_double(row[lo], r + 2) };
    if (c.lat < -90 || c.lat > 90 || c.lon < -180 || c.lon > 180)
      throw ParseError(r + 2, "coordinates out of range for " + row[ci]);
    t.set(row[ci], c);
  }
  return t;
}

CapitalTable
CapitalTable::load_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open capitals file " + path);
  return load_csv(in);
}

const Coordinates&
CapitalTable::at(const std::string& code) const
{
  auto it = table_.find(code);
  if (it == table_.end())
    throw LookupError("no capital coordinates for " + code);
  return it->second;
}

std::vector<GravityObservation>
build_observations(const collaboration::CollaborationTensor& collab,
                   const capability::CapabilityTensor& R,
                   const capability::NrcaTensor& nrca,
                   const CapitalTable& capitals,
                   const ObservationOptions& opts)
{
  if (collab.n_clusters() != R.n_clusters() || nrca.values.n_clusters() != R.n_clusters())
    throw PreconditionError("tensors disagree on the cluster count");
  if (opts.epsilon_w < 0.0)
    throw PreconditionError("epsilon_w must be non-negative");

  std::vector<std::string> countries = opts.countries;
  if (countries.empty())
    countries = collab.countries();
  std::sort(countries.begin(), countries.end());
  countries.erase(std::unique(countries.begin(), countries.end()), countries.end());

  std::vector<std::string> missing;
  for (const auto& c : countries)
    if (!capitals.contains(c))
      missing.push_back(c);
  if (!missing.empty()) {
    std::string list;
    for (const auto& c : missing)
      list += (list.empty() ? "" : ", ") + c;
    throw LookupError("missing capital coordinates for: " + list);
  }

  const std::set<int> nrca_years(nrca.values.years().begin(), nrca.values.years().end());
  std::vector<GravityObservation> rows;
  const int K = R.n_clusters();

  for (std::size_t t = 0; t < collab.years().size(); ++t) {
    const int year = collab.years()[t];
    if (!nrca_years.count(year)) {
      spdlog::debug("year {} has no NRCA values; no gravity rows", year);
      continue;
    }
    const auto tr = R.year_index(year);
    const auto tn = nrca.values.year_index(year);
    for (std::size_t a = 0; a < countries.size(); ++a) {
      for (std::size_t b = a + 1; b < countries.size(); ++b) {
        const auto& m = countries[a];
        const auto& n = countries[b];
        const auto cm = collab.country_index(m), cn = collab.country_index(n);
        const auto rm = R.country_index(m), rn = R.country_index(n);
        const auto nm = nrca.values.country_index(m), nn = nrca.values.country_index(n);
        const auto& pm = capitals.at(m);
        const auto& pn = capitals.at(n);
        const double d = haversine_km(pm.lat, pm.lon, pn.lat, pn.lon);
        if (!(d > 0.0))
          continue;
        const auto vm = nrca.binary_vector(tn, nm);
        const auto vn = nrca.binary_vector(tn, nn);
        const double c_full = capability::capability_distance(vm, vn);

        for (int j = 0; j < K; ++j) {
          const double w = collab.matrix(t, j)(cm, cn);
          const double p_m = R.at(tr, rm, j), p_n = R.at(tr, rn, j);
          if (opts.epsilon_w == 0.0 && !(w > 0.0))
            continue;
          if (!(p_m > 0.0) || !(p_n > 0.0))
            continue;
          double c = c_full;
          if (opts.distance_mode == CapabilityDistanceMode::leave_one_out) {
            auto lm = vm, ln = vn;
            lm.erase(lm.begin() + j);
            ln.erase(ln.begin() + j);
            c = capability::capability_distance(lm, ln);
          }
          rows.push_back({ m, n, j, year, w, p_m, p_n, d, c });
        }
      }
    }
  }
  return rows;
}

std::string
Coefficient::stars() const
{
  if (p_value < 0.01)
    return "***";
  if (p_value < 0.05)
    return "**";
  if (p_value < 0.1)
    return "*";
  return "";
}

const Coefficient&
RegressionResult::coefficient(const std::string& name) const
{
  for (const auto& c : coefficients)
    if (c.name == name)
      return c;
  throw LookupError("no coefficient named " + name);
}

RegressionResult
fit_ols_fixed_effects(const std::vector<GravityObservation>& observations,
                      int cluster,
                      const FitOptions& opts)
{
  std::vector<const GravityObservation*> rows;
  for (const auto& o : observations)
    if (o.cluster == cluster)
      rows.push_back(&o);
  std::set<int> year_set;
  for (auto* o : rows)
    year_set.insert(o->year);
  if (year_set.size() < 2)
    throw PreconditionError("fixed-effects fit needs at least two distinct years");
  const std::vector<int> years(year_set.begin(), year_set.end());

  const bool symmetric = opts.publication == PublicationTerm::symmetric;
  std::vector<std::string> names = { "intercept" };
  if (symmetric) {
    names.push_back("ln_P");
  } else {
    names.push_back("ln_P_m");
    names.push_back("ln_P_n");
  }
  names.push_back("ln_d");
  names.push_back("c");
  const std::size_t first_fe = names.size();
  for (std::size_t y = 1; y < years.size(); ++y)
    names.push_back("year_" + std::to_string(years[y]));

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(names.size());
  if (n < p)
    throw PreconditionError("fewer observations than regressors");
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& o = *rows[r];
    const double w = o.w + opts.epsilon_w;
    if (!(w > 0.0) || !(o.p_m > 0.0) || !(o.p_n > 0.0) || !(o.d > 0.0))
      throw PreconditionError("gravity rows need positive w, P_m, P_n and d");
    y[r] = std::log(w);
    Eigen::Index col = 0;
    X(r, col++) = 1.0;
    if (symmetric) {
      X(r, col++) = std::log(o.p_m) + std::log(o.p_n);
    } else {
      X(r, col++) = std::log(o.p_m);
      X(r, col++) = std::log(o.p_n);
    }
    X(r, col++) = std::log(o.d);
    X(r, col++) = o.c;
    auto it = std::lower_bound(years.begin(), years.end(), o.year);
    const auto yi = static_cast<std::size_t>(it - years.begin());
    if (yi > 0)
      X(r, static_cast<Eigen::Index>(first_fe + yi - 1)) = 1.0;
  }

  auto fit = solve_least_squares(X, y, names, opts.covariance);

  boost::math::students_t dist(static_cast<double>(std::max<long>(fit.dof, 1)));
  auto coef = [&](Eigen::Index i, std::string name) {
    Coefficient c;
    c.name = std::move(name);
    c.estimate = fit.coef[i];
    c.std_error = std::sqrt(fit.covariance(i, i));
    const double t = c.estimate / c.std_error;
    c.p_value = std::isfinite(t) ? 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)))
                                 : (c.estimate == 0.0 ? 1.0 : 0.0);
    return c;
  };

  RegressionResult res;
  res.cluster = cluster;
  res.n_obs = n;
  res.baseline_year = years.front();
  res.intercept = coef(0, "intercept");
  if (symmetric) {
    res.coefficients.push_back(coef(1, "ln_P_m"));
    res.coefficients.push_back(coef(1, "ln_P_n"));
  } else {
    res.coefficients.push_back(coef(1, "ln_P_m"));
    res.coefficients.push_back(coef(2, "ln_P_n"));
  }
  const Eigen::Index base = symmetric ? 2 : 3;
  res.coefficients.push_back(coef(base, "ln_d"));
  res.coefficients.push_back(coef(base + 1, "c"));
  for (std::size_t y = 1; y < years.size(); ++y)
    res.year_effects.emplace_back(years[y], coef(static_cast<Eigen::Index>(first_fe + y - 1),
                                                 names[first_fe + y - 1]));

  const double mean = y.mean();
  const double sst = (y.array() - mean).square().sum();
  res.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 0.0;
  return res;
}

std::string
format_table(const std::vector<RegressionResult>& results,
             const std::vector<std::string>& cluster_names)
{
  const std::vector<std::pair<std::string, std::string>> rows = {
    { "ln_P_m", "ln(P_m,j)" }, { "ln_P_n", "ln(P_n,j)" }, { "ln_d", "ln(d_mn)" }, { "c", "c_mn,j" }
  };
  auto name_of = [&](const RegressionResult& r) {
    if (static_cast<std::size_t>(r.cluster) < cluster_names.size())
      return cluster_names[r.cluster];
    return "cluster " + std::to_string(r.cluster);
  };
  auto fixed = [](double v, int prec) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
  };

  constexpr int label_w = 14, col_w = 14;
  std::ostringstream os;
  os << std::left << std::setw(label_w) << "Variables";
  for (const auto& r : results)
    os << std::setw(col_w) << name_of(r);
  os << '\n';
  for (const auto& [key, label] : rows) {
    os << std::setw(label_w) << label;
    for (const auto& r : results) {
      const auto& c = r.coefficient(key);
      os << std::setw(col_w) << fixed(c.estimate, 3) + c.stars();
    }
    os << '\n' << std::setw(label_w) << "";
    for (const auto& r : results)
      os << std::setw(col_w) << "(" + fixed(r.coefficient(key).std_error, 3) + ")";
    os << '\n';
  }
  os << std::setw(label_w) << "Observations";
  for (const auto& r : results)
    os << std::setw(col_w) << r.n_obs;
  os << '\n' << std::setw(label_w) << "R^2";
  for (const auto& r : results)
    os << std::setw(col_w) << fixed(r.r_squared, 3);
  os << '\n'
     << "Standard error in parentheses. Year fixed effects included.\n"
     << "* p < 0.1, ** p < 0.05, *** p < 0.01\n";
  return os.str();
}

} // namespace natcap::gravity
