#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "natcap/capability.hpp"
#include "natcap/collaboration.hpp"
#include "natcap/least_squares.hpp"

namespace natcap::gravity {

inline constexpr double kEarthRadiusKm = 6371.0;

//! Great-circle distance in km; coordinates in degrees.
double
haversine_km(double lat1, double lon1, double lat2, double lon2);

struct Coordinates
{
  double lat = 0.0;
  double lon = 0.0;
};

//! Capital coordinates keyed by ISO alpha-2 code.
class CapitalTable
{
public:
  //! CSV with header; columns `code`, `lat`, `lon` (others ignored).
  static CapitalTable load_csv(std::istream& in);
  static CapitalTable load_file(const std::string& path);

  void set(const std::string& code, Coordinates c) { table_[code] = c; }
  bool contains(const std::string& code) const { return table_.count(code) > 0; }
  const Coordinates& at(const std::string& code) const;
  const std::map<std::string, Coordinates>& entries() const { return table_; }

private:
  std::map<std::string, Coordinates> table_;
};

struct GravityObservation
{
  std::string country_m;
  std::string country_n;
  int cluster = 0;
  int year = 0;
  double w = 0.0;
  double p_m = 0.0;
  double p_n = 0.0;
  double d = 0.0;
  double c = 0.0;
};

enum class CapabilityDistanceMode
{
  //! one Jaccard distance over every cluster, reused for each cluster's rows
  full,
  //! the row's own cluster left out of both vectors
  leave_one_out,
};

struct ObservationOptions
{
  //! 0 drops zero-collaboration pairs; > 0 keeps every pair and fits ln(w + eps)
  double epsilon_w = 0.0;
  CapabilityDistanceMode distance_mode = CapabilityDistanceMode::full;
  //! restrict to these countries; empty means every country in the tensors
  std::vector<std::string> countries;
};

//! One row per unordered pair (country_m < country_n), cluster and year.
std::vector<GravityObservation>
build_observations(const collaboration::CollaborationTensor& collab,
                   const capability::CapabilityTensor& R,
                   const capability::NrcaTensor& nrca,
                   const CapitalTable& capitals,
                   const ObservationOptions& opts = {});

enum class PublicationTerm
{
  //! single coefficient on ln(P_m) + ln(P_n), reported for both terms
  symmetric,
  //! separate coefficients; m is the lexicographically smaller code
  ordered,
};

struct FitOptions
{
  PublicationTerm publication = PublicationTerm::symmetric;
  CovarianceType covariance = CovarianceType::classical;
  double epsilon_w = 0.0;
};

struct Coefficient
{
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double p_value = 1.0;

  //! "***" below 0.01, "**" below 0.05, "*" below 0.1
  std::string stars() const;
};

struct RegressionResult
{
  int cluster = 0;
  //! ln_P_m, ln_P_n, ln_d, c in that order
  std::vector<Coefficient> coefficients;
  Coefficient intercept;
  int baseline_year = 0;
  std::vector<std::pair<int, Coefficient>> year_effects;
  long n_obs = 0;
  double r_squared = 0.0;

  const Coefficient& coefficient(const std::string& name) const;
};

//! OLS of ln(w) on publication, distance and capability-distance terms with
//! year indicators (earliest year omitted).
RegressionResult
fit_ols_fixed_effects(const std::vector<GravityObservation>& observations,
                      int cluster,
                      const FitOptions& opts = {});

//! Plain-text table: one column per cluster, coefficient with stars above the
//! standard error in parentheses, then observations and R^2.
std::string
format_table(const std::vector<RegressionResult>& results,
             const std::vector<std::string>& cluster_names = {});

} // namespace natcap::gravity
