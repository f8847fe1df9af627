#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "turnpike/errors.hpp"

namespace turnpike {

// Coefficients of the 2x2 diagonal-hyperbolic system
//   r_t + D(x) r_x = eta0 * M(x) r,   x in [0, length],
// with D = diag(d_plus, d_minus), d_minus < 0 < d_plus and eta0 <= 0.
struct SystemSpec {
  double length = 1.0;
  double eta0 = 0.0;
  std::function<double(double)> d_plus;
  std::function<double(double)> d_minus;
  std::function<double(double)> d_plus_prime;
  std::function<double(double)> d_minus_prime;
  std::function<Eigen::Matrix2d(double)> coupling;  // M(x)
};

// Raw ingredients for build_system.  Derivatives and coupling are optional:
// missing derivatives are synthesized by central differences, missing
// coupling defaults to zero.
struct SystemConfig {
  double length = 1.0;
  double eta0 = 0.0;
  std::function<double(double)> d_plus;
  std::function<double(double)> d_minus;
  std::function<double(double)> d_plus_prime;
  std::function<double(double)> d_minus_prime;
  std::function<Eigen::Matrix2d(double)> coupling;
  int validation_samples = 256;
};

// Validates signs (d- < 0 < d+ on a sample sweep, eta0 <= 0, length > 0)
// and fills in defaults.  Throws SignViolation / PositivityViolation.
SystemSpec build_system(const SystemConfig& config);

// Convenience factory for constant-coefficient systems.
SystemSpec make_constant_system(double d_plus, double d_minus,
                                const Eigen::Matrix2d& coupling, double eta0,
                                double length);

// Sampled coefficient table with piecewise-linear interpolation, used for
// file-driven systems and for frozen linearizations.
struct CoefficientTable {
  std::vector<double> x;
  std::vector<double> d_plus, d_minus;
  std::vector<Eigen::Matrix2d> coupling;

  double interp_d_plus(double xq) const;
  double interp_d_minus(double xq) const;
  Eigen::Matrix2d interp_coupling(double xq) const;
};

// Builds a system whose coefficient callbacks interpolate the table.
SystemSpec build_system_from_table(CoefficientTable table, double eta0);

// Exponential weight E(x) = diag(exp(-mu_plus x), exp(mu_minus x)).
// Decay certificates use mu > 0, growth certificates mu < 0.
enum class WeightRegime { decay, growth };

struct ExpWeight {
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  WeightRegime regime = WeightRegime::decay;
};

// E(x) for 0 <= x <= length; throws OutOfDomain otherwise.
Eigen::Matrix2d exp_weight_matrix(const ExpWeight& weight, double x,
                                  double length);

// Both generalized eigenvalues of the pencil (S, E) with S symmetric and E
// diagonal positive, sorted ascending.  Throws NonSPD on a bad metric.
std::pair<double, double> gen_eig_pair_2x2(const Eigen::Matrix2d& S,
                                           const Eigen::Matrix2d& E);

// Result of a certificate scan over x.
struct Certificate {
  ExpWeight weight;
  double bound = 0.0;    // decay: max over x (valid iff < 0); growth: min (iff > 0)
  double argmax_x = 0.0; // where the extremum was attained
  bool valid = false;
  int samples = 0;
};

// Scans x in n_samples uniform points (both endpoints included) and bounds the
// quadratic form  d/dx(E D) - |eta0| (E M + M^T E)  relative to E.
Certificate certify_decay(const SystemSpec& sys, const ExpWeight& weight,
                          int n_samples = 1024);

// Growth counterpart: bounds  E' D - E D' + |eta0| (E M + M^T E)  from below.
Certificate certify_growth(const SystemSpec& sys, const ExpWeight& weight,
                           int n_samples = 1024);

// Tries mu_plus = mu_minus = mu for each mu in the grid and returns the
// strictest valid certificate, or the least-violating one when none is valid.
Certificate search_weight(const SystemSpec& sys, WeightRegime regime,
                          const std::vector<double>& mu_grid,
                          int n_samples = 1024);

}  // namespace turnpike
