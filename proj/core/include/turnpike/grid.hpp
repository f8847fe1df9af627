#pragma once

#include <Eigen/Core>
#include <vector>

#include "turnpike/errors.hpp"
#include "turnpike/system.hpp"

namespace turnpike {

enum class QuadRule { rectangle, trapezoid };

// Uniform space-time grid.  n_x counts spatial intervals (n_x + 1 nodes);
// n_t counts time steps.  Construction enforces the explicit-scheme
// restrictions: CFL = max|d| dt/dx <= 1 and dt |eta0| max|M_ij| <= 1/2.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(const SystemSpec& sys, int n_x, int n_t, double T,
                QuadRule rule = QuadRule::rectangle);

  int n_x() const { return n_x_; }
  int n_t() const { return n_t_; }
  double T() const { return T_; }
  double length() const { return length_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  QuadRule rule() const { return rule_; }

  double x(int i) const { return dx_ * i; }
  double t(int n) const { return dt_ * n; }

  // Quadrature weight for length-n_t boundary signals.  Signal index n is
  // associated with node t_{n+1} (controls are held on [t_n, t_{n+1}), traces
  // are sampled at t_{n+1}); under the trapezoid rule the final node carries
  // half weight and the t_0 node (identically zero data) is dropped.
  double signal_weight(int n) const;

  // Quadrature weight for the n_t + 1 trajectory time nodes.
  double node_weight(int n) const;

  // Spatial trapezoid weight for the n_x + 1 nodes.
  double space_weight(int i) const;

 private:
  int n_x_, n_t_;
  double T_, length_, dx_, dt_;
  QuadRule rule_;
};

// Courant number max(|d+|, |d-|) dt / dx sampled at the grid nodes.
double cfl_of(const SystemSpec& sys, const SpaceTimeGrid& grid);
double cfl_of(const SystemSpec& sys, int n_x, int n_t, double T);

// Nodal samples of the coefficients, shared by the solvers.
struct SampledCoefficients {
  std::vector<double> d_plus, d_minus;
  std::vector<double> d_plus_prime, d_minus_prime;
  std::vector<Eigen::Matrix2d> coupling;

  static SampledCoefficients build(const SystemSpec& sys,
                                   const SpaceTimeGrid& grid);
};

}  // namespace turnpike
