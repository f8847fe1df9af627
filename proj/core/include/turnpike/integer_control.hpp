#pragma once

#include <Eigen/Core>
#include <vector>

#include "turnpike/optimizer.hpp"

namespace turnpike {

// Integer-constrained entry control: u+ must take values in the finite set
// `feasible` (which has to contain 0), switching is penalized with weight
// nu * T * Var(u+), and the remaining cost is the tracking form.
struct IntegerSpec {
  std::vector<double> feasible;
  double nu = 0.0;
  double lambda = 0.5;
  Eigen::Vector2d R_b = Eigen::Vector2d::Zero();
};

struct PerAlpha {
  double alpha = 0.0;
  double value = 0.0;       // tracking objective with constants retained
  double u_minus = 0.0;     // static minimizer (static enumeration)
  double u_minus_norm = 0.0;  // H norm of the minus control (dynamic)
};

struct IntegerStaticSolution {
  double alpha = 0.0;
  double u_minus = 0.0;
  double value = 0.0;
  std::vector<PerAlpha> table;
};

struct IntegerSolution {
  double alpha = 0.0;
  DynamicSolution best;     // one-sided solution at the selected level
  double omega = 0.0;       // optimal value (constants retained)
  double variation = 0.0;   // Var(u+) of the returned control
  std::vector<PerAlpha> table;
};

// Total variation of a step function (sum of jump magnitudes).
double total_variation(const std::vector<double>& u);

// Strict premise nu > (1 - lambda) |R_b|^2 under which constant entry
// controls are optimal; returns the margin, throws nothing.
struct ThresholdReport {
  double nu = 0.0;
  double bound = 0.0;  // (1 - lambda) |R_b|^2
  bool satisfied = false;
};
ThresholdReport switching_threshold_check(const IntegerSpec& spec);

// Enumerates the feasible set at the steady level; each candidate is a scalar
// quadratic minimization in the free minus control.  Ties break toward
// smaller |alpha|, then smaller alpha.
IntegerStaticSolution solve_integer_static(const IntegerSpec& spec,
                                           const SystemSpec& sys,
                                           const SpaceTimeGrid& grid);

// Dynamic enumeration: one one-sided CG solve per feasible level.  Throws
// ThresholdNotMet when the switching premise fails (that regime is out of
// scope for the constant-control enumeration).
IntegerSolution solve_integer_dynamic(const IntegerSpec& spec,
                                      const SystemSpec& sys,
                                      const SpaceTimeGrid& grid,
                                      const CgOptions& opts = {});

// (1/T) ||u_dyn - u_static||_H^2 against the matching-level static control.
double integer_turnpike_metric(const IntegerSolution& sol,
                               const IntegerStaticSolution& static_sol,
                               const SpaceTimeGrid& grid);

}  // namespace turnpike
