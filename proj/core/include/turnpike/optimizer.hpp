#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "turnpike/cost.hpp"

namespace turnpike {

struct CgOptions {
  double tol = 1e-10;          // relative residual target
  int max_iterations = 0;      // 0 -> 10 * n_t
  bool warm_start = true;      // start from the static optimum held constant
  bool log_residuals = false;
};

struct DynamicSolution {
  BoundaryControl control;
  TraceSignal trace;
  StateTrajectory state;
  double objective = 0.0;        // eval_J at the optimum
  TraceSignal multiplier_trace;  // adjoint boundary data (p+(., L), p-(., 0))
  int cg_iterations = 0;
  double residual = 0.0;         // final relative CG residual
  std::vector<double> residual_history;
};

struct StaticSolution {
  Eigen::Vector2d control;
  StaticProfile profile;
  double objective = 0.0;            // eval_J0 at the optimum
  Eigen::Vector2d multiplier;        // steady adjoint boundary data
  StaticProfile multiplier_profile;  // steady adjoint state
  double optimality_residual = 0.0;
};

// Gradient of the reduced objective u -> J(u, F u):
//   g = cc u + ct F u + control_offset + F* (tc u + tt F u + trace_offset).
BoundaryControl grad_dynamic(const QuadraticCost& cost, const SystemSpec& sys,
                             const SpaceTimeGrid& grid,
                             const BoundaryControl& u);

// Matrix-free CG on the SPD reduced optimality system.  Throws NoConvergence
// when the iteration budget is exhausted, SPDViolation if a nonpositive
// curvature direction shows up.
DynamicSolution solve_dynamic(const QuadraticCost& cost, const SystemSpec& sys,
                              const SpaceTimeGrid& grid,
                              const CgOptions& opts = {});

// Direct 2x2 solve of the steady reduced system.
StaticSolution solve_static(const QuadraticCost& cost, const SystemSpec& sys,
                            const SpaceTimeGrid& grid);

// Minimizes over the minus control only, with the plus control frozen at
// u_plus (held as given).  Used by the integer enumeration.
DynamicSolution solve_one_sided(const QuadraticCost& cost,
                                const SystemSpec& sys,
                                const SpaceTimeGrid& grid,
                                const std::vector<double>& u_plus,
                                const CgOptions& opts = {});

// Smallest-eigenvalue estimate of the reduced Hessian in the H inner product
// (inverse power iteration; each step is one CG solve).
double estimate_coercivity(const QuadraticCost& cost, const SystemSpec& sys,
                           const SpaceTimeGrid& grid, int iterations = 12,
                           std::uint64_t seed = 42, double cg_tol = 1e-8);

}  // namespace turnpike
