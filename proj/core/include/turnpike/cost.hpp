#pragma once

#include <Eigen/Core>

#include "turnpike/operators.hpp"

namespace turnpike {

// Convex quadratic running cost
//   f0(z) = 1/2 z^T A0 z + c0^T z   on the entry data z = (u+, trace-),
//   fL(z) = 1/2 z^T AL z + cL^T z   on the exit data  z = (u-, trace+),
// plus an optional per-unit-time constant kept out of the optimization but
// restored by the *_total evaluators.
//
// The reduced optimality system uses the rearranged 2x2 blocks
//   cc = diag(a11_0, a11_L)            acting on controls (u+, u-),
//   ct = [[0, a12_0], [a12_L, 0]]      acting on traces   (tr+, tr-),
//   tc = ct^T, tt = diag(a22_L, a22_0) on the trace side,
// with offsets control_offset = (c0_1, cL_1), trace_offset = (cL_2, c0_2).
struct QuadraticCost {
  Eigen::Matrix2d entry_hessian;  // A0
  Eigen::Matrix2d exit_hessian;   // AL
  Eigen::Vector2d entry_linear;   // c0
  Eigen::Vector2d exit_linear;    // cL
  double constant_rate = 0.0;

  Eigen::Matrix2d cc, ct, tc, tt;
  Eigen::Vector2d control_offset, trace_offset;
};

// Validates SPD-ness of both Hessians and derives the blocks.
QuadraticCost make_cost(const Eigen::Matrix2d& A0, const Eigen::Matrix2d& AL,
                        const Eigen::Vector2d& c0, const Eigen::Vector2d& cL,
                        double constant_rate = 0.0);

// Tracking form (target R_b = (R+_b, R-_b), weight lambda in (0, 1)):
//   lambda |u|^2 + (1 - lambda) |trace - R_b|^2.
// The dropped constant (1 - lambda) |R_b|^2 is stored in constant_rate.
QuadraticCost cost_from_tracking(double lambda, const Eigen::Vector2d& R_b);

// Time quadrature of f0(u+_n, trace-_n) + fL(u-_n, trace+_n); the _total
// variant adds the integrated constant_rate.
double eval_J(const QuadraticCost& cost, const SpaceTimeGrid& grid,
              const BoundaryControl& u, const TraceSignal& trace);
double eval_J_total(const QuadraticCost& cost, const SpaceTimeGrid& grid,
                    const BoundaryControl& u, const TraceSignal& trace);

// Static counterparts on a steady profile (per unit time).
double eval_J0(const QuadraticCost& cost, const Eigen::Vector2d& u,
               const StaticProfile& profile);
double eval_J0_total(const QuadraticCost& cost, const Eigen::Vector2d& u,
                     const StaticProfile& profile);

}  // namespace turnpike
