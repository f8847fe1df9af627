#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "turnpike/solvers.hpp"

namespace turnpike {

// Weighted inner product sum_n w_n (a+_n b+_n + a-_n b-_n) with the grid's
// signal quadrature weights.  Boundary controls and trace signals share the
// same weighting, so the two overloads agree componentwise.
double inner_product_H(const SpaceTimeGrid& grid, const BoundaryControl& a,
                       const BoundaryControl& b);
double inner_product_H(const SpaceTimeGrid& grid, const TraceSignal& a,
                       const TraceSignal& b);
double norm_H(const SpaceTimeGrid& grid, const BoundaryControl& a);
double norm_H(const SpaceTimeGrid& grid, const TraceSignal& a);

// Control-to-trace map of the zero-initial-state forward problem.
TraceSignal boundary_to_trace(const SystemSpec& sys, const SpaceTimeGrid& grid,
                              const BoundaryControl& u);

// Exact transpose of boundary_to_trace with respect to inner_product_H:
// the forward update is swept in reverse with the quadrature weights folded
// in, so <Fu, z> = <u, F*z> holds to machine precision on any grid.
BoundaryControl boundary_to_trace_adjoint(const SystemSpec& sys,
                                          const SpaceTimeGrid& grid,
                                          const TraceSignal& z);

// Validation path for the transpose: runs the discretized continuous adjoint
// and reads off (d+(0) z+(., 0), |d-(L)| z-(., L)).  Agrees with
// boundary_to_trace_adjoint to O(dx) (exactly for pure transport at CFL = 1).
BoundaryControl continuous_adjoint_trace(const SystemSpec& sys,
                                         const SpaceTimeGrid& grid,
                                         const TraceSignal& z);

// 2x2 steady control-to-trace map assembled from unit-control steady solves,
// its exact Euclidean transpose, and the deviation of the discretized
// continuous steady-adjoint path from that transpose (O(dx) diagnostic).
struct StaticMaps {
  Eigen::Matrix2d forward;          // columns = steady traces of unit controls
  Eigen::Matrix2d adjoint;          // forward.transpose(), exact
  Eigen::Matrix2d adjoint_steady_path;  // via steady_adjoint_solve
  double transpose_deviation = 0.0;     // ||adjoint - adjoint_steady_path||
};

StaticMaps assemble_static_maps(const SystemSpec& sys,
                                const SpaceTimeGrid& grid);

// Power-iteration estimate of ||boundary_to_trace|| in the H norm
// (iterations on F* F from a seeded random start).
double operator_norm_estimate(const SystemSpec& sys, const SpaceTimeGrid& grid,
                              int iterations = 50, std::uint64_t seed = 42);

}  // namespace turnpike
