#pragma once

#include <Eigen/Core>

#include "turnpike/grid.hpp"
#include "turnpike/state.hpp"

namespace turnpike {

// Explicit first-order upwind march of the forward system from initial data
// h0 (zero when omitted) under boundary control u.  Interior update
//   r+^{n+1,i} = r+^{n,i} - d+(x_i) dt/dx (r+^{n,i} - r+^{n,i-1})
//                + dt eta0 (M(x_i) r^{n,i})_+        for i >= 1,
// mirrored for r-; injections r+^{n+1,0} = u.plus[n],
// r-^{n+1,n_x} = u.minus[n].  At CFL = 1 transport is exact.
StateTrajectory forward_solve(const SystemSpec& sys, const SpaceTimeGrid& grid,
                              const BoundaryControl& u,
                              const StaticProfile* h0 = nullptr);

// Outflow traces of a trajectory.
TraceSignal extract_traces(const StateTrajectory& state);

// Discretized continuous adjoint: marches
//   z_t + D z_x = -eta0 M^T z - D' z
// backward from z(T) = 0 with boundary data z+(t,L) = data.plus/d+(L),
// z-(t,0) = data.minus/|d-(0)|, and returns the full adjoint trajectory.
StateTrajectory adjoint_backward_solve(const SystemSpec& sys,
                                       const SpaceTimeGrid& grid,
                                       const TraceSignal& data);

// Steady state of the discrete forward scheme under constant boundary data,
// solved directly (sparse LU over the 2(n_x+1) nodal unknowns).  The result
// is a fixed point of forward_solve's update by construction.
StaticProfile steady_solve(const SystemSpec& sys, const SpaceTimeGrid& grid,
                           const Eigen::Vector2d& u);

// Steady state of the time-reversed (adjoint) scheme with boundary data
// z+(L) = data[0]/d+(L), z-(0) = data[1]/|d-(0)|.
StaticProfile steady_adjoint_solve(const SystemSpec& sys,
                                   const SpaceTimeGrid& grid,
                                   const Eigen::Vector2d& data);

// Max relative residual of one forward update applied to the constant-in-time
// embedding of a steady profile (diagnostic for the fixed-point property).
double steady_step_residual(const SystemSpec& sys, const SpaceTimeGrid& grid,
                            const StaticProfile& profile,
                            const Eigen::Vector2d& u);

}  // namespace turnpike
