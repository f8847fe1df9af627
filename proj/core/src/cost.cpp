#include "turnpike/cost.hpp"

#include <Eigen/LU>

#include <cmath>

namespace turnpike {

namespace {

void check_spd(const Eigen::Matrix2d& A, const char* name) {
  if (std::abs(A(0, 1) - A(1, 0)) >
      1e-12 * (1.0 + A.cwiseAbs().maxCoeff()))
    throw NonSPD(std::string(name) + " must be symmetric");
  // Sylvester criterion.
  if (!(A(0, 0) > 0.0) || !(A.determinant() > 0.0))
    throw NonSPD(std::string(name) + " must be positive definite");
}

}  // namespace

QuadraticCost make_cost(const Eigen::Matrix2d& A0, const Eigen::Matrix2d& AL,
                        const Eigen::Vector2d& c0, const Eigen::Vector2d& cL,
                        double constant_rate) {
  check_spd(A0, "entry Hessian");
  check_spd(AL, "exit Hessian");
  QuadraticCost cost;
  cost.entry_hessian = A0;
  cost.exit_hessian = AL;
  cost.entry_linear = c0;
  cost.exit_linear = cL;
  cost.constant_rate = constant_rate;
  cost.cc << A0(0, 0), 0.0, 0.0, AL(0, 0);
  cost.ct << 0.0, A0(0, 1), AL(0, 1), 0.0;
  cost.tc = cost.ct.transpose();
  cost.tt << AL(1, 1), 0.0, 0.0, A0(1, 1);
  cost.control_offset << c0[0], cL[0];
  cost.trace_offset << cL[1], c0[1];
  return cost;
}

QuadraticCost cost_from_tracking(double lambda, const Eigen::Vector2d& R_b) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw LambdaOutOfRange("tracking weight must lie in (0, 1)");
  const Eigen::Matrix2d A =
      Eigen::Vector2d(2.0 * lambda, 2.0 * (1.0 - lambda)).asDiagonal();
  const Eigen::Vector2d c0(0.0, -2.0 * (1.0 - lambda) * R_b[1]);
  const Eigen::Vector2d cL(0.0, -2.0 * (1.0 - lambda) * R_b[0]);
  return make_cost(A, A, c0, cL, (1.0 - lambda) * R_b.squaredNorm());
}

namespace {

double quadratic(const Eigen::Matrix2d& A, const Eigen::Vector2d& c,
                 double z1, double z2) {
  const Eigen::Vector2d z(z1, z2);
  return 0.5 * z.dot(A * z) + c.dot(z);
}

}  // namespace

double eval_J(const QuadraticCost& cost, const SpaceTimeGrid& grid,
              const BoundaryControl& u, const TraceSignal& trace) {
  if (u.size() != grid.n_t() || trace.size() != grid.n_t())
    throw ShapeMismatch("signal length does not match n_t");
  double J = 0.0;
  for (int n = 0; n < grid.n_t(); ++n) {
    J += grid.signal_weight(n) *
         (quadratic(cost.entry_hessian, cost.entry_linear, u.plus[n],
                    trace.minus[n]) +
          quadratic(cost.exit_hessian, cost.exit_linear, u.minus[n],
                    trace.plus[n]));
  }
  return J;
}

double eval_J_total(const QuadraticCost& cost, const SpaceTimeGrid& grid,
                    const BoundaryControl& u, const TraceSignal& trace) {
  double w = 0.0;
  for (int n = 0; n < grid.n_t(); ++n) w += grid.signal_weight(n);
  return eval_J(cost, grid, u, trace) + cost.constant_rate * w;
}

double eval_J0(const QuadraticCost& cost, const Eigen::Vector2d& u,
               const StaticProfile& profile) {
  const int last = profile.nodes() - 1;
  return quadratic(cost.entry_hessian, cost.entry_linear, u[0],
                   profile.minus[0]) +
         quadratic(cost.exit_hessian, cost.exit_linear, u[1],
                   profile.plus[last]);
}

double eval_J0_total(const QuadraticCost& cost, const Eigen::Vector2d& u,
                     const StaticProfile& profile) {
  return eval_J0(cost, u, profile) + cost.constant_rate;
}

}  // namespace turnpike
