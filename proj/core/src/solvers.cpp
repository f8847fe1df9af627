#include "turnpike/solvers.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>

namespace turnpike {

namespace {

void check_signal(const SpaceTimeGrid& grid, int size, const char* what) {
  if (size != grid.n_t())
    throw ShapeMismatch(std::string(what) + " length does not match n_t");
}

}  // namespace

StateTrajectory forward_solve(const SystemSpec& sys, const SpaceTimeGrid& grid,
                              const BoundaryControl& u,
                              const StaticProfile* h0) {
  check_signal(grid, u.size(), "control");
  if (static_cast<int>(u.minus.size()) != grid.n_t())
    throw ShapeMismatch("control minus length does not match n_t");
  const int n_x = grid.n_x();
  const int n_t = grid.n_t();
  const double r = grid.dt() / grid.dx();
  const double sdt = sys.eta0 * grid.dt();
  const SampledCoefficients co = SampledCoefficients::build(sys, grid);

  StateTrajectory traj(n_t, n_x);
  if (h0) {
    if (h0->nodes() != n_x + 1)
      throw ShapeMismatch("initial profile does not match n_x + 1 nodes");
    for (int i = 0; i <= n_x; ++i) {
      traj.plus(0, i) = h0->plus[i];
      traj.minus(0, i) = h0->minus[i];
    }
  }

  for (int n = 0; n < n_t; ++n) {
    traj.plus(n + 1, 0) = u.plus[n];
    for (int i = 1; i <= n_x; ++i) {
      const Eigen::Matrix2d& M = co.coupling[i];
      traj.plus(n + 1, i) =
          traj.plus(n, i) -
          co.d_plus[i] * r * (traj.plus(n, i) - traj.plus(n, i - 1)) +
          sdt * (M(0, 0) * traj.plus(n, i) + M(0, 1) * traj.minus(n, i));
    }
    traj.minus(n + 1, n_x) = u.minus[n];
    for (int i = 0; i < n_x; ++i) {
      const Eigen::Matrix2d& M = co.coupling[i];
      traj.minus(n + 1, i) =
          traj.minus(n, i) -
          co.d_minus[i] * r * (traj.minus(n, i + 1) - traj.minus(n, i)) +
          sdt * (M(1, 0) * traj.plus(n, i) + M(1, 1) * traj.minus(n, i));
    }
  }
  return traj;
}

TraceSignal extract_traces(const StateTrajectory& state) {
  TraceSignal y(state.n_t());
  for (int n = 0; n < state.n_t(); ++n) {
    y.plus[n] = state.plus(n + 1, state.n_x());
    y.minus[n] = state.minus(n + 1, 0);
  }
  return y;
}

StateTrajectory adjoint_backward_solve(const SystemSpec& sys,
                                       const SpaceTimeGrid& grid,
                                       const TraceSignal& data) {
  check_signal(grid, data.size(), "adjoint data");
  const int n_x = grid.n_x();
  const int n_t = grid.n_t();
  const double r = grid.dt() / grid.dx();
  const double sdt = sys.eta0 * grid.dt();
  const double dt = grid.dt();
  const SampledCoefficients co = SampledCoefficients::build(sys, grid);
  const double dpL = co.d_plus[n_x];
  const double dm0 = std::abs(co.d_minus[0]);

  // In reversed time the plus channel travels leftward (boundary data enters
  // at x = L) and the minus channel rightward (data at x = 0).
  StateTrajectory z(n_t, n_x);
  for (int n = n_t - 1; n >= 0; --n) {
    for (int i = 0; i < n_x; ++i) {
      const Eigen::Matrix2d& M = co.coupling[i];
      z.plus(n, i) =
          z.plus(n + 1, i) +
          co.d_plus[i] * r * (z.plus(n + 1, i + 1) - z.plus(n + 1, i)) +
          sdt * (M(0, 0) * z.plus(n + 1, i) + M(1, 0) * z.minus(n + 1, i)) +
          dt * co.d_plus_prime[i] * z.plus(n + 1, i);
    }
    z.plus(n, n_x) = data.plus[n] / dpL;
    for (int i = 1; i <= n_x; ++i) {
      const Eigen::Matrix2d& M = co.coupling[i];
      z.minus(n, i) =
          z.minus(n + 1, i) +
          co.d_minus[i] * r * (z.minus(n + 1, i) - z.minus(n + 1, i - 1)) +
          sdt * (M(0, 1) * z.plus(n + 1, i) + M(1, 1) * z.minus(n + 1, i)) +
          dt * co.d_minus_prime[i] * z.minus(n + 1, i);
    }
    z.minus(n, 0) = data.minus[n] / dm0;
  }
  return z;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

StaticProfile solve_banded(int n_x, const Triplets& triplets,
                           const Eigen::VectorXd& rhs) {
  const int dim = 2 * (n_x + 1);
  Eigen::SparseMatrix<double> A(dim, dim);
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SingularSystem("steady system factorization failed");
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw SingularSystem("steady system solve failed");
  StaticProfile profile(n_x);
  for (int i = 0; i <= n_x; ++i) {
    profile.plus[i] = sol[2 * i];
    profile.minus[i] = sol[2 * i + 1];
  }
  return profile;
}

}  // namespace

StaticProfile steady_solve(const SystemSpec& sys, const SpaceTimeGrid& grid,
                           const Eigen::Vector2d& u) {
  const int n_x = grid.n_x();
  const double dx = grid.dx();
  const SampledCoefficients co = SampledCoefficients::build(sys, grid);
  Triplets t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * (n_x + 1));
  const auto P = [](int i) { return 2 * i; };
  const auto Mi = [](int i) { return 2 * i + 1; };

  // Steady limit of the forward update (same one-sided differences).
  t.emplace_back(P(0), P(0), 1.0);
  rhs[P(0)] = u[0];
  for (int i = 1; i <= n_x; ++i) {
    const Eigen::Matrix2d& M = co.coupling[i];
    const double a = co.d_plus[i] / dx;
    t.emplace_back(P(i), P(i), a - sys.eta0 * M(0, 0));
    t.emplace_back(P(i), P(i - 1), -a);
    t.emplace_back(P(i), Mi(i), -sys.eta0 * M(0, 1));
  }
  t.emplace_back(Mi(n_x), Mi(n_x), 1.0);
  rhs[Mi(n_x)] = u[1];
  for (int i = 0; i < n_x; ++i) {
    const Eigen::Matrix2d& M = co.coupling[i];
    const double b = co.d_minus[i] / dx;
    t.emplace_back(Mi(i), Mi(i + 1), b);
    t.emplace_back(Mi(i), Mi(i), -b - sys.eta0 * M(1, 1));
    t.emplace_back(Mi(i), P(i), -sys.eta0 * M(1, 0));
  }
  return solve_banded(n_x, t, rhs);
}

StaticProfile steady_adjoint_solve(const SystemSpec& sys,
                                   const SpaceTimeGrid& grid,
                                   const Eigen::Vector2d& data) {
  const int n_x = grid.n_x();
  const double dx = grid.dx();
  const SampledCoefficients co = SampledCoefficients::build(sys, grid);
  Triplets t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * (n_x + 1));
  const auto P = [](int i) { return 2 * i; };
  const auto Mi = [](int i) { return 2 * i + 1; };

  // Steady limit of the reversed-time scheme: the plus channel is integrated
  // from x = L with data scaled by the boundary speed, the minus channel from
  // x = 0.
  for (int i = 0; i < n_x; ++i) {
    const Eigen::Matrix2d& M = co.coupling[i];
    const double a = co.d_plus[i] / dx;
    t.emplace_back(P(i), P(i + 1), a);
    t.emplace_back(P(i), P(i),
                   -a + sys.eta0 * M(0, 0) + co.d_plus_prime[i]);
    t.emplace_back(P(i), Mi(i), sys.eta0 * M(1, 0));
  }
  t.emplace_back(P(n_x), P(n_x), 1.0);
  rhs[P(n_x)] = data[0] / co.d_plus[n_x];
  t.emplace_back(Mi(0), Mi(0), 1.0);
  rhs[Mi(0)] = data[1] / std::abs(co.d_minus[0]);
  for (int i = 1; i <= n_x; ++i) {
    const Eigen::Matrix2d& M = co.coupling[i];
    const double b = co.d_minus[i] / dx;
    t.emplace_back(Mi(i), Mi(i),
                   b + sys.eta0 * M(1, 1) + co.d_minus_prime[i]);
    t.emplace_back(Mi(i), Mi(i - 1), -b);
    t.emplace_back(Mi(i), P(i), sys.eta0 * M(0, 1));
  }
  return solve_banded(n_x, t, rhs);
}

double steady_step_residual(const SystemSpec& sys, const SpaceTimeGrid& grid,
                            const StaticProfile& profile,
                            const Eigen::Vector2d& u) {
  if (profile.nodes() != grid.n_x() + 1)
    throw ShapeMismatch("profile does not match the grid");
  SpaceTimeGrid one(sys, grid.n_x(), 1, grid.dt(), grid.rule());
  BoundaryControl constant(1);
  constant.plus[0] = u[0];
  constant.minus[0] = u[1];
  const StateTrajectory step = forward_solve(sys, one, constant, &profile);
  double scale = 1e-300;
  for (int i = 0; i <= grid.n_x(); ++i)
    scale = std::max({scale, std::abs(profile.plus[i]),
                      std::abs(profile.minus[i])});
  double worst = 0.0;
  for (int i = 0; i <= grid.n_x(); ++i) {
    worst = std::max(worst, std::abs(step.plus(1, i) - profile.plus[i]));
    worst = std::max(worst, std::abs(step.minus(1, i) - profile.minus[i]));
  }
  return worst / scale;
}

}  // namespace turnpike
