#include "turnpike/operators.hpp"

#include <cmath>
#include <random>

namespace turnpike {

namespace {

double dot_pair(const SpaceTimeGrid& grid, const std::vector<double>& ap,
                const std::vector<double>& am, const std::vector<double>& bp,
                const std::vector<double>& bm) {
  if (static_cast<int>(ap.size()) != grid.n_t() ||
      static_cast<int>(bp.size()) != grid.n_t())
    throw ShapeMismatch("signal length does not match n_t");
  double s = 0.0;
  for (int n = 0; n < grid.n_t(); ++n)
    s += grid.signal_weight(n) * (ap[n] * bp[n] + am[n] * bm[n]);
  return s;
}

}  // namespace

double inner_product_H(const SpaceTimeGrid& grid, const BoundaryControl& a,
                       const BoundaryControl& b) {
  return dot_pair(grid, a.plus, a.minus, b.plus, b.minus);
}

double inner_product_H(const SpaceTimeGrid& grid, const TraceSignal& a,
                       const TraceSignal& b) {
  return dot_pair(grid, a.plus, a.minus, b.plus, b.minus);
}

double norm_H(const SpaceTimeGrid& grid, const BoundaryControl& a) {
  return std::sqrt(inner_product_H(grid, a, a));
}

double norm_H(const SpaceTimeGrid& grid, const TraceSignal& a) {
  return std::sqrt(inner_product_H(grid, a, a));
}

TraceSignal boundary_to_trace(const SystemSpec& sys, const SpaceTimeGrid& grid,
                              const BoundaryControl& u) {
  return extract_traces(forward_solve(sys, grid, u));
}

BoundaryControl boundary_to_trace_adjoint(const SystemSpec& sys,
                                          const SpaceTimeGrid& grid,
                                          const TraceSignal& z) {
  if (z.size() != grid.n_t())
    throw ShapeMismatch("adjoint data length does not match n_t");
  const int n_x = grid.n_x();
  const int n_t = grid.n_t();
  const double r = grid.dt() / grid.dx();
  const double sdt = sys.eta0 * grid.dt();
  const SampledCoefficients co = SampledCoefficients::build(sys, grid);

  // Transpose of one forward step.  Rows of the forward update:
  //   plus  i>=1: (1 - a_i + sdt M11_i) on P_i, a_i on P_{i-1}, sdt M12_i on M_i
  //   minus i<n_x: (1 + b_i + sdt M22_i) on M_i, -b_i on M_{i+1}, sdt M21_i on P_i
  // with a_i = d+ dt/dx, b_i = d- dt/dx; boundary rows are pure injections.
  std::vector<double> pp(n_x + 1, 0.0), pm(n_x + 1, 0.0);
  std::vector<double> qp(n_x + 1), qm(n_x + 1);
  BoundaryControl g(n_t);

  for (int m = n_t - 1; m >= 0; --m) {
    for (int j = 0; j <= n_x; ++j) {
      double acc = 0.0;
      if (j >= 1) {
        const Eigen::Matrix2d& M = co.coupling[j];
        acc += (1.0 - co.d_plus[j] * r + sdt * M(0, 0)) * pp[j];
      }
      if (j + 1 <= n_x) acc += co.d_plus[j + 1] * r * pp[j + 1];
      if (j <= n_x - 1) acc += sdt * co.coupling[j](1, 0) * pm[j];
      qp[j] = acc;
    }
    for (int j = 0; j <= n_x; ++j) {
      double acc = 0.0;
      if (j <= n_x - 1) {
        const Eigen::Matrix2d& M = co.coupling[j];
        acc += (1.0 + co.d_minus[j] * r + sdt * M(1, 1)) * pm[j];
      }
      if (j >= 1) acc += -co.d_minus[j - 1] * r * pm[j - 1];
      if (j >= 1) acc += sdt * co.coupling[j](0, 1) * pp[j];
      qm[j] = acc;
    }
    pp.swap(qp);
    pm.swap(qm);
    // Inject the weighted trace data and read off the injection points.
    const double w = grid.signal_weight(m);
    pp[n_x] += w * z.plus[m];
    pm[0] += w * z.minus[m];
    g.plus[m] = pp[0] / w;
    g.minus[m] = pm[n_x] / w;
  }
  return g;
}

BoundaryControl continuous_adjoint_trace(const SystemSpec& sys,
                                         const SpaceTimeGrid& grid,
                                         const TraceSignal& z) {
  const StateTrajectory zt = adjoint_backward_solve(sys, grid, z);
  const double dp0 = sys.d_plus(0.0);
  const double dmL = std::abs(sys.d_minus(sys.length));
  BoundaryControl g(grid.n_t());
  for (int n = 0; n < grid.n_t(); ++n) {
    g.plus[n] = dp0 * zt.plus(n, 0);
    g.minus[n] = dmL * zt.minus(n, grid.n_x());
  }
  return g;
}

StaticMaps assemble_static_maps(const SystemSpec& sys,
                                const SpaceTimeGrid& grid) {
  StaticMaps maps;
  for (int c = 0; c < 2; ++c) {
    const Eigen::Vector2d u = Eigen::Vector2d::Unit(c);
    const StaticProfile prof = steady_solve(sys, grid, u);
    maps.forward(0, c) = prof.plus[grid.n_x()];
    maps.forward(1, c) = prof.minus[0];
    const StaticProfile adj = steady_adjoint_solve(sys, grid, u);
    maps.adjoint_steady_path(0, c) = sys.d_plus(0.0) * adj.plus[0];
    maps.adjoint_steady_path(1, c) =
        std::abs(sys.d_minus(sys.length)) * adj.minus[grid.n_x()];
  }
  maps.adjoint = maps.forward.transpose();
  maps.transpose_deviation =
      (maps.adjoint - maps.adjoint_steady_path).norm();
  return maps;
}

double operator_norm_estimate(const SystemSpec& sys, const SpaceTimeGrid& grid,
                              int iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  BoundaryControl v(grid.n_t());
  for (int n = 0; n < grid.n_t(); ++n) {
    v.plus[n] = gauss(rng);
    v.minus[n] = gauss(rng);
  }
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nv = norm_H(grid, v);
    if (!(nv > 0.0)) return 0.0;
    for (int n = 0; n < grid.n_t(); ++n) {
      v.plus[n] /= nv;
      v.minus[n] /= nv;
    }
    const TraceSignal fv = boundary_to_trace(sys, grid, v);
    const BoundaryControl w = boundary_to_trace_adjoint(sys, grid, fv);
    lambda = inner_product_H(grid, v, w);  // Rayleigh quotient of F*F
    v = w;
  }
  return std::sqrt(std::max(0.0, lambda));
}

}  // namespace turnpike
