#include "turnpike/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "turnpike/operators.hpp"
#include "turnpike/solvers.hpp"

namespace turnpike {

namespace {

double density_slope(const PipelineParams& p, double q, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw VacuumReached("density left the positive range during integration");
  return (-p.theta * q * std::abs(q) / rho - p.g * p.h_prime * rho) /
         (p.c * p.c);
}

// Implicit-in-space upwind march and its exact transpose.  One step solves
//   T r^{n+1} = C r^n + E u^n
// with T bidiagonal per channel (implicit transport) and C the explicit
// nodal source; boundary rows of T are pure injections.
struct ImplicitMarch {
  int n_x, n_t;
  double sdt;  // eta0 * dt
  std::vector<double> a, b;  // d+ dt/dx and |d-| dt/dx at the nodes
  SampledCoefficients co;
  const SpaceTimeGrid* grid;

  ImplicitMarch(const SystemSpec& sys, const SpaceTimeGrid& g)
      : n_x(g.n_x()), n_t(g.n_t()), sdt(sys.eta0 * g.dt()),
        co(SampledCoefficients::build(sys, g)), grid(&g) {
    const double r = g.dt() / g.dx();
    a.resize(n_x + 1);
    b.resize(n_x + 1);
    for (int i = 0; i <= n_x; ++i) {
      a[i] = co.d_plus[i] * r;
      b[i] = -co.d_minus[i] * r;
    }
  }

  StateTrajectory forward(const BoundaryControl& u,
                          const StaticProfile* h0) const {
    if (u.size() != n_t)
      throw ShapeMismatch("control length does not match n_t");
    StateTrajectory st(n_t, n_x);
    if (h0) {
      if (h0->nodes() != n_x + 1)
        throw ShapeMismatch("initial profile does not match n_x");
      for (int i = 0; i <= n_x; ++i) {
        st.plus(0, i) = h0->plus[i];
        st.minus(0, i) = h0->minus[i];
      }
    }
    for (int n = 0; n < n_t; ++n) {
      st.plus(n + 1, 0) = u.plus[n];
      for (int i = 1; i <= n_x; ++i) {
        const Eigen::Matrix2d& M = co.coupling[i];
        const double src =
            sdt * (M(0, 0) * st.plus(n, i) + M(0, 1) * st.minus(n, i));
        st.plus(n + 1, i) =
            (st.plus(n, i) + a[i] * st.plus(n + 1, i - 1) + src) / (1.0 + a[i]);
      }
      st.minus(n + 1, n_x) = u.minus[n];
      for (int i = n_x - 1; i >= 0; --i) {
        const Eigen::Matrix2d& M = co.coupling[i];
        const double src =
            sdt * (M(1, 0) * st.plus(n, i) + M(1, 1) * st.minus(n, i));
        st.minus(n + 1, i) =
            (st.minus(n, i) + b[i] * st.minus(n + 1, i + 1) + src) /
            (1.0 + b[i]);
      }
    }
    return st;
  }

  TraceSignal traces(const BoundaryControl& u) const {
    return extract_traces(forward(u, nullptr));
  }

  // Backward sweep of the transposed recursion.  phi holds T^{-T} lambda of
  // the later step; lambda = C^T phi + weighted trace injection; solving
  // T^T phi = lambda needs one back (plus) and one forward (minus)
  // substitution per step.
  BoundaryControl trace_adjoint(const TraceSignal& z) const {
    if (z.size() != n_t)
      throw ShapeMismatch("adjoint data length does not match n_t");
    std::vector<double> phip(n_x + 1, 0.0), phim(n_x + 1, 0.0);
    std::vector<double> lp(n_x + 1), lm(n_x + 1);
    BoundaryControl g(n_t);
    for (int m = n_t - 1; m >= 0; --m) {
      for (int j = 0; j <= n_x; ++j) {
        double accp = 0.0, accm = 0.0;
        if (j >= 1) {
          accp += (1.0 + sdt * co.coupling[j](0, 0)) * phip[j];
          accm += sdt * co.coupling[j](0, 1) * phip[j];
        }
        if (j <= n_x - 1) {
          accp += sdt * co.coupling[j](1, 0) * phim[j];
          accm += (1.0 + sdt * co.coupling[j](1, 1)) * phim[j];
        }
        lp[j] = accp;
        lm[j] = accm;
      }
      const double w = grid->signal_weight(m);
      lp[n_x] += w * z.plus[m];
      lm[0] += w * z.minus[m];
      phip[n_x] = lp[n_x] / (1.0 + a[n_x]);
      for (int j = n_x - 1; j >= 1; --j)
        phip[j] = (lp[j] + a[j + 1] * phip[j + 1]) / (1.0 + a[j]);
      phip[0] = lp[0] + a[1] * phip[1];
      phim[0] = lm[0] / (1.0 + b[0]);
      for (int j = 1; j <= n_x - 1; ++j)
        phim[j] = (lm[j] + b[j - 1] * phim[j - 1]) / (1.0 + b[j]);
      phim[n_x] = lm[n_x] + b[n_x - 1] * phim[n_x - 1];
      g.plus[m] = phip[0] / w;
      g.minus[m] = phim[n_x] / w;
    }
    return g;
  }
};

void add_block(const Eigen::Matrix2d& B, const std::vector<double>& xp,
               const std::vector<double>& xm, std::vector<double>& yp,
               std::vector<double>& ym) {
  const int n = static_cast<int>(xp.size());
  for (int i = 0; i < n; ++i) {
    yp[i] += B(0, 0) * xp[i] + B(0, 1) * xm[i];
    ym[i] += B(1, 0) * xp[i] + B(1, 1) * xm[i];
  }
}

// Reduced quadratic map of the scenario stepper, mirroring the dynamic
// solver: g = cc u + ct (F u) + F*(tc u + tt (F u)) plus offsets on request.
BoundaryControl reduced_apply_implicit(const QuadraticCost& cost,
                                       const ImplicitMarch& march,
                                       const BoundaryControl& u,
                                       bool with_offsets) {
  const int n_t = march.n_t;
  const TraceSignal tr = march.traces(u);
  BoundaryControl g(n_t);
  add_block(cost.cc, u.plus, u.minus, g.plus, g.minus);
  add_block(cost.ct, tr.plus, tr.minus, g.plus, g.minus);
  TraceSignal m(n_t);
  add_block(cost.tc, u.plus, u.minus, m.plus, m.minus);
  add_block(cost.tt, tr.plus, tr.minus, m.plus, m.minus);
  if (with_offsets) {
    for (int n = 0; n < n_t; ++n) {
      g.plus[n] += cost.control_offset[0];
      g.minus[n] += cost.control_offset[1];
      m.plus[n] += cost.trace_offset[0];
      m.minus[n] += cost.trace_offset[1];
    }
  }
  const BoundaryControl back = march.trace_adjoint(m);
  for (int n = 0; n < n_t; ++n) {
    g.plus[n] += back.plus[n];
    g.minus[n] += back.minus[n];
  }
  return g;
}

// Dynamic solve against the scenario stepper: same normal equations and CG
// in the H inner product as the explicit-scheme solver.
DynamicSolution solve_dynamic_implicit(const QuadraticCost& cost,
                                       const SystemSpec& sys,
                                       const SpaceTimeGrid& grid,
                                       const CgOptions& opts) {
  const int n_t = grid.n_t();
  const int max_it = opts.max_iterations > 0 ? opts.max_iterations : 10 * n_t;
  const ImplicitMarch march(sys, grid);

  BoundaryControl b(n_t);
  {
    TraceSignal v2(n_t);
    for (int n = 0; n < n_t; ++n) {
      v2.plus[n] = cost.trace_offset[0];
      v2.minus[n] = cost.trace_offset[1];
    }
    const BoundaryControl back = march.trace_adjoint(v2);
    for (int n = 0; n < n_t; ++n) {
      b.plus[n] = -(cost.control_offset[0] + back.plus[n]);
      b.minus[n] = -(cost.control_offset[1] + back.minus[n]);
    }
  }

  BoundaryControl x(n_t);
  if (opts.warm_start) {
    const StaticSolution st = solve_static(cost, sys, grid);
    for (int n = 0; n < n_t; ++n) {
      x.plus[n] = st.control[0];
      x.minus[n] = st.control[1];
    }
  }

  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
  const double nb = std::sqrt(inner_product_H(grid, b, b));
  if (nb > 0.0) {
    BoundaryControl r = reduced_apply_implicit(cost, march, x, false);
    for (int n = 0; n < n_t; ++n) {
      r.plus[n] = b.plus[n] - r.plus[n];
      r.minus[n] = b.minus[n] - r.minus[n];
    }
    BoundaryControl p = r;
    double rho = inner_product_H(grid, r, r);
    residual = std::sqrt(rho) / nb;
    if (opts.log_residuals) history.push_back(residual);
    for (int it = 0; it < max_it && residual > opts.tol; ++it) {
      const BoundaryControl Ap = reduced_apply_implicit(cost, march, p, false);
      const double curvature = inner_product_H(grid, p, Ap);
      if (!(curvature > 0.0))
        throw SPDViolation("nonpositive curvature direction in CG");
      const double alpha = rho / curvature;
      for (int n = 0; n < n_t; ++n) {
        x.plus[n] += alpha * p.plus[n];
        x.minus[n] += alpha * p.minus[n];
        r.plus[n] -= alpha * Ap.plus[n];
        r.minus[n] -= alpha * Ap.minus[n];
      }
      const double rho_next = inner_product_H(grid, r, r);
      const double beta = rho_next / rho;
      rho = rho_next;
      for (int n = 0; n < n_t; ++n) {
        p.plus[n] = r.plus[n] + beta * p.plus[n];
        p.minus[n] = r.minus[n] + beta * p.minus[n];
      }
      iterations = it + 1;
      residual = std::sqrt(rho) / nb;
      if (opts.log_residuals) history.push_back(residual);
    }
    if (residual > opts.tol)
      throw NoConvergence("CG stalled at relative residual " +
                          std::to_string(residual));
  } else {
    x = BoundaryControl(n_t);
  }

  DynamicSolution sol;
  sol.state = march.forward(x, nullptr);
  sol.trace = extract_traces(sol.state);
  sol.control = std::move(x);
  sol.objective = eval_J(cost, grid, sol.control, sol.trace);
  TraceSignal m(n_t);
  add_block(cost.tc, sol.control.plus, sol.control.minus, m.plus, m.minus);
  add_block(cost.tt, sol.trace.plus, sol.trace.minus, m.plus, m.minus);
  const double dpL = sys.d_plus(sys.length);
  const double dm0 = std::abs(sys.d_minus(0.0));
  sol.multiplier_trace = TraceSignal(n_t);
  for (int n = 0; n < n_t; ++n) {
    sol.multiplier_trace.plus[n] = (m.plus[n] + cost.trace_offset[0]) / dpL;
    sol.multiplier_trace.minus[n] = (m.minus[n] + cost.trace_offset[1]) / dm0;
  }
  sol.cg_iterations = iterations;
  sol.residual = residual;
  sol.residual_history = std::move(history);
  return sol;
}

}  // namespace

StationaryState stationary_profile(const PipelineParams& params, int n_x,
                                   int substeps_per_cell) {
  if (n_x < 1) throw EmptyGrid("need at least one spatial cell");
  if (substeps_per_cell < 1)
    throw ValidationError("substeps_per_cell must be positive");
  if (!(params.c > 0.0) || !(params.length > 0.0))
    throw ValidationError("sound speed and length must be positive");
  if (!(params.rho_exit_initial > 0.0))
    throw PositivityViolation("exit density must be positive");

  StationaryState st;
  st.q_bar = params.q_exit_initial;
  st.x.resize(n_x + 1);
  st.rho_bar.resize(n_x + 1);
  const double dx = params.length / n_x;
  for (int i = 0; i <= n_x; ++i) st.x[i] = dx * i;

  st.rho_bar[n_x] = params.rho_exit_initial;
  const double h = -dx / substeps_per_cell;
  for (int i = n_x - 1; i >= 0; --i) {
    double rho = st.rho_bar[i + 1];
    for (int s = 0; s < substeps_per_cell; ++s) {
      const double k1 = density_slope(params, st.q_bar, rho);
      const double k2 = density_slope(params, st.q_bar, rho + 0.5 * h * k1);
      const double k3 = density_slope(params, st.q_bar, rho + 0.5 * h * k2);
      const double k4 = density_slope(params, st.q_bar, rho + h * k3);
      rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw VacuumReached("density left the positive range during integration");
    st.rho_bar[i] = rho;
  }

  st.R_bar.resize(n_x + 1);
  for (int i = 0; i <= n_x; ++i)
    st.R_bar[i] = to_diagonal(st.rho_bar[i], st.q_bar, params.c);
  return st;
}

Eigen::Vector2d to_diagonal(double rho, double q, double c) {
  return {c * rho + q, -c * rho + q};
}

void from_diagonal(const Eigen::Vector2d& R, double c, double& rho,
                   double& q) {
  const double d = R[0] - R[1];
  if (!(d > 0.0))
    throw DegenerateDensity("diagonal variables imply non-positive density");
  rho = d / (2.0 * c);
  q = 0.5 * (R[0] + R[1]);
}

Eigen::Vector2d pipeline_source(const PipelineParams& params,
                                const Eigen::Vector2d& R) {
  const double s = R[0] + R[1];
  const double d = R[0] - R[1];
  if (!(d > 0.0))
    throw DegenerateDensity("diagonal variables imply non-positive density");
  const double val = 0.5 * params.theta * params.c * s * std::abs(s) / d +
                     params.g * params.h_prime * d / (2.0 * params.c);
  return {-val, -val};
}

Eigen::Matrix2d pipeline_source_jacobian(const PipelineParams& params,
                                         const Eigen::Vector2d& R) {
  const double s = R[0] + R[1];
  const double d = R[0] - R[1];
  if (!(d > 0.0))
    throw DegenerateDensity("diagonal variables imply non-positive density");
  const double fr = 0.5 * params.theta * params.c;
  const double grav = params.g * params.h_prime / (2.0 * params.c);
  const double phi_p = fr * (2.0 * std::abs(s) / d - s * std::abs(s) / (d * d)) + grav;
  const double phi_m = fr * (2.0 * std::abs(s) / d + s * std::abs(s) / (d * d)) - grav;
  Eigen::Matrix2d J;
  J << -phi_p, -phi_m, -phi_p, -phi_m;
  return J;
}

SystemSpec linearized_system(const PipelineParams& params,
                             const StationaryState& stationary) {
  if (stationary.x.size() < 2 ||
      stationary.x.size() != stationary.R_bar.size())
    throw ShapeMismatch("stationary state needs matching node arrays");
  auto table = std::make_shared<std::vector<Eigen::Matrix2d>>();
  table->reserve(stationary.R_bar.size());
  for (const auto& R : stationary.R_bar)
    table->push_back(-pipeline_source_jacobian(params, R));

  const double length = params.length;
  const double dx = stationary.x[1] - stationary.x[0];
  const double c = params.c;

  SystemSpec sys;
  sys.length = length;
  sys.eta0 = -1.0;
  sys.d_plus = [c](double) { return c; };
  sys.d_minus = [c](double) { return -c; };
  sys.d_plus_prime = [](double) { return 0.0; };
  sys.d_minus_prime = [](double) { return 0.0; };
  sys.coupling = [table, dx, length](double x) {
    const double xc = std::clamp(x, 0.0, length);
    const int last = static_cast<int>(table->size()) - 1;
    const int i = std::min(static_cast<int>(xc / dx), last - 1);
    const double w = std::clamp(xc / dx - i, 0.0, 1.0);
    return Eigen::Matrix2d((1.0 - w) * (*table)[i] + w * (*table)[i + 1]);
  };
  return sys;
}

StateTrajectory implicit_forward_solve(const SystemSpec& sys,
                                       const SpaceTimeGrid& grid,
                                       const BoundaryControl& u,
                                       const StaticProfile* h0) {
  return ImplicitMarch(sys, grid).forward(u, h0);
}

BoundaryControl implicit_trace_adjoint(const SystemSpec& sys,
                                       const SpaceTimeGrid& grid,
                                       const TraceSignal& z) {
  return ImplicitMarch(sys, grid).trace_adjoint(z);
}

QuadraticCost build_pipeline_cost(const PipelineParams& params,
                                  const StationaryState& stationary) {
  if (stationary.rho_bar.empty())
    throw ShapeMismatch("stationary state has no nodes");
  if (!(params.lambda > 0.0))
    throw LambdaOutOfRange("entry weight must be positive");
  const double c = params.c;
  const double dr = params.rho_exit_target - stationary.rho_bar.back();
  const double dq = params.q_exit_target - stationary.q_bar;

  Eigen::Matrix2d Q1, Q2;
  Q1 << 1.0, -1.0, -1.0, 1.0;
  Q2 << 1.0, 1.0, 1.0, 1.0;

  const Eigen::Matrix2d AL =
      Q1 / (2.0 * c * c) + 0.5 * params.alpha * Q2;
  const Eigen::Vector2d cL(dr / c - params.alpha * dq,
                           -dr / c - params.alpha * dq);
  double constant_rate = dr * dr + params.alpha * dq * dq;

  const Eigen::Matrix2d A0 =
      params.lambda * (Q1 / (2.0 * c * c) + 0.5 * params.beta * Q2);
  Eigen::Vector2d c0 = Eigen::Vector2d::Zero();
  if (params.literal_entry_cost) {
    const double rho0 = stationary.rho_bar.front();
    const double qb = stationary.q_bar;
    c0 = params.lambda *
         Eigen::Vector2d(rho0 / c + params.beta * qb,
                         -rho0 / c + params.beta * qb);
    constant_rate += params.lambda * (rho0 * rho0 + params.beta * qb * qb);
  }
  return make_cost(A0, AL, c0, cL, constant_rate);
}

ScenarioReport run_transition_scenario(const PipelineParams& params, int n_x,
                                       int n_t, QuadRule rule,
                                       const CgOptions& opts) {
  ScenarioReport report;
  report.stationary = stationary_profile(params, n_x);
  const SystemSpec sys = linearized_system(params, report.stationary);
  const SpaceTimeGrid grid(sys, n_x, n_t, params.T, rule);
  report.cfl = cfl_of(sys, grid);
  const QuadraticCost cost = build_pipeline_cost(params, report.stationary);
  report.static_sol = solve_static(cost, sys, grid);
  report.dynamic_sol = solve_dynamic_implicit(cost, sys, grid, opts);

  const double c = params.c;
  const double rho0 = report.stationary.rho_bar.front();
  const double qb = report.stationary.q_bar;
  const StaticProfile& prof = report.static_sol.profile;
  report.rho_entry_static = rho0 + (prof.plus[0] - prof.minus[0]) / (2.0 * c);
  report.q_entry_static = qb + 0.5 * (prof.plus[0] + prof.minus[0]);

  const StateTrajectory& state = report.dynamic_sol.state;
  report.times.resize(grid.n_t() + 1);
  report.rho_entry.resize(grid.n_t() + 1);
  report.q_entry.resize(grid.n_t() + 1);
  report.e_rho.resize(grid.n_t() + 1);
  report.e_q.resize(grid.n_t() + 1);
  const double rho_ref = std::max(std::abs(report.rho_entry_static), 1e-300);
  const double q_ref = std::max(std::abs(report.q_entry_static), 1e-300);
  for (int n = 0; n <= grid.n_t(); ++n) {
    report.times[n] = grid.t(n);
    const double rp = state.plus(n, 0);
    const double rm = state.minus(n, 0);
    report.rho_entry[n] = rho0 + (rp - rm) / (2.0 * c);
    report.q_entry[n] = qb + 0.5 * (rp + rm);
    report.e_rho[n] =
        std::abs(report.rho_entry[n] - report.rho_entry_static) / rho_ref;
    report.e_q[n] = std::abs(report.q_entry[n] - report.q_entry_static) / q_ref;
  }

  // Longest contiguous node window below the tolerance in both errors.
  int best_begin = 0, best_end = 0, begin = -1;
  for (int n = 0; n <= grid.n_t() + 1; ++n) {
    const bool ok =
        n <= grid.n_t() && std::max(report.e_rho[n], report.e_q[n]) <
                               report.plateau_tolerance;
    if (ok && begin < 0) begin = n;
    if (!ok && begin >= 0) {
      if (n - begin > best_end - best_begin) {
        best_begin = begin;
        best_end = n;
      }
      begin = -1;
    }
  }
  report.plateau_begin = best_begin;
  report.plateau_end = best_end;
  report.plateau_fraction =
      static_cast<double>(best_end - best_begin) / (grid.n_t() + 1.0);
  return report;
}

void reconstruct_physical(const StationaryState& stationary, double c,
                          const StateTrajectory& deviation,
                          std::vector<double>& rho, std::vector<double>& q) {
  const int n_x = deviation.n_x();
  const int n_t = deviation.n_t();
  if (static_cast<int>(stationary.rho_bar.size()) != n_x + 1)
    throw ShapeMismatch("stationary nodes do not match the trajectory");
  rho.assign(static_cast<std::size_t>(n_t + 1) * (n_x + 1), 0.0);
  q.assign(rho.size(), 0.0);
  for (int n = 0; n <= n_t; ++n) {
    for (int i = 0; i <= n_x; ++i) {
      const std::size_t k = static_cast<std::size_t>(n) * (n_x + 1) + i;
      const double rp = deviation.plus(n, i);
      const double rm = deviation.minus(n, i);
      rho[k] = stationary.rho_bar[i] + (rp - rm) / (2.0 * c);
      q[k] = stationary.q_bar + 0.5 * (rp + rm);
    }
  }
}

}  // namespace turnpike
