#include "turnpike/optimizer.hpp"

#include <Eigen/LU>

#include <cmath>
#include <random>

namespace turnpike {

namespace {

// Pointwise-in-time application of a 2x2 block to a channel pair.
void add_block(const Eigen::Matrix2d& B, const std::vector<double>& xp,
               const std::vector<double>& xm, std::vector<double>& yp,
               std::vector<double>& ym) {
  const int n = static_cast<int>(xp.size());
  for (int i = 0; i < n; ++i) {
    yp[i] += B(0, 0) * xp[i] + B(0, 1) * xm[i];
    ym[i] += B(1, 0) * xp[i] + B(1, 1) * xm[i];
  }
}

BoundaryControl zeros_like(const SpaceTimeGrid& grid) {
  return BoundaryControl(grid.n_t());
}

// g = cc u + ct (F u) + F*(tc u + tt (F u)) plus offsets when requested.
BoundaryControl reduced_apply(const QuadraticCost& cost, const SystemSpec& sys,
                              const SpaceTimeGrid& grid,
                              const BoundaryControl& u, bool with_offsets,
                              TraceSignal* trace_out = nullptr,
                              TraceSignal* multiplier_out = nullptr) {
  const TraceSignal tr = boundary_to_trace(sys, grid, u);
  BoundaryControl g = zeros_like(grid);
  add_block(cost.cc, u.plus, u.minus, g.plus, g.minus);
  add_block(cost.ct, tr.plus, tr.minus, g.plus, g.minus);
  TraceSignal m(grid.n_t());
  add_block(cost.tc, u.plus, u.minus, m.plus, m.minus);
  add_block(cost.tt, tr.plus, tr.minus, m.plus, m.minus);
  if (with_offsets) {
    for (int n = 0; n < grid.n_t(); ++n) {
      g.plus[n] += cost.control_offset[0];
      g.minus[n] += cost.control_offset[1];
      m.plus[n] += cost.trace_offset[0];
      m.minus[n] += cost.trace_offset[1];
    }
  }
  const BoundaryControl back = boundary_to_trace_adjoint(sys, grid, m);
  for (int n = 0; n < grid.n_t(); ++n) {
    g.plus[n] += back.plus[n];
    g.minus[n] += back.minus[n];
  }
  if (trace_out) *trace_out = tr;
  if (multiplier_out) *multiplier_out = m;
  return g;
}

struct CgResult {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

// Standard CG in the H inner product on channel pairs.  `mask_plus` freezes
// the plus channel (one-sided solves).
template <class Apply>
CgResult conjugate_gradient(const SpaceTimeGrid& grid, const Apply& apply,
                            const BoundaryControl& b, BoundaryControl& x,
                            double tol, int max_iterations, bool mask_plus,
                            bool log_residuals) {
  const int n_t = grid.n_t();
  const auto masked = [&](BoundaryControl& v) {
    if (mask_plus)
      for (int n = 0; n < n_t; ++n) v.plus[n] = 0.0;
  };
  const double nb = std::sqrt(inner_product_H(grid, b, b));
  CgResult res;
  if (!(nb > 0.0)) {
    x = BoundaryControl(n_t);
    return res;
  }

  BoundaryControl r = apply(x);
  for (int n = 0; n < n_t; ++n) {
    r.plus[n] = b.plus[n] - r.plus[n];
    r.minus[n] = b.minus[n] - r.minus[n];
  }
  masked(r);
  BoundaryControl p = r;
  double rho = inner_product_H(grid, r, r);
  res.residual = std::sqrt(rho) / nb;
  if (log_residuals) res.history.push_back(res.residual);

  for (int it = 0; it < max_iterations && res.residual > tol; ++it) {
    BoundaryControl Ap = apply(p);
    masked(Ap);
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
    res.iterations = it + 1;
    res.residual = std::sqrt(rho) / nb;
    if (log_residuals) res.history.push_back(res.residual);
  }
  if (res.residual > tol)
    throw NoConvergence("CG stalled at relative residual " +
                        std::to_string(res.residual));
  return res;
}

DynamicSolution package_solution(const QuadraticCost& cost,
                                 const SystemSpec& sys,
                                 const SpaceTimeGrid& grid, BoundaryControl u,
                                 const CgResult& cg) {
  DynamicSolution sol;
  sol.state = forward_solve(sys, grid, u);
  sol.trace = extract_traces(sol.state);
  sol.control = std::move(u);
  sol.objective = eval_J(cost, grid, sol.control, sol.trace);
  // Adjoint boundary data at the optimum, scaled by the boundary speeds.
  TraceSignal m(grid.n_t());
  add_block(cost.tc, sol.control.plus, sol.control.minus, m.plus, m.minus);
  add_block(cost.tt, sol.trace.plus, sol.trace.minus, m.plus, m.minus);
  const double dpL = sys.d_plus(sys.length);
  const double dm0 = std::abs(sys.d_minus(0.0));
  sol.multiplier_trace = TraceSignal(grid.n_t());
  for (int n = 0; n < grid.n_t(); ++n) {
    sol.multiplier_trace.plus[n] =
        (m.plus[n] + cost.trace_offset[0]) / dpL;
    sol.multiplier_trace.minus[n] =
        (m.minus[n] + cost.trace_offset[1]) / dm0;
  }
  sol.cg_iterations = cg.iterations;
  sol.residual = cg.residual;
  sol.residual_history = cg.history;
  return sol;
}

}  // namespace

BoundaryControl grad_dynamic(const QuadraticCost& cost, const SystemSpec& sys,
                             const SpaceTimeGrid& grid,
                             const BoundaryControl& u) {
  return reduced_apply(cost, sys, grid, u, /*with_offsets=*/true);
}

DynamicSolution solve_dynamic(const QuadraticCost& cost, const SystemSpec& sys,
                              const SpaceTimeGrid& grid,
                              const CgOptions& opts) {
  const int n_t = grid.n_t();
  const int max_it = opts.max_iterations > 0 ? opts.max_iterations : 10 * n_t;

  // Right-hand side -(v1 + F* v2).
  BoundaryControl b = zeros_like(grid);
  {
    TraceSignal v2(n_t);
    for (int n = 0; n < n_t; ++n) {
      v2.plus[n] = cost.trace_offset[0];
      v2.minus[n] = cost.trace_offset[1];
    }
    const BoundaryControl back = boundary_to_trace_adjoint(sys, grid, v2);
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

  const auto apply = [&](const BoundaryControl& v) {
    return reduced_apply(cost, sys, grid, v, /*with_offsets=*/false);
  };
  const CgResult cg = conjugate_gradient(grid, apply, b, x, opts.tol, max_it,
                                         /*mask_plus=*/false,
                                         opts.log_residuals);
  return package_solution(cost, sys, grid, std::move(x), cg);
}

StaticSolution solve_static(const QuadraticCost& cost, const SystemSpec& sys,
                            const SpaceTimeGrid& grid) {
  const StaticMaps maps = assemble_static_maps(sys, grid);
  const Eigen::Matrix2d F = maps.forward;
  const Eigen::Matrix2d K = cost.cc + cost.ct * F +
                            F.transpose() * cost.tc +
                            F.transpose() * cost.tt * F;
  const Eigen::Vector2d rhs =
      -(cost.control_offset + F.transpose() * cost.trace_offset);
  const double det = K.determinant();
  if (!(std::abs(det) > 1e-300))
    throw SingularSystem("steady reduced system is singular");
  StaticSolution sol;
  sol.control = K.inverse() * rhs;
  sol.profile = steady_solve(sys, grid, sol.control);
  sol.objective = eval_J0(cost, sol.control, sol.profile);
  const Eigen::Vector2d trace(sol.profile.plus[grid.n_x()],
                              sol.profile.minus[0]);
  sol.multiplier = cost.tc * sol.control + cost.tt * trace + cost.trace_offset;
  sol.multiplier_profile = steady_adjoint_solve(sys, grid, sol.multiplier);
  // First-order conditions with the exact transpose.
  const Eigen::Vector2d res = cost.cc * sol.control + cost.ct * trace +
                              cost.control_offset +
                              F.transpose() * sol.multiplier;
  sol.optimality_residual = res.cwiseAbs().maxCoeff();
  return sol;
}

DynamicSolution solve_one_sided(const QuadraticCost& cost,
                                const SystemSpec& sys,
                                const SpaceTimeGrid& grid,
                                const std::vector<double>& u_plus,
                                const CgOptions& opts) {
  const int n_t = grid.n_t();
  if (static_cast<int>(u_plus.size()) != n_t)
    throw ShapeMismatch("frozen plus control length does not match n_t");
  const int max_it = opts.max_iterations > 0 ? opts.max_iterations : 10 * n_t;

  // Affine part at (u_plus, 0): the minus-channel equation reads
  // (reduced_apply(u_plus, v) + offsets)_- = 0.
  BoundaryControl frozen(n_t);
  frozen.plus = u_plus;
  const BoundaryControl affine =
      reduced_apply(cost, sys, grid, frozen, /*with_offsets=*/true);
  BoundaryControl b = zeros_like(grid);
  for (int n = 0; n < n_t; ++n) b.minus[n] = -affine.minus[n];

  const auto apply = [&](const BoundaryControl& v) {
    return reduced_apply(cost, sys, grid, v, /*with_offsets=*/false);
  };
  BoundaryControl x(n_t);
  CgResult cg;
  if (norm_H(grid, b) > 0.0) {
    cg = conjugate_gradient(grid, apply, b, x, opts.tol, max_it,
                            /*mask_plus=*/true, opts.log_residuals);
  }
  BoundaryControl full(n_t);
  full.plus = u_plus;
  full.minus = x.minus;
  return package_solution(cost, sys, grid, std::move(full), cg);
}

double estimate_coercivity(const QuadraticCost& cost, const SystemSpec& sys,
                           const SpaceTimeGrid& grid, int iterations,
                           std::uint64_t seed, double cg_tol) {
  const int n_t = grid.n_t();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  BoundaryControl v(n_t);
  for (int n = 0; n < n_t; ++n) {
    v.plus[n] = gauss(rng);
    v.minus[n] = gauss(rng);
  }
  const auto apply = [&](const BoundaryControl& u) {
    return reduced_apply(cost, sys, grid, u, /*with_offsets=*/false);
  };
  double kappa = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nv = norm_H(grid, v);
    if (!(nv > 0.0)) throw SPDViolation("coercivity iteration degenerated");
    for (int n = 0; n < n_t; ++n) {
      v.plus[n] /= nv;
      v.minus[n] /= nv;
    }
    BoundaryControl w(n_t);
    conjugate_gradient(grid, apply, v, w, cg_tol, 10 * n_t,
                       /*mask_plus=*/false, false);
    const double wv = inner_product_H(grid, w, v);
    const double ww = inner_product_H(grid, w, w);
    if (!(ww > 0.0)) throw SPDViolation("coercivity iteration degenerated");
    kappa = wv / ww;  // Rayleigh estimate of the smallest eigenvalue
    v = w;
  }
  return kappa;
}

}  // namespace turnpike
