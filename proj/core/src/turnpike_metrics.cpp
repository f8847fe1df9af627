#include "turnpike/turnpike_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace turnpike {

double control_metric(const SpaceTimeGrid& grid, const BoundaryControl& u,
                      const Eigen::Vector2d& u_static) {
  if (u.size() != grid.n_t())
    throw ShapeMismatch("control length does not match n_t");
  double s = 0.0;
  for (int n = 0; n < grid.n_t(); ++n) {
    const double dp = u.plus[n] - u_static[0];
    const double dm = u.minus[n] - u_static[1];
    s += grid.signal_weight(n) * (dp * dp + dm * dm);
  }
  return s / grid.T();
}

double state_metric(const SpaceTimeGrid& grid, const StateTrajectory& state,
                    const StaticProfile& reference) {
  if (state.n_t() != grid.n_t() || state.n_x() != grid.n_x())
    throw ShapeMismatch("trajectory does not match the grid");
  if (reference.nodes() != grid.n_x() + 1)
    throw ShapeMismatch("profile does not match the grid");
  double s = 0.0;
  for (int n = 0; n <= grid.n_t(); ++n) {
    const double wt = grid.node_weight(n);
    if (wt == 0.0) continue;
    double slice = 0.0;
    for (int i = 0; i <= grid.n_x(); ++i) {
      const double dp = state.plus(n, i) - reference.plus[i];
      const double dm = state.minus(n, i) - reference.minus[i];
      slice += grid.space_weight(i) * (dp * dp + dm * dm);
    }
    s += wt * slice;
  }
  return s;
}

DecoupledOracle decoupled_oracle(const SystemSpec& sys, double lambda,
                                 const Eigen::Vector2d& R_b, double T) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw LambdaOutOfRange("tracking weight must lie in (0, 1)");
  const Eigen::Matrix2d M = sys.coupling(0.0);
  if (std::abs(M(0, 1)) > 0.0 || std::abs(M(1, 0)) > 0.0)
    throw NotDiagonal("closed form requires diagonal coupling");
  const double dp = sys.d_plus(0.0);
  const double dm = std::abs(sys.d_minus(0.0));
  DecoupledOracle o;
  o.gain[0] = std::exp(sys.eta0 * M(0, 0) * sys.length / dp);
  o.gain[1] = std::exp(sys.eta0 * M(1, 1) * sys.length / dm);
  for (int k = 0; k < 2; ++k) {
    const double a = o.gain[k];
    o.u_static[k] =
        (1.0 - lambda) * a * R_b[k] / (lambda + (1.0 - lambda) * a * a);
  }
  o.t_switch_plus = T - sys.length / dp;
  o.t_switch_minus = T - sys.length / dm;
  o.metric_times_T = (sys.length / dp) * o.u_static[0] * o.u_static[0] +
                     (sys.length / dm) * o.u_static[1] * o.u_static[1];
  return o;
}

std::optional<double> fit_log_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

TurnpikeReport sweep_and_fit(const SweepProblem& problem,
                             const std::vector<double>& horizons) {
  if (horizons.empty()) throw EmptyGrid("empty horizon list");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (!(horizons[i] > horizons[i - 1]))
      throw ValidationError("horizons must be strictly increasing");

  TurnpikeReport report;
  report.horizons = horizons;
  const double dx = problem.sys.length / problem.n_x;
  double max_speed = 0.0;
  for (int i = 0; i <= problem.n_x; ++i) {
    const double x = problem.sys.length * i / problem.n_x;
    max_speed = std::max({max_speed, std::abs(problem.sys.d_plus(x)),
                          std::abs(problem.sys.d_minus(x))});
  }
  const double dt0 = problem.cfl * dx / max_speed;

  double kappa_min = 0.0;
  for (double T : horizons) {
    const int n_t = std::max(1, static_cast<int>(std::ceil(T / dt0 - 1e-9)));
    const SpaceTimeGrid grid(problem.sys, problem.n_x, n_t, T, problem.rule);
    const StaticSolution st = solve_static(problem.cost, problem.sys, grid);
    const DynamicSolution dyn =
        solve_dynamic(problem.cost, problem.sys, grid, problem.cg);
    report.control_metrics.push_back(
        control_metric(grid, dyn.control, st.control));
    report.state_metrics.push_back(state_metric(grid, dyn.state, st.profile));
    BoundaryControl constant(grid.n_t());
    for (int n = 0; n < grid.n_t(); ++n) {
      constant.plus[n] = st.control[0];
      constant.minus[n] = st.control[1];
    }
    const BoundaryControl g =
        grad_dynamic(problem.cost, problem.sys, grid, constant);
    report.grad_norms.push_back(norm_H(grid, g));
    if (problem.estimate_kappa) {
      const double k = estimate_coercivity(problem.cost, problem.sys, grid);
      report.kappas.push_back(k);
      kappa_min = report.kappas.size() == 1 ? k : std::min(kappa_min, k);
    }
  }
  report.kappa = kappa_min;
  report.fitted_exponent = fit_log_slope(horizons, report.control_metrics);
  return report;
}

EnergySeries lyapunov_energy(const SpaceTimeGrid& grid,
                             const StateTrajectory& state,
                             const ExpWeight& weight, EnergyKind kind,
                             const StaticProfile* reference) {
  if (state.n_t() != grid.n_t() || state.n_x() != grid.n_x())
    throw ShapeMismatch("trajectory does not match the grid");
  const bool needs_decay = kind != EnergyKind::adjoint_deviation;
  if (needs_decay &&
      (weight.regime != WeightRegime::decay || !(weight.mu_plus > 0.0)))
    throw RegimeMismatch("this energy requires decay weights (mu > 0)");
  if (!needs_decay &&
      (weight.regime != WeightRegime::growth || !(weight.mu_plus < 0.0)))
    throw RegimeMismatch("adjoint energies require growth weights (mu < 0)");

  // Spatial energies at every time node.
  const int n_t = grid.n_t();
  const int n_x = grid.n_x();
  std::vector<double> ex_plus(n_x + 1), ex_minus(n_x + 1);
  for (int i = 0; i <= n_x; ++i) {
    const Eigen::Matrix2d E =
        exp_weight_matrix(weight, grid.x(i), grid.length());
    ex_plus[i] = E(0, 0);
    ex_minus[i] = E(1, 1);
  }
  std::vector<double> inst(n_t + 1, 0.0);
  for (int n = 0; n <= n_t; ++n) {
    double e = 0.0;
    for (int i = 0; i <= n_x; ++i) {
      const double dp =
          state.plus(n, i) - (reference ? reference->plus[i] : 0.0);
      const double dm =
          state.minus(n, i) - (reference ? reference->minus[i] : 0.0);
      e += grid.space_weight(i) *
           (ex_plus[i] * dp * dp + ex_minus[i] * dm * dm);
    }
    inst[n] = 0.5 * e;
  }

  EnergySeries series;
  if (kind == EnergyKind::sliding_window) {
    const double window = std::min(1.0, grid.T());
    const int steps = std::max(1, static_cast<int>(std::round(window / grid.dt())));
    for (int n = 0; n + steps <= n_t; ++n) {
      double acc = 0.0;
      for (int k = n; k <= n + steps; ++k) {
        const double w =
            (k == n || k == n + steps) ? 0.5 * grid.dt() : grid.dt();
        acc += w * inst[k];
      }
      series.times.push_back(grid.t(n));
      series.values.push_back(acc);
    }
  } else {
    series.times.resize(n_t + 1);
    series.values = inst;
    for (int n = 0; n <= n_t; ++n) series.times[n] = grid.t(n);
  }

  // Log-linear rate over the middle 60% of the decaying tail.
  const std::size_t count = series.values.size();
  if (count >= 5) {
    const std::size_t lo = count / 5;
    const std::size_t hi = count - count / 5;
    std::vector<double> ts, vs;
    for (std::size_t k = lo; k < hi; ++k) {
      if (series.values[k] > 0.0) {
        ts.push_back(series.times[k]);
        vs.push_back(series.values[k]);
      }
    }
    if (ts.size() >= 2) {
      double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        sx += ts[k];
        sy += std::log(vs[k]);
        sxx += ts[k] * ts[k];
        sxy += ts[k] * std::log(vs[k]);
      }
      const double n = static_cast<double>(ts.size());
      const double denom = n * sxx - sx * sx;
      if (std::abs(denom) > 0.0)
        series.fitted_rate = (n * sxy - sx * sy) / denom;
    }
  }
  return series;
}

DecayVerdict decay_check(const EnergySeries& series, const Certificate& cert,
                         double t0, double tol) {
  DecayVerdict verdict;
  verdict.applicable = cert.valid && !series.values.empty();
  if (!verdict.applicable) return verdict;
  double e0 = 0.0;
  bool found = false;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    if (!found && series.times[k] >= t0 - 1e-12) {
      e0 = series.values[k];
      t0 = series.times[k];
      found = true;
    }
  }
  if (!found || !(e0 > 0.0)) {
    verdict.pass = found;  // identically zero energy decays trivially
    return verdict;
  }
  double worst = -1.0;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    if (series.times[k] < t0) continue;
    const double envelope =
        e0 * std::exp(cert.bound * (series.times[k] - t0)) * (1.0 + tol);
    if (envelope > 0.0)
      worst = std::max(worst, series.values[k] / envelope - 1.0);
  }
  verdict.worst_margin = worst;
  verdict.pass = worst <= 0.0;
  return verdict;
}

}  // namespace turnpike
