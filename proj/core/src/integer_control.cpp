#include "turnpike/integer_control.hpp"

#include <algorithm>
#include <cmath>

namespace turnpike {

namespace {

void check_spec(const IntegerSpec& spec) {
  if (spec.feasible.empty())
    throw EmptyGrid("feasible set must be nonempty");
  const bool has_zero = std::any_of(
      spec.feasible.begin(), spec.feasible.end(),
      [](double a) { return a == 0.0; });
  if (!has_zero) throw ValidationError("feasible set must contain 0");
  if (!(spec.lambda > 0.0) || !(spec.lambda < 1.0))
    throw LambdaOutOfRange("tracking weight must lie in (0, 1)");
  if (!(spec.nu >= 0.0))
    throw PositivityViolation("switching weight nu must be nonnegative");
}

// Tie-break: smaller value, then smaller |alpha|, then smaller alpha.
bool better_candidate(double value, double alpha, double best_value,
                      double best_alpha, double scale) {
  const double tol = 1e-9 * std::max(1.0, scale);
  if (value < best_value - tol) return true;
  if (value > best_value + tol) return false;
  if (std::abs(alpha) < std::abs(best_alpha)) return true;
  if (std::abs(alpha) > std::abs(best_alpha)) return false;
  return alpha < best_alpha;
}

}  // namespace

double total_variation(const std::vector<double>& u) {
  double tv = 0.0;
  for (std::size_t n = 1; n < u.size(); ++n) tv += std::abs(u[n] - u[n - 1]);
  return tv;
}

ThresholdReport switching_threshold_check(const IntegerSpec& spec) {
  check_spec(spec);
  ThresholdReport rep;
  rep.nu = spec.nu;
  rep.bound = (1.0 - spec.lambda) * spec.R_b.squaredNorm();
  rep.satisfied = spec.nu > rep.bound;
  return rep;
}

IntegerStaticSolution solve_integer_static(const IntegerSpec& spec,
                                           const SystemSpec& sys,
                                           const SpaceTimeGrid& grid) {
  check_spec(spec);
  const StaticMaps maps = assemble_static_maps(sys, grid);
  const Eigen::Matrix2d F = maps.forward;
  const double lam = spec.lambda;
  const double mu = 1.0 - lam;

  IntegerStaticSolution sol;
  bool have = false;
  for (double alpha : spec.feasible) {
    // One-variable quadratic in the free minus control v:
    //   lam (alpha^2 + v^2) + mu |F (alpha, v)^T - R_b|^2.
    const double A = lam + mu * (F(0, 1) * F(0, 1) + F(1, 1) * F(1, 1));
    const double g = mu * (F(0, 1) * (F(0, 0) * alpha - spec.R_b[0]) +
                           F(1, 1) * (F(1, 0) * alpha - spec.R_b[1]));
    const double v = -g / A;
    const Eigen::Vector2d trace = F * Eigen::Vector2d(alpha, v);
    const double value = lam * (alpha * alpha + v * v) +
                         mu * (trace - spec.R_b).squaredNorm();
    sol.table.push_back({alpha, value, v, std::abs(v)});
    if (!have || better_candidate(value, alpha, sol.value, sol.alpha,
                                  std::abs(sol.value))) {
      sol.alpha = alpha;
      sol.u_minus = v;
      sol.value = value;
      have = true;
    }
  }
  std::sort(sol.table.begin(), sol.table.end(),
            [](const PerAlpha& a, const PerAlpha& b) { return a.alpha < b.alpha; });
  return sol;
}

IntegerSolution solve_integer_dynamic(const IntegerSpec& spec,
                                      const SystemSpec& sys,
                                      const SpaceTimeGrid& grid,
                                      const CgOptions& opts) {
  const ThresholdReport threshold = switching_threshold_check(spec);
  if (!threshold.satisfied)
    throw ThresholdNotMet(
        "nu <= (1 - lambda)|R_b|^2: constant-level enumeration does not "
        "apply");
  const QuadraticCost cost = cost_from_tracking(spec.lambda, spec.R_b);

  IntegerSolution sol;
  bool have = false;
  for (double alpha : spec.feasible) {
    const std::vector<double> frozen(grid.n_t(), alpha);
    DynamicSolution candidate = solve_one_sided(cost, sys, grid, frozen, opts);
    const double value =
        eval_J_total(cost, grid, candidate.control, candidate.trace);
    PerAlpha row;
    row.alpha = alpha;
    row.value = value;
    row.u_minus_norm = 0.0;
    {
      BoundaryControl only_minus(grid.n_t());
      only_minus.minus = candidate.control.minus;
      row.u_minus_norm = norm_H(grid, only_minus);
    }
    sol.table.push_back(row);
    if (!have || better_candidate(value, alpha, sol.omega, sol.alpha,
                                  std::abs(sol.omega))) {
      sol.alpha = alpha;
      sol.omega = value;
      sol.best = std::move(candidate);
      have = true;
    }
  }
  std::sort(sol.table.begin(), sol.table.end(),
            [](const PerAlpha& a, const PerAlpha& b) { return a.alpha < b.alpha; });
  sol.variation = total_variation(sol.best.control.plus);
  return sol;
}

double integer_turnpike_metric(const IntegerSolution& sol,
                               const IntegerStaticSolution& static_sol,
                               const SpaceTimeGrid& grid) {
  // Compare against the static minimizer at the same feasible level.
  const auto it = std::find_if(
      static_sol.table.begin(), static_sol.table.end(),
      [&](const PerAlpha& row) { return row.alpha == sol.alpha; });
  if (it == static_sol.table.end())
    throw ValidationError("dynamic level missing from the static table");
  const Eigen::Vector2d u_static(sol.alpha, it->u_minus);
  double s = 0.0;
  for (int n = 0; n < grid.n_t(); ++n) {
    const double dp = sol.best.control.plus[n] - u_static[0];
    const double dm = sol.best.control.minus[n] - u_static[1];
    s += grid.signal_weight(n) * (dp * dp + dm * dm);
  }
  return s / grid.T();
}

}  // namespace turnpike
