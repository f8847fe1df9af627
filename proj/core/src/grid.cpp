#include "turnpike/grid.hpp"

#include <algorithm>
#include <cmath>

namespace turnpike {

namespace {

// Tolerance for CFL = 1 grids assembled from non-representable ratios.
constexpr double kCflSlack = 1e-9;

double max_speed(const SystemSpec& sys, int n_x) {
  double s = 0.0;
  for (int i = 0; i <= n_x; ++i) {
    const double x = sys.length * i / n_x;
    s = std::max(s, std::max(std::abs(sys.d_plus(x)), std::abs(sys.d_minus(x))));
  }
  return s;
}

double max_coupling_entry(const SystemSpec& sys, int n_x) {
  double m = 0.0;
  for (int i = 0; i <= n_x; ++i) {
    const double x = sys.length * i / n_x;
    m = std::max(m, sys.coupling(x).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace

double cfl_of(const SystemSpec& sys, int n_x, int n_t, double T) {
  if (n_x < 1 || n_t < 1) throw EmptyGrid("grid needs n_x >= 1 and n_t >= 1");
  if (!(T > 0.0)) throw PositivityViolation("horizon must be positive");
  const double dx = sys.length / n_x;
  const double dt = T / n_t;
  return max_speed(sys, n_x) * dt / dx;
}

double cfl_of(const SystemSpec& sys, const SpaceTimeGrid& grid) {
  return cfl_of(sys, grid.n_x(), grid.n_t(), grid.T());
}

SpaceTimeGrid::SpaceTimeGrid(const SystemSpec& sys, int n_x, int n_t, double T,
                             QuadRule rule)
    : n_x_(n_x), n_t_(n_t), T_(T), length_(sys.length), rule_(rule) {
  const double cfl = cfl_of(sys, n_x, n_t, T);
  if (cfl > 1.0 + kCflSlack)
    throw CflViolation("CFL " + std::to_string(cfl) + " exceeds 1");
  dx_ = length_ / n_x_;
  dt_ = T_ / n_t_;
  const double source = dt_ * std::abs(sys.eta0) * max_coupling_entry(sys, n_x);
  if (source > 0.5 + kCflSlack)
    throw CflViolation("explicit source restriction dt |eta0| max|M| <= 1/2 "
                       "violated (" + std::to_string(source) + ")");
}

double SpaceTimeGrid::signal_weight(int n) const {
  if (n < 0 || n >= n_t_) throw OutOfDomain("signal index out of range");
  if (rule_ == QuadRule::rectangle) return dt_;
  // Trapezoid over the nodes t_1..t_{n_t} the signals live on.
  return n == n_t_ - 1 ? 0.5 * dt_ : dt_;
}

double SpaceTimeGrid::node_weight(int n) const {
  if (n < 0 || n > n_t_) throw OutOfDomain("node index out of range");
  if (rule_ == QuadRule::rectangle) return n < n_t_ ? dt_ : 0.0;
  return (n == 0 || n == n_t_) ? 0.5 * dt_ : dt_;
}

double SpaceTimeGrid::space_weight(int i) const {
  if (i < 0 || i > n_x_) throw OutOfDomain("space index out of range");
  return (i == 0 || i == n_x_) ? 0.5 * dx_ : dx_;
}

SampledCoefficients SampledCoefficients::build(const SystemSpec& sys,
                                               const SpaceTimeGrid& grid) {
  const int n = grid.n_x() + 1;
  SampledCoefficients s;
  s.d_plus.resize(n);
  s.d_minus.resize(n);
  s.d_plus_prime.resize(n);
  s.d_minus_prime.resize(n);
  s.coupling.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    s.d_plus[i] = sys.d_plus(x);
    s.d_minus[i] = sys.d_minus(x);
    s.d_plus_prime[i] = sys.d_plus_prime(x);
    s.d_minus_prime[i] = sys.d_minus_prime(x);
    s.coupling[i] = sys.coupling(x);
  }
  return s;
}

}  // namespace turnpike
