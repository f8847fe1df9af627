#pragma once

#include <vector>

#include "turnpike/grid.hpp"

namespace turnpike {

// Dirichlet boundary data, one value per time step: plus[n] is injected at
// x = 0 and minus[n] at x = L, both held on [t_n, t_{n+1}).
struct BoundaryControl {
  std::vector<double> plus, minus;

  BoundaryControl() = default;
  explicit BoundaryControl(int n_t) : plus(n_t, 0.0), minus(n_t, 0.0) {}
  int size() const { return static_cast<int>(plus.size()); }
};

// Outflow traces: plus[n] = r_plus(t_{n+1}, L), minus[n] = r_minus(t_{n+1}, 0).
struct TraceSignal {
  std::vector<double> plus, minus;

  TraceSignal() = default;
  explicit TraceSignal(int n_t) : plus(n_t, 0.0), minus(n_t, 0.0) {}
  int size() const { return static_cast<int>(plus.size()); }
};

// Full space-time state, (n_t + 1) x (n_x + 1) nodes per channel.
class StateTrajectory {
 public:
  StateTrajectory() = default;
  StateTrajectory(int n_t, int n_x)
      : n_t_(n_t), n_x_(n_x),
        plus_((n_t + 1) * (n_x + 1), 0.0),
        minus_((n_t + 1) * (n_x + 1), 0.0) {}

  int n_t() const { return n_t_; }
  int n_x() const { return n_x_; }

  double& plus(int n, int i) { return plus_[idx(n, i)]; }
  double plus(int n, int i) const { return plus_[idx(n, i)]; }
  double& minus(int n, int i) { return minus_[idx(n, i)]; }
  double minus(int n, int i) const { return minus_[idx(n, i)]; }

 private:
  int idx(int n, int i) const { return n * (n_x_ + 1) + i; }
  int n_t_ = 0, n_x_ = 0;
  std::vector<double> plus_, minus_;
};

// Steady spatial profile on the n_x + 1 nodes.
struct StaticProfile {
  std::vector<double> plus, minus;

  StaticProfile() = default;
  explicit StaticProfile(int n_x) : plus(n_x + 1, 0.0), minus(n_x + 1, 0.0) {}
  int nodes() const { return static_cast<int>(plus.size()); }
};

}  // namespace turnpike
