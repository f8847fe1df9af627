#include <doctest.h>

#include <cmath>
#include <random>

#include "turnpike/operators.hpp"

using namespace turnpike;

namespace {

SystemSpec coupled_constant() {
  Eigen::Matrix2d M;
  M << 0.3, 1.0, 0.7, -0.2;
  return make_constant_system(1.1, -0.9, M, -0.5, 1.0);
}

SystemSpec coupled_variable() {
  SystemConfig cfg;
  cfg.eta0 = -0.5;
  cfg.d_plus = [](double x) { return 1.0 + 0.25 * std::sin(3.14159265 * x); };
  cfg.d_minus = [](double x) { return -1.0 - 0.25 * std::cos(3.14159265 * x); };
  cfg.coupling = [](double x) {
    Eigen::Matrix2d M;
    M << 0.4 + 0.2 * x, 1.0, 0.8, 0.3 - 0.1 * x;
    return M;
  };
  return build_system(cfg);
}

BoundaryControl random_control(std::mt19937_64& rng, int n_t) {
  std::normal_distribution<double> gauss;
  BoundaryControl u(n_t);
  for (int n = 0; n < n_t; ++n) {
    u.plus[n] = gauss(rng);
    u.minus[n] = gauss(rng);
  }
  return u;
}

TraceSignal random_signal(std::mt19937_64& rng, int n_t) {
  std::normal_distribution<double> gauss;
  TraceSignal z(n_t);
  for (int n = 0; n < n_t; ++n) {
    z.plus[n] = gauss(rng);
    z.minus[n] = gauss(rng);
  }
  return z;
}

// Max deviation between the reverse-sweep transpose and the discretized
// backward-PDE path over a batch of random signals.
double transpose_vs_continuous(const SystemSpec& sys, int n_x, double cfl) {
  const double max_speed = 1.25;
  const double dx = sys.length / n_x;
  const int n_t = static_cast<int>(std::ceil(1.0 / (cfl * dx / max_speed)));
  const SpaceTimeGrid grid(sys, n_x, n_t, 1.0);
  std::mt19937_64 rng(7);
  double dev = 0.0;
  for (int k = 0; k < 3; ++k) {
    const TraceSignal z = random_signal(rng, n_t);
    const BoundaryControl a = boundary_to_trace_adjoint(sys, grid, z);
    const BoundaryControl b = continuous_adjoint_trace(sys, grid, z);
    for (int n = 0; n < n_t; ++n)
      dev = std::max({dev, std::abs(a.plus[n] - b.plus[n]),
                      std::abs(a.minus[n] - b.minus[n])});
  }
  return dev;
}

}  // namespace

TEST_SUITE_BEGIN("operators");

TEST_CASE("inner product applies the signal quadrature weights") {
  const SystemSpec sys = coupled_constant();
  const SpaceTimeGrid rect(sys, 4, 4, 0.5, QuadRule::rectangle);
  const SpaceTimeGrid trap(sys, 4, 4, 0.5, QuadRule::trapezoid);
  BoundaryControl a(4), b(4);
  a.plus = {1.0, 2.0, 3.0, 4.0};
  b.plus = {1.0, 1.0, 1.0, 1.0};
  a.minus = {1.0, 0.0, 0.0, 0.0};
  b.minus = {2.0, 0.0, 0.0, 0.0};
  const double dt = 0.125;
  CHECK(inner_product_H(rect, a, b) ==
        doctest::Approx(dt * (10.0 + 2.0)).epsilon(1e-14));
  CHECK(inner_product_H(trap, a, b) ==
        doctest::Approx(dt * (1 + 2 + 3 + 2 + 2)).epsilon(1e-14));
  CHECK(norm_H(rect, a) ==
        doctest::Approx(std::sqrt(dt * 31.0)).epsilon(1e-14));
}

TEST_CASE("reverse-sweep transpose satisfies the inner-product identity") {
  std::mt19937_64 rng(42);
  struct Setup {
    SystemSpec sys;
    int n_x, n_t;
  };
  const Setup setups[] = {
      {make_constant_system(1.0, -1.0, Eigen::Matrix2d::Zero(), 0.0, 1.0), 16,
       16},                       // pure transport at unit Courant number
      {coupled_constant(), 24, 40},  // coupled, CFL < 1
      {coupled_variable(), 24, 48},  // variable coefficients
  };
  for (const auto& s : setups) {
    for (QuadRule rule : {QuadRule::rectangle, QuadRule::trapezoid}) {
      const SpaceTimeGrid grid(s.sys, s.n_x, s.n_t, 1.0, rule);
      for (int k = 0; k < 10; ++k) {
        const BoundaryControl u = random_control(rng, s.n_t);
        const TraceSignal z = random_signal(rng, s.n_t);
        const double lhs = inner_product_H(grid, boundary_to_trace(s.sys, grid, u),
                                           z);
        const BoundaryControl fz = boundary_to_trace_adjoint(s.sys, grid, z);
        const double rhs = inner_product_H(grid, u, fz);
        const double scale = norm_H(grid, u) * norm_H(grid, z);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (scale + 1.0));
      }
    }
  }
}

TEST_CASE("backward-PDE adjoint equals the transpose for pure transport") {
  const SystemSpec sys =
      make_constant_system(1.0, -1.0, Eigen::Matrix2d::Zero(), 0.0, 1.0);
  const SpaceTimeGrid grid(sys, 16, 32, 2.0);
  std::mt19937_64 rng(3);
  const TraceSignal z = random_signal(rng, 32);
  const BoundaryControl a = boundary_to_trace_adjoint(sys, grid, z);
  const BoundaryControl b = continuous_adjoint_trace(sys, grid, z);
  for (int n = 0; n < 32; ++n) {
    CHECK(std::abs(a.plus[n] - b.plus[n]) <= 1e-13);
    CHECK(std::abs(a.minus[n] - b.minus[n]) <= 1e-13);
  }
}

TEST_CASE("backward-PDE adjoint converges to the transpose at first order") {
  const SystemSpec sys = coupled_variable();
  const double d32 = transpose_vs_continuous(sys, 32, 0.8);
  const double d64 = transpose_vs_continuous(sys, 64, 0.8);
  const double d128 = transpose_vs_continuous(sys, 128, 0.8);
  CHECK(d32 > d64);
  CHECK(d64 > d128);
  CHECK(std::log2(d32 / d64) == doctest::Approx(1.0).epsilon(0.3));
  CHECK(std::log2(d64 / d128) == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("static maps expose an exact transpose and a consistent slow path") {
  const SystemSpec sys = coupled_variable();
  auto deviation_at = [&](int n_x) {
    const SpaceTimeGrid grid(sys, n_x, 2 * n_x, 1.0);
    const StaticMaps maps = assemble_static_maps(sys, grid);
    CHECK((maps.adjoint - maps.forward.transpose()).norm() == 0.0);
    return maps.transpose_deviation;
  };
  const double d32 = deviation_at(32);
  const double d64 = deviation_at(64);
  const double d128 = deviation_at(128);
  CHECK(d32 > d64);
  CHECK(std::log2(d32 / d64) == doctest::Approx(1.0).epsilon(0.35));
  CHECK(std::log2(d64 / d128) == doctest::Approx(1.0).epsilon(0.35));
}

TEST_CASE("operator norm of the unit-Courant delay shift is one") {
  const SystemSpec sys =
      make_constant_system(1.0, -1.0, Eigen::Matrix2d::Zero(), 0.0, 1.0);
  const SpaceTimeGrid grid(sys, 16, 32, 2.0, QuadRule::rectangle);
  const double norm = operator_norm_estimate(sys, grid, 60, 42);
  CHECK(norm <= 1.0 + 1e-9);
  CHECK(norm >= 0.9);
}

TEST_SUITE_END();
