#include "turnpike/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace turnpike {

namespace {

// Central difference with the stencil clamped into [0, L].
std::function<double(double)> fd_derivative(std::function<double(double)> f,
                                            double length) {
  const double h = length / 1e4;
  return [f = std::move(f), length, h](double x) {
    const double a = std::max(0.0, x - h);
    const double b = std::min(length, x + h);
    return (f(b) - f(a)) / (b - a);
  };
}

}  // namespace

SystemSpec build_system(const SystemConfig& config) {
  if (!(config.length > 0.0))
    throw PositivityViolation("system length must be positive");
  if (config.eta0 > 0.0)
    throw PositivityViolation("eta0 must be nonpositive");
  if (!config.d_plus || !config.d_minus)
    throw PositivityViolation("both speed callbacks are required");

  SystemSpec sys;
  sys.length = config.length;
  sys.eta0 = config.eta0;
  sys.d_plus = config.d_plus;
  sys.d_minus = config.d_minus;
  sys.d_plus_prime = config.d_plus_prime
                         ? config.d_plus_prime
                         : fd_derivative(config.d_plus, config.length);
  sys.d_minus_prime = config.d_minus_prime
                          ? config.d_minus_prime
                          : fd_derivative(config.d_minus, config.length);
  sys.coupling = config.coupling
                     ? config.coupling
                     : [](double) { return Eigen::Matrix2d::Zero().eval(); };

  const int samples = std::max(2, config.validation_samples);
  for (int i = 0; i < samples; ++i) {
    const double x = config.length * i / (samples - 1);
    if (!(sys.d_plus(x) > 0.0) || !(sys.d_minus(x) < 0.0))
      throw SignViolation("speeds must satisfy d- < 0 < d+ on [0, L]");
  }
  return sys;
}

SystemSpec make_constant_system(double d_plus, double d_minus,
                                const Eigen::Matrix2d& coupling, double eta0,
                                double length) {
  SystemConfig config;
  config.length = length;
  config.eta0 = eta0;
  config.d_plus = [d_plus](double) { return d_plus; };
  config.d_minus = [d_minus](double) { return d_minus; };
  config.d_plus_prime = [](double) { return 0.0; };
  config.d_minus_prime = [](double) { return 0.0; };
  config.coupling = [coupling](double) { return coupling; };
  config.validation_samples = 2;
  return build_system(config);
}

namespace {

template <class T>
T interp_column(const std::vector<double>& xs, const std::vector<T>& ys,
                double xq) {
  if (xs.empty()) throw EmptyGrid("empty coefficient table");
  if (xq <= xs.front()) return ys.front();
  if (xq >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), xq);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double w = (xq - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + w * (ys[j] - ys[j - 1]);
}

}  // namespace

double CoefficientTable::interp_d_plus(double xq) const {
  return interp_column(x, d_plus, xq);
}
double CoefficientTable::interp_d_minus(double xq) const {
  return interp_column(x, d_minus, xq);
}
Eigen::Matrix2d CoefficientTable::interp_coupling(double xq) const {
  return interp_column(x, coupling, xq);
}

SystemSpec build_system_from_table(CoefficientTable table, double eta0) {
  if (table.x.size() < 2) throw EmptyGrid("coefficient table needs >= 2 rows");
  if (!std::is_sorted(table.x.begin(), table.x.end()))
    throw ParseError("coefficient table x column must be increasing");
  auto shared = std::make_shared<CoefficientTable>(std::move(table));
  SystemConfig config;
  config.length = shared->x.back();
  config.eta0 = eta0;
  config.d_plus = [shared](double x) { return shared->interp_d_plus(x); };
  config.d_minus = [shared](double x) { return shared->interp_d_minus(x); };
  config.coupling = [shared](double x) { return shared->interp_coupling(x); };
  return build_system(config);
}

Eigen::Matrix2d exp_weight_matrix(const ExpWeight& weight, double x,
                                  double length) {
  if (x < -1e-12 || x > length * (1.0 + 1e-12))
    throw OutOfDomain("weight evaluation outside [0, L]");
  Eigen::Matrix2d E = Eigen::Matrix2d::Zero();
  E(0, 0) = std::exp(-weight.mu_plus * x);
  E(1, 1) = std::exp(weight.mu_minus * x);
  return E;
}

std::pair<double, double> gen_eig_pair_2x2(const Eigen::Matrix2d& S,
                                           const Eigen::Matrix2d& E) {
  if (!(E(0, 0) > 0.0) || !(E(1, 1) > 0.0))
    throw NonSPD("metric matrix must have positive diagonal");
  // Congruence by E^{-1/2} reduces the pencil to an ordinary symmetric
  // eigenproblem with roots mean +/- hypot(split, off).  Unlike the
  // det(S - lambda E) quadratic this has no discriminant cancellation, so a
  // repeated root comes out exact instead of split by ~sqrt(machine eps).
  const double b00 = S(0, 0) / E(0, 0);
  const double b11 = S(1, 1) / E(1, 1);
  const double off = 0.5 * (S(0, 1) + S(1, 0)) / std::sqrt(E(0, 0) * E(1, 1));
  const double mean = 0.5 * (b00 + b11);
  const double radius = std::hypot(0.5 * (b00 - b11), off);
  return {mean - radius, mean + radius};
}

namespace {

Certificate scan_certificate(const SystemSpec& sys, const ExpWeight& weight,
                             int n_samples, bool decay) {
  if (n_samples < 2) throw EmptyGrid("certificate scan needs >= 2 samples");
  const double abs_eta = std::abs(sys.eta0);
  Certificate cert;
  cert.weight = weight;
  cert.samples = n_samples;
  double extremum = decay ? -std::numeric_limits<double>::infinity()
                          : std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double x = sys.length * k / (n_samples - 1);
    const Eigen::Matrix2d E = exp_weight_matrix(weight, x, sys.length);
    Eigen::Matrix2d Ep = Eigen::Matrix2d::Zero();
    Ep(0, 0) = -weight.mu_plus * E(0, 0);
    Ep(1, 1) = weight.mu_minus * E(1, 1);
    Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
    D(0, 0) = sys.d_plus(x);
    D(1, 1) = sys.d_minus(x);
    Eigen::Matrix2d Dp = Eigen::Matrix2d::Zero();
    Dp(0, 0) = sys.d_plus_prime(x);
    Dp(1, 1) = sys.d_minus_prime(x);
    const Eigen::Matrix2d M = sys.coupling(x);
    const Eigen::Matrix2d C = E * M + M.transpose() * E;
    Eigen::Matrix2d S;
    if (decay) {
      S = Ep * D + E * Dp - abs_eta * C;  // d/dx(E D) - |eta0|(EM + M^T E)
    } else {
      S = Ep * D - E * Dp + abs_eta * C;
    }
    const auto [lo, hi] = gen_eig_pair_2x2(S, E);
    const double lambda = decay ? hi : lo;
    if (decay ? (lambda > extremum) : (lambda < extremum)) {
      extremum = lambda;
      arg = x;
    }
  }
  cert.bound = extremum;
  cert.argmax_x = arg;
  cert.valid = decay ? (extremum < 0.0) : (extremum > 0.0);
  return cert;
}

}  // namespace

Certificate certify_decay(const SystemSpec& sys, const ExpWeight& weight,
                          int n_samples) {
  if (weight.regime != WeightRegime::decay)
    throw RegimeMismatch("certify_decay requires a decay-regime weight");
  if (!(weight.mu_plus > 0.0) || !(weight.mu_minus > 0.0))
    throw RegimeMismatch("decay certificates need mu_plus, mu_minus > 0");
  return scan_certificate(sys, weight, n_samples, /*decay=*/true);
}

Certificate certify_growth(const SystemSpec& sys, const ExpWeight& weight,
                           int n_samples) {
  if (weight.regime != WeightRegime::growth)
    throw RegimeMismatch("certify_growth requires a growth-regime weight");
  if (!(weight.mu_plus < 0.0) || !(weight.mu_minus < 0.0))
    throw RegimeMismatch("growth certificates need mu_plus, mu_minus < 0");
  return scan_certificate(sys, weight, n_samples, /*decay=*/false);
}

Certificate search_weight(const SystemSpec& sys, WeightRegime regime,
                          const std::vector<double>& mu_grid, int n_samples) {
  if (mu_grid.empty()) throw EmptyGrid("empty mu grid");
  const bool decay = regime == WeightRegime::decay;
  for (double mu : mu_grid) {
    if (decay ? !(mu > 0.0) : !(mu < 0.0))
      throw RegimeMismatch("mu grid entries must match the requested regime");
  }
  bool have = false;
  Certificate best;
  for (double mu : mu_grid) {
    const ExpWeight w{mu, mu, regime};
    const Certificate cert = decay ? certify_decay(sys, w, n_samples)
                                   : certify_growth(sys, w, n_samples);
    // Strictest valid bound, or the least-violating one overall; for decay
    // both preferences reduce to the smallest bound (largest for growth).
    const bool better =
        !have ||
        (cert.valid && !best.valid) ||
        (cert.valid == best.valid &&
         (decay ? cert.bound < best.bound : cert.bound > best.bound));
    if (better) {
      best = cert;
      have = true;
    }
  }
  return best;
}

}  // namespace turnpike
