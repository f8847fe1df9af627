#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "turnpike/pipeline.hpp"

namespace turnpike {

enum class Command {
  certify,
  simulate,
  solve_static,
  solve_dynamic,
  solve_integer,
  sweep,
  pipeline,
};

std::string command_name(Command c);          // e.g. "solve-static"
Command command_from_name(const std::string& name);  // throws ParseError

struct SystemSection {
  double length = 1.0;
  double eta0 = 0.0;
  double d_plus = 1.0;
  double d_minus = -1.0;
  std::array<double, 4> m = {0.0, 0.0, 0.0, 0.0};  // row-major M
  std::string table;  // optional CSV path: x,d_plus,d_minus,m11,m12,m21,m22

  bool operator==(const SystemSection&) const = default;
};

struct GridSection {
  int n_x = 64;
  int n_t = 256;
  double T = 1.0;
  QuadRule rule = QuadRule::rectangle;

  bool operator==(const GridSection&) const = default;
};

struct CostSection {
  bool tracking = true;
  double lambda = 0.5;
  std::array<double, 2> R_b = {0.0, 0.0};
  // General form, used when tracking = false.
  std::array<double, 4> A0 = {1.0, 0.0, 0.0, 1.0};
  std::array<double, 4> AL = {1.0, 0.0, 0.0, 1.0};
  std::array<double, 2> c0 = {0.0, 0.0};
  std::array<double, 2> cL = {0.0, 0.0};
  double constant_rate = 0.0;

  bool operator==(const CostSection&) const = default;
};

struct CertifySection {
  std::string regime = "both";  // decay | growth | both
  std::vector<double> mu_grid = {0.25, 0.5, 1.0, 2.0};
  int n_samples = 1024;

  bool operator==(const CertifySection&) const = default;
};

struct SimulateSection {
  double u_plus = 0.0;
  double u_minus = 0.0;

  bool operator==(const SimulateSection&) const = default;
};

struct IntegerSection {
  std::vector<double> feasible = {0.0, 1.0};
  double nu = 1.0;

  bool operator==(const IntegerSection&) const = default;
};

struct SweepSection {
  std::vector<double> horizons = {5.0, 10.0, 20.0, 40.0};
  double cfl = 1.0;

  bool operator==(const SweepSection&) const = default;
};

struct PipelineSection {
  PipelineParams params;
  int n_x = 40;
  int n_t = 816;
  QuadRule rule = QuadRule::trapezoid;

  bool operator==(const PipelineSection&) const = default;
};

struct RunSection {
  std::string output_dir = "out";
  std::uint64_t seed = 42;
  bool emit_svg = false;
  double tol = 1e-10;

  bool operator==(const RunSection&) const = default;
};

struct RunConfig {
  Command command = Command::simulate;
  SystemSection system;
  GridSection grid;
  CostSection cost;
  CertifySection certify;
  SimulateSection simulate;
  IntegerSection integer;
  SweepSection sweep;
  PipelineSection pipeline;
  RunSection run;

  bool operator==(const RunConfig&) const = default;
};

// Parses the key = value format with [section] headers and # comments.
// Unknown keys and malformed lines raise ParseError; a missing command key
// raises ParseError as well.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Canonical serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

// Collects every violated invariant (lambda range, grid sizes, horizon
// ordering, feasible-set membership of 0, ...) into one ValidationError.
void validate_config(const RunConfig& config);

// Materialized model pieces from the config sections.
SystemSpec system_from_config(const RunConfig& config);
QuadraticCost cost_from_config(const RunConfig& config);
SpaceTimeGrid grid_from_config(const RunConfig& config, const SystemSpec& sys);

// Reads a coefficient table CSV (columns x,d_plus,d_minus,m11,m12,m21,m22).
CoefficientTable load_coefficient_table(const std::string& path);

}  // namespace turnpike
