#include "turnpike/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "turnpike/outputs.hpp"

namespace turnpike {

std::string command_name(Command c) {
  switch (c) {
    case Command::certify: return "certify";
    case Command::simulate: return "simulate";
    case Command::solve_static: return "solve-static";
    case Command::solve_dynamic: return "solve-dynamic";
    case Command::solve_integer: return "solve-integer";
    case Command::sweep: return "sweep";
    case Command::pipeline: return "pipeline";
  }
  throw ValidationError("unknown command enumerator");
}

Command command_from_name(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"certify", Command::certify},
      {"simulate", Command::simulate},
      {"solve-static", Command::solve_static},
      {"solve-dynamic", Command::solve_dynamic},
      {"solve-integer", Command::solve_integer},
      {"sweep", Command::sweep},
      {"pipeline", Command::pipeline},
  };
  for (const auto& [key, cmd] : table)
    if (name == key) return cmd;
  throw ParseError("unknown command '" + name +
                   "' (expected certify, simulate, solve-static, "
                   "solve-dynamic, solve-integer, sweep or pipeline)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct ParseCursor {
  std::string origin;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
  }
};

double parse_double(const std::string& s, const ParseCursor& at) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    at.fail("expected a number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const ParseCursor& at) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    at.fail("expected an integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const ParseCursor& at) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  at.fail("expected a boolean, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s, const ParseCursor& at) {
  std::vector<double> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(parse_double(tok, at));
  if (out.empty()) at.fail("expected at least one number");
  return out;
}

template <std::size_t N>
std::array<double, N> parse_fixed(const std::string& s, const ParseCursor& at) {
  const std::vector<double> v = parse_list(s, at);
  if (v.size() != N)
    at.fail("expected " + std::to_string(N) + " numbers, got " +
            std::to_string(v.size()));
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

QuadRule parse_rule(const std::string& s, const ParseCursor& at) {
  if (s == "rectangle") return QuadRule::rectangle;
  if (s == "trapezoid") return QuadRule::trapezoid;
  at.fail("expected rectangle or trapezoid, got '" + s + "'");
}

const char* rule_name(QuadRule r) {
  return r == QuadRule::rectangle ? "rectangle" : "trapezoid";
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

template <std::size_t N>
std::string join(const std::array<double, N>& v) {
  return join(std::vector<double>(v.begin(), v.end()));
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  ParseCursor at{origin, 0};
  std::string section;
  bool have_command = false;

  std::istringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    ++at.line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"system",   "grid",  "cost",
                                    "certify",  "simulate", "integer",
                                    "sweep",    "pipeline", "run"};
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
            return section == k;
          }) == std::end(known))
        at.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) at.fail("empty key");
    if (value.empty()) at.fail("empty value for key '" + key + "'");

    if (section.empty()) {
      if (key == "command") {
        cfg.command = command_from_name(value);
        have_command = true;
      } else {
        at.fail("unknown top-level key '" + key + "'");
      }
    } else if (section == "system") {
      if (key == "length") cfg.system.length = parse_double(value, at);
      else if (key == "eta0") cfg.system.eta0 = parse_double(value, at);
      else if (key == "d_plus") cfg.system.d_plus = parse_double(value, at);
      else if (key == "d_minus") cfg.system.d_minus = parse_double(value, at);
      else if (key == "m") cfg.system.m = parse_fixed<4>(value, at);
      else if (key == "table") cfg.system.table = value;
      else at.fail("unknown key '" + key + "' in [system]");
    } else if (section == "grid") {
      if (key == "n_x") cfg.grid.n_x = static_cast<int>(parse_int(value, at));
      else if (key == "n_t") cfg.grid.n_t = static_cast<int>(parse_int(value, at));
      else if (key == "T") cfg.grid.T = parse_double(value, at);
      else if (key == "rule") cfg.grid.rule = parse_rule(value, at);
      else at.fail("unknown key '" + key + "' in [grid]");
    } else if (section == "cost") {
      if (key == "tracking") cfg.cost.tracking = parse_bool(value, at);
      else if (key == "lambda") cfg.cost.lambda = parse_double(value, at);
      else if (key == "R_b") cfg.cost.R_b = parse_fixed<2>(value, at);
      else if (key == "A0") cfg.cost.A0 = parse_fixed<4>(value, at);
      else if (key == "AL") cfg.cost.AL = parse_fixed<4>(value, at);
      else if (key == "c0") cfg.cost.c0 = parse_fixed<2>(value, at);
      else if (key == "cL") cfg.cost.cL = parse_fixed<2>(value, at);
      else if (key == "constant_rate") cfg.cost.constant_rate = parse_double(value, at);
      else at.fail("unknown key '" + key + "' in [cost]");
    } else if (section == "certify") {
      if (key == "regime") cfg.certify.regime = value;
      else if (key == "mu_grid") cfg.certify.mu_grid = parse_list(value, at);
      else if (key == "n_samples") cfg.certify.n_samples = static_cast<int>(parse_int(value, at));
      else at.fail("unknown key '" + key + "' in [certify]");
    } else if (section == "simulate") {
      if (key == "u_plus") cfg.simulate.u_plus = parse_double(value, at);
      else if (key == "u_minus") cfg.simulate.u_minus = parse_double(value, at);
      else at.fail("unknown key '" + key + "' in [simulate]");
    } else if (section == "integer") {
      if (key == "feasible") cfg.integer.feasible = parse_list(value, at);
      else if (key == "nu") cfg.integer.nu = parse_double(value, at);
      else at.fail("unknown key '" + key + "' in [integer]");
    } else if (section == "sweep") {
      if (key == "horizons") cfg.sweep.horizons = parse_list(value, at);
      else if (key == "cfl") cfg.sweep.cfl = parse_double(value, at);
      else at.fail("unknown key '" + key + "' in [sweep]");
    } else if (section == "pipeline") {
      PipelineParams& p = cfg.pipeline.params;
      if (key == "theta") p.theta = parse_double(value, at);
      else if (key == "g") p.g = parse_double(value, at);
      else if (key == "h_prime") p.h_prime = parse_double(value, at);
      else if (key == "c") p.c = parse_double(value, at);
      else if (key == "length") p.length = parse_double(value, at);
      else if (key == "T") p.T = parse_double(value, at);
      else if (key == "rho_exit_initial") p.rho_exit_initial = parse_double(value, at);
      else if (key == "q_exit_initial") p.q_exit_initial = parse_double(value, at);
      else if (key == "rho_exit_target") p.rho_exit_target = parse_double(value, at);
      else if (key == "q_exit_target") p.q_exit_target = parse_double(value, at);
      else if (key == "alpha") p.alpha = parse_double(value, at);
      else if (key == "beta") p.beta = parse_double(value, at);
      else if (key == "lambda") p.lambda = parse_double(value, at);
      else if (key == "literal_entry_cost") p.literal_entry_cost = parse_bool(value, at);
      else if (key == "n_x") cfg.pipeline.n_x = static_cast<int>(parse_int(value, at));
      else if (key == "n_t") cfg.pipeline.n_t = static_cast<int>(parse_int(value, at));
      else if (key == "rule") cfg.pipeline.rule = parse_rule(value, at);
      else at.fail("unknown key '" + key + "' in [pipeline]");
    } else if (section == "run") {
      if (key == "output_dir") cfg.run.output_dir = value;
      else if (key == "seed") cfg.run.seed = static_cast<std::uint64_t>(parse_int(value, at));
      else if (key == "emit_svg") cfg.run.emit_svg = parse_bool(value, at);
      else if (key == "tol") cfg.run.tol = parse_double(value, at);
      else at.fail("unknown key '" + key + "' in [run]");
    }
  }
  if (!have_command) {
    at.line = 0;
    at.fail("missing required top-level key 'command'");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "command = " << command_name(c.command) << "\n\n";

  out << "[system]\n";
  out << "length = " << format_double(c.system.length) << "\n";
  out << "eta0 = " << format_double(c.system.eta0) << "\n";
  out << "d_plus = " << format_double(c.system.d_plus) << "\n";
  out << "d_minus = " << format_double(c.system.d_minus) << "\n";
  out << "m = " << join(c.system.m) << "\n";
  if (!c.system.table.empty()) out << "table = " << c.system.table << "\n";

  out << "\n[grid]\n";
  out << "n_x = " << c.grid.n_x << "\n";
  out << "n_t = " << c.grid.n_t << "\n";
  out << "T = " << format_double(c.grid.T) << "\n";
  out << "rule = " << rule_name(c.grid.rule) << "\n";

  out << "\n[cost]\n";
  out << "tracking = " << (c.cost.tracking ? "true" : "false") << "\n";
  out << "lambda = " << format_double(c.cost.lambda) << "\n";
  out << "R_b = " << join(c.cost.R_b) << "\n";
  out << "A0 = " << join(c.cost.A0) << "\n";
  out << "AL = " << join(c.cost.AL) << "\n";
  out << "c0 = " << join(c.cost.c0) << "\n";
  out << "cL = " << join(c.cost.cL) << "\n";
  out << "constant_rate = " << format_double(c.cost.constant_rate) << "\n";

  out << "\n[certify]\n";
  out << "regime = " << c.certify.regime << "\n";
  out << "mu_grid = " << join(c.certify.mu_grid) << "\n";
  out << "n_samples = " << c.certify.n_samples << "\n";

  out << "\n[simulate]\n";
  out << "u_plus = " << format_double(c.simulate.u_plus) << "\n";
  out << "u_minus = " << format_double(c.simulate.u_minus) << "\n";

  out << "\n[integer]\n";
  out << "feasible = " << join(c.integer.feasible) << "\n";
  out << "nu = " << format_double(c.integer.nu) << "\n";

  out << "\n[sweep]\n";
  out << "horizons = " << join(c.sweep.horizons) << "\n";
  out << "cfl = " << format_double(c.sweep.cfl) << "\n";

  const PipelineParams& p = c.pipeline.params;
  out << "\n[pipeline]\n";
  out << "theta = " << format_double(p.theta) << "\n";
  out << "g = " << format_double(p.g) << "\n";
  out << "h_prime = " << format_double(p.h_prime) << "\n";
  out << "c = " << format_double(p.c) << "\n";
  out << "length = " << format_double(p.length) << "\n";
  out << "T = " << format_double(p.T) << "\n";
  out << "rho_exit_initial = " << format_double(p.rho_exit_initial) << "\n";
  out << "q_exit_initial = " << format_double(p.q_exit_initial) << "\n";
  out << "rho_exit_target = " << format_double(p.rho_exit_target) << "\n";
  out << "q_exit_target = " << format_double(p.q_exit_target) << "\n";
  out << "alpha = " << format_double(p.alpha) << "\n";
  out << "beta = " << format_double(p.beta) << "\n";
  out << "lambda = " << format_double(p.lambda) << "\n";
  out << "literal_entry_cost = " << (p.literal_entry_cost ? "true" : "false") << "\n";
  out << "n_x = " << c.pipeline.n_x << "\n";
  out << "n_t = " << c.pipeline.n_t << "\n";
  out << "rule = " << rule_name(c.pipeline.rule) << "\n";

  out << "\n[run]\n";
  out << "output_dir = " << c.run.output_dir << "\n";
  out << "seed = " << c.run.seed << "\n";
  out << "emit_svg = " << (c.run.emit_svg ? "true" : "false") << "\n";
  out << "tol = " << format_double(c.run.tol) << "\n";
  return out.str();
}

void validate_config(const RunConfig& c) {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };

  require(c.system.length > 0.0, "system.length must be positive");
  require(c.system.eta0 <= 0.0, "system.eta0 must be non-positive");
  if (c.system.table.empty()) {
    require(c.system.d_plus > 0.0, "system.d_plus must be positive");
    require(c.system.d_minus < 0.0, "system.d_minus must be negative");
  }
  require(c.grid.n_x >= 1, "grid.n_x must be at least 1");
  require(c.grid.n_t >= 1, "grid.n_t must be at least 1");
  require(c.grid.T > 0.0, "grid.T must be positive");
  if (c.cost.tracking)
    require(c.cost.lambda > 0.0 && c.cost.lambda < 1.0,
            "cost.lambda must lie in (0, 1) for tracking costs");
  require(c.certify.regime == "decay" || c.certify.regime == "growth" ||
              c.certify.regime == "both",
          "certify.regime must be decay, growth or both");
  require(!c.certify.mu_grid.empty(), "certify.mu_grid must be non-empty");
  for (double mu : c.certify.mu_grid)
    require(mu > 0.0, "certify.mu_grid entries must be positive");
  require(c.certify.n_samples >= 2, "certify.n_samples must be at least 2");
  require(!c.integer.feasible.empty(), "integer.feasible must be non-empty");
  bool has_zero = false;
  for (double a : c.integer.feasible)
    if (std::abs(a) <= 1e-12) has_zero = true;
  require(has_zero, "integer.feasible must contain 0");
  require(c.integer.nu >= 0.0, "integer.nu must be non-negative");
  require(!c.sweep.horizons.empty(), "sweep.horizons must be non-empty");
  for (std::size_t i = 0; i < c.sweep.horizons.size(); ++i) {
    require(c.sweep.horizons[i] > 0.0, "sweep.horizons must be positive");
    if (i) require(c.sweep.horizons[i] > c.sweep.horizons[i - 1],
                   "sweep.horizons must be strictly increasing");
  }
  require(c.sweep.cfl > 0.0 && c.sweep.cfl <= 1.0,
          "sweep.cfl must lie in (0, 1]");
  const PipelineParams& p = c.pipeline.params;
  require(p.c > 0.0, "pipeline.c must be positive");
  require(p.length > 0.0, "pipeline.length must be positive");
  require(p.T > 0.0, "pipeline.T must be positive");
  require(p.rho_exit_initial > 0.0, "pipeline.rho_exit_initial must be positive");
  require(p.alpha >= 0.0, "pipeline.alpha must be non-negative");
  require(p.beta >= 0.0, "pipeline.beta must be non-negative");
  require(p.lambda > 0.0, "pipeline.lambda must be positive");
  require(c.pipeline.n_x >= 1, "pipeline.n_x must be at least 1");
  require(c.pipeline.n_t >= 1, "pipeline.n_t must be at least 1");
  require(!c.run.output_dir.empty(), "run.output_dir must be non-empty");
  require(c.run.tol > 0.0, "run.tol must be positive");

  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw ValidationError(msg);
  }
}

SystemSpec system_from_config(const RunConfig& c) {
  if (!c.system.table.empty())
    return build_system_from_table(load_coefficient_table(c.system.table),
                                   c.system.eta0);
  Eigen::Matrix2d M;
  M << c.system.m[0], c.system.m[1], c.system.m[2], c.system.m[3];
  return make_constant_system(c.system.d_plus, c.system.d_minus, M,
                              c.system.eta0, c.system.length);
}

QuadraticCost cost_from_config(const RunConfig& c) {
  if (c.cost.tracking)
    return cost_from_tracking(c.cost.lambda,
                              Eigen::Vector2d(c.cost.R_b[0], c.cost.R_b[1]));
  Eigen::Matrix2d A0, AL;
  A0 << c.cost.A0[0], c.cost.A0[1], c.cost.A0[2], c.cost.A0[3];
  AL << c.cost.AL[0], c.cost.AL[1], c.cost.AL[2], c.cost.AL[3];
  return make_cost(A0, AL, Eigen::Vector2d(c.cost.c0[0], c.cost.c0[1]),
                   Eigen::Vector2d(c.cost.cL[0], c.cost.cL[1]),
                   c.cost.constant_rate);
}

SpaceTimeGrid grid_from_config(const RunConfig& c, const SystemSpec& sys) {
  return SpaceTimeGrid(sys, c.grid.n_x, c.grid.n_t, c.grid.T, c.grid.rule);
}

CoefficientTable load_coefficient_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open coefficient table '" + path + "'");
  CoefficientTable table;
  ParseCursor at{path, 0};
  std::string line;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++at.line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(body);
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    const bool header = first_row && !cells.empty() && cells[0] == "x";
    first_row = false;
    if (header) continue;
    if (cells.size() != 7)
      at.fail("expected 7 columns x,d_plus,d_minus,m11,m12,m21,m22");
    std::array<double, 7> v{};
    for (int k = 0; k < 7; ++k) v[k] = parse_double(cells[k], at);
    table.x.push_back(v[0]);
    table.d_plus.push_back(v[1]);
    table.d_minus.push_back(v[2]);
    Eigen::Matrix2d M;
    M << v[3], v[4], v[5], v[6];
    table.coupling.push_back(M);
  }
  if (table.x.size() < 2)
    throw ParseError(path + ": coefficient table needs at least 2 rows");
  for (std::size_t i = 1; i < table.x.size(); ++i)
    if (!(table.x[i] > table.x[i - 1]))
      throw ParseError(path + ": x column must be strictly increasing");
  if (std::abs(table.x.front()) > 1e-12)
    throw ParseError(path + ": x column must start at 0");
  return table;
}

}  // namespace turnpike
