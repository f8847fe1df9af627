#include "turnpike/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "turnpike/integer_control.hpp"
#include "turnpike/pipeline.hpp"

namespace turnpike {

namespace {

std::string artifact_name(const RunConfig& cfg, int index, const char* ext) {
  return command_name(cfg.command) + "_" + std::to_string(index) + "." + ext;
}

CsvBuilder trace_csv(const SpaceTimeGrid& grid, const BoundaryControl& u,
                     const TraceSignal& trace) {
  CsvBuilder csv({"t", "u_plus", "u_minus", "trace_plus", "trace_minus"});
  for (int n = 0; n < grid.n_t(); ++n)
    csv.row({grid.t(n + 1), u.plus[n], u.minus[n], trace.plus[n],
             trace.minus[n]});
  return csv;
}

CsvBuilder trajectory_csv(const SpaceTimeGrid& grid,
                          const StateTrajectory& state) {
  CsvBuilder csv({"t", "x", "r_plus", "r_minus"});
  for (int n = 0; n <= grid.n_t(); ++n)
    for (int i = 0; i <= grid.n_x(); ++i)
      csv.row({grid.t(n), grid.x(i), state.plus(n, i), state.minus(n, i)});
  return csv;
}

void run_certify(const RunConfig& cfg, std::vector<Artifact>& artifacts,
                 std::ostream& out) {
  const SystemSpec sys = system_from_config(cfg);
  const bool do_decay = cfg.certify.regime != "growth";
  const bool do_growth = cfg.certify.regime != "decay";

  CsvBuilder csv({"regime", "mu", "bound", "argmax_x", "valid"});
  std::vector<Certificate> decay_certs, growth_certs;
  for (double mu : cfg.certify.mu_grid) {
    if (do_decay) {
      const Certificate c = certify_decay(
          sys, ExpWeight{mu, mu, WeightRegime::decay}, cfg.certify.n_samples);
      decay_certs.push_back(c);
      csv.row({0.0, mu, c.bound, c.argmax_x, c.valid ? 1.0 : 0.0});
    }
    if (do_growth) {
      const Certificate c = certify_growth(
          sys, ExpWeight{-mu, -mu, WeightRegime::growth}, cfg.certify.n_samples);
      growth_certs.push_back(c);
      csv.row({1.0, mu, c.bound, c.argmax_x, c.valid ? 1.0 : 0.0});
    }
  }
  artifacts.push_back({artifact_name(cfg, 0, "csv"), csv.str()});

  auto report = [&](const char* label, const std::vector<Certificate>& certs,
                    bool decay) {
    const auto best = std::min_element(
        certs.begin(), certs.end(), [&](const Certificate& a, const Certificate& b) {
          if (a.valid != b.valid) return a.valid;
          return decay ? a.bound < b.bound : a.bound > b.bound;
        });
    out << label << ": ";
    if (best == certs.end()) {
      out << "no certificates computed\n";
      return;
    }
    out << (best->valid ? "valid" : "not valid") << ", mu = "
        << format_double(decay ? best->weight.mu_plus : -best->weight.mu_plus)
        << ", bound = " << format_double(best->bound) << " at x = "
        << format_double(best->argmax_x) << "\n";
  };
  if (do_decay) report("decay", decay_certs, true);
  if (do_growth) report("growth", growth_certs, false);

  if (do_decay && do_growth) {
    // Mirror-weight comparison: with symmetric coupling the growth bound at
    // -mu is the exact negative of the decay bound at +mu.
    double worst = 0.0;
    for (std::size_t k = 0; k < decay_certs.size(); ++k)
      worst = std::max(worst,
                       std::abs(decay_certs[k].bound + growth_certs[k].bound));
    out << "mirror-weight bound mismatch (symmetric coupling only): "
        << format_double(worst) << "\n";
  }

  if (cfg.run.emit_svg) {
    PlotSeries sd{"decay bound", {}, {}}, sg{"growth bound", {}, {}};
    for (std::size_t k = 0; k < cfg.certify.mu_grid.size(); ++k) {
      if (do_decay) {
        sd.x.push_back(cfg.certify.mu_grid[k]);
        sd.y.push_back(decay_certs[k].bound);
      }
      if (do_growth) {
        sg.x.push_back(cfg.certify.mu_grid[k]);
        sg.y.push_back(growth_certs[k].bound);
      }
    }
    std::vector<PlotSeries> series;
    if (do_decay) series.push_back(sd);
    if (do_growth) series.push_back(sg);
    artifacts.push_back({artifact_name(cfg, 0, "svg"),
                         svg_line_plot("exponential weight certificates", "mu",
                                       "bound", series)});
  }
}

void run_simulate(const RunConfig& cfg, std::vector<Artifact>& artifacts,
                  std::ostream& out) {
  const SystemSpec sys = system_from_config(cfg);
  const SpaceTimeGrid grid = grid_from_config(cfg, sys);
  BoundaryControl u(grid.n_t());
  std::fill(u.plus.begin(), u.plus.end(), cfg.simulate.u_plus);
  std::fill(u.minus.begin(), u.minus.end(), cfg.simulate.u_minus);
  const StateTrajectory state = forward_solve(sys, grid, u);
  const TraceSignal trace = extract_traces(state);

  artifacts.push_back({artifact_name(cfg, 0, "csv"),
                       trajectory_csv(grid, state).str()});
  artifacts.push_back({artifact_name(cfg, 1, "csv"),
                       trace_csv(grid, u, trace).str()});
  out << "courant number = " << format_double(cfl_of(sys, grid)) << "\n";
  out << "final traces: outgoing plus = "
      << format_double(trace.plus[grid.n_t() - 1]) << ", outgoing minus = "
      << format_double(trace.minus[grid.n_t() - 1]) << "\n";

  if (cfg.run.emit_svg) {
    std::vector<double> t(grid.n_t());
    for (int n = 0; n < grid.n_t(); ++n) t[n] = grid.t(n + 1);
    artifacts.push_back(
        {artifact_name(cfg, 0, "svg"),
         svg_line_plot("boundary traces", "t", "trace",
                       {{"trace_plus", t, trace.plus},
                        {"trace_minus", t, trace.minus}})});
  }
}

void run_solve_static(const RunConfig& cfg, std::vector<Artifact>& artifacts,
                      std::ostream& out) {
  const SystemSpec sys = system_from_config(cfg);
  const SpaceTimeGrid grid = grid_from_config(cfg, sys);
  const QuadraticCost cost = cost_from_config(cfg);
  const StaticSolution sol = solve_static(cost, sys, grid);

  CsvBuilder csv({"x", "R_plus", "R_minus"});
  for (int i = 0; i <= grid.n_x(); ++i)
    csv.row({grid.x(i), sol.profile.plus[i], sol.profile.minus[i]});
  artifacts.push_back({artifact_name(cfg, 0, "csv"), csv.str()});

  out << "static control = (" << format_double(sol.control[0]) << ", "
      << format_double(sol.control[1]) << ")\n";
  out << "static objective rate = " << format_double(sol.objective) << "\n";
  out << "stationarity residual = " << format_double(sol.optimality_residual)
      << "\n";

  if (cfg.run.emit_svg) {
    std::vector<double> xs(grid.n_x() + 1);
    for (int i = 0; i <= grid.n_x(); ++i) xs[i] = grid.x(i);
    artifacts.push_back(
        {artifact_name(cfg, 0, "svg"),
         svg_line_plot("optimal stationary profile", "x", "R",
                       {{"R_plus", xs, sol.profile.plus},
                        {"R_minus", xs, sol.profile.minus}})});
  }
}

void run_solve_dynamic(const RunConfig& cfg, std::vector<Artifact>& artifacts,
                       std::ostream& out) {
  const SystemSpec sys = system_from_config(cfg);
  const SpaceTimeGrid grid = grid_from_config(cfg, sys);
  const QuadraticCost cost = cost_from_config(cfg);
  CgOptions opts;
  opts.tol = cfg.run.tol;
  opts.log_residuals = true;
  const DynamicSolution sol = solve_dynamic(cost, sys, grid, opts);

  artifacts.push_back({artifact_name(cfg, 0, "csv"),
                       trace_csv(grid, sol.control, sol.trace).str()});
  CsvBuilder log({"iteration", "residual"});
  for (std::size_t k = 0; k < sol.residual_history.size(); ++k)
    log.row({static_cast<double>(k), sol.residual_history[k]});
  artifacts.push_back({artifact_name(cfg, 1, "csv"), log.str()});
  artifacts.push_back({artifact_name(cfg, 2, "csv"),
                       trajectory_csv(grid, sol.state).str()});

  out << "objective = " << format_double(sol.objective) << "\n";
  out << "cg iterations = " << sol.cg_iterations
      << ", residual = " << format_double(sol.residual) << "\n";
  const StaticSolution st = solve_static(cost, sys, grid);
  out << "static control = (" << format_double(st.control[0]) << ", "
      << format_double(st.control[1]) << "), time-average of dynamic control = (";
  double ap = 0.0, am = 0.0, wsum = 0.0;
  for (int n = 0; n < grid.n_t(); ++n) {
    ap += grid.signal_weight(n) * sol.control.plus[n];
    am += grid.signal_weight(n) * sol.control.minus[n];
    wsum += grid.signal_weight(n);
  }
  out << format_double(ap / wsum) << ", " << format_double(am / wsum) << ")\n";

  if (cfg.run.emit_svg) {
    std::vector<double> t(grid.n_t());
    for (int n = 0; n < grid.n_t(); ++n) t[n] = grid.t(n + 1);
    artifacts.push_back(
        {artifact_name(cfg, 0, "svg"),
         svg_line_plot("optimal boundary controls", "t", "u",
                       {{"u_plus", t, sol.control.plus},
                        {"u_minus", t, sol.control.minus}})});
  }
}

void run_solve_integer(const RunConfig& cfg, std::vector<Artifact>& artifacts,
                       std::ostream& out) {
  const SystemSpec sys = system_from_config(cfg);
  const SpaceTimeGrid grid = grid_from_config(cfg, sys);
  if (!cfg.cost.tracking)
    throw ValidationError("solve-integer requires the tracking cost form");
  IntegerSpec spec;
  spec.feasible = cfg.integer.feasible;
  spec.nu = cfg.integer.nu;
  spec.lambda = cfg.cost.lambda;
  spec.R_b = Eigen::Vector2d(cfg.cost.R_b[0], cfg.cost.R_b[1]);
  CgOptions opts;
  opts.tol = cfg.run.tol;

  const ThresholdReport threshold = switching_threshold_check(spec);
  out << "switching threshold: nu = " << format_double(threshold.nu)
      << ", required > " << format_double(threshold.bound) << " -> "
      << (threshold.satisfied ? "satisfied" : "violated") << "\n";

  const IntegerStaticSolution st = solve_integer_static(spec, sys, grid);
  const IntegerSolution sol = solve_integer_dynamic(spec, sys, grid, opts);

  CsvBuilder csv({"alpha", "J_alpha", "u_minus_norm"});
  for (const PerAlpha& row : sol.table)
    csv.row({row.alpha, row.value, row.u_minus_norm});
  artifacts.push_back({artifact_name(cfg, 0, "csv"), csv.str()});

  out << "static integer level = " << format_double(st.alpha)
      << ", dynamic integer level = " << format_double(sol.alpha) << " ("
      << (st.alpha == sol.alpha ? "agree" : "differ") << ")\n";
  out << "omega = " << format_double(sol.omega)
      << ", switching variation = " << format_double(sol.variation) << "\n";
  out << "turnpike metric vs static pair = "
      << format_double(integer_turnpike_metric(sol, st, grid)) << "\n";
}

void run_sweep(const RunConfig& cfg, std::vector<Artifact>& artifacts,
               std::ostream& out) {
  SweepProblem problem{system_from_config(cfg), cost_from_config(cfg),
                       cfg.grid.n_x, cfg.sweep.cfl, cfg.grid.rule,
                       CgOptions{}, true};
  problem.cg.tol = cfg.run.tol;
  const TurnpikeReport report = sweep_and_fit(problem, cfg.sweep.horizons);

  const double exponent = report.fitted_exponent.value_or(
      std::numeric_limits<double>::quiet_NaN());
  CsvBuilder csv({"T", "control_metric", "state_metric", "grad_norm",
                  "exponent"});
  for (std::size_t k = 0; k < report.horizons.size(); ++k)
    csv.row({report.horizons[k], report.control_metrics[k],
             report.state_metrics[k], report.grad_norms[k], exponent});
  artifacts.push_back({artifact_name(cfg, 0, "csv"), csv.str()});

  out << "fitted control-metric exponent = " << format_double(exponent) << "\n";
  out << "coercivity estimate (min over sweep) = "
      << format_double(report.kappa) << "\n";

  if (cfg.run.emit_svg) {
    artifacts.push_back(
        {artifact_name(cfg, 0, "svg"),
         svg_line_plot("turnpike metrics over the horizon", "T", "metric",
                       {{"control_metric", report.horizons,
                         report.control_metrics},
                        {"state_metric", report.horizons,
                         report.state_metrics}},
                       /*log_x=*/true, /*log_y=*/true)});
  }
}

void run_pipeline(const RunConfig& cfg, std::vector<Artifact>& artifacts,
                  std::ostream& out) {
  CgOptions opts;
  opts.tol = cfg.run.tol;
  const ScenarioReport report = run_transition_scenario(
      cfg.pipeline.params, cfg.pipeline.n_x, cfg.pipeline.n_t,
      cfg.pipeline.rule, opts);

  std::vector<double> rho, q;
  reconstruct_physical(report.stationary, cfg.pipeline.params.c,
                       report.dynamic_sol.state, rho, q);
  const int n_x = cfg.pipeline.n_x;
  CsvBuilder field({"t", "x", "rho", "q"});
  for (int n = 0; n < static_cast<int>(report.times.size()); ++n)
    for (int i = 0; i <= n_x; ++i)
      field.row({report.times[n], report.stationary.x[i],
                 rho[static_cast<std::size_t>(n) * (n_x + 1) + i],
                 q[static_cast<std::size_t>(n) * (n_x + 1) + i]});
  artifacts.push_back({artifact_name(cfg, 0, "csv"), field.str()});

  CsvBuilder err({"t", "e_rho", "e_q"});
  for (std::size_t n = 0; n < report.times.size(); ++n)
    err.row({report.times[n], report.e_rho[n], report.e_q[n]});
  artifacts.push_back({artifact_name(cfg, 1, "csv"), err.str()});

  out << "courant number = " << format_double(report.cfl) << "\n";
  out << "optimal stationary entry state: rho = "
      << format_double(report.rho_entry_static)
      << ", q = " << format_double(report.q_entry_static) << "\n";
  out << "dynamic objective = " << format_double(report.dynamic_sol.objective)
      << " (cg iterations = " << report.dynamic_sol.cg_iterations << ")\n";
  out << "plateau: fraction = " << format_double(report.plateau_fraction)
      << " of nodes within " << format_double(report.plateau_tolerance)
      << ", window t in [" << format_double(report.times[report.plateau_begin])
      << ", "
      << format_double(
             report.times[std::max(report.plateau_begin,
                                   report.plateau_end - 1)])
      << "]\n";

  if (cfg.run.emit_svg) {
    artifacts.push_back(
        {artifact_name(cfg, 0, "svg"),
         svg_line_plot("entry boundary state", "t", "value",
                       {{"rho(t,0)", report.times, report.rho_entry},
                        {"q(t,0)", report.times, report.q_entry}})});
    artifacts.push_back(
        {artifact_name(cfg, 1, "svg"),
         svg_line_plot("entry relative errors", "t", "error",
                       {{"e_rho", report.times, report.e_rho},
                        {"e_q", report.times, report.e_q}})});
  }
}

}  // namespace

void run_command(const RunConfig& config, std::ostream& out) {
  validate_config(config);
  std::vector<Artifact> artifacts;
  switch (config.command) {
    case Command::certify: run_certify(config, artifacts, out); break;
    case Command::simulate: run_simulate(config, artifacts, out); break;
    case Command::solve_static: run_solve_static(config, artifacts, out); break;
    case Command::solve_dynamic: run_solve_dynamic(config, artifacts, out); break;
    case Command::solve_integer: run_solve_integer(config, artifacts, out); break;
    case Command::sweep: run_sweep(config, artifacts, out); break;
    case Command::pipeline: run_pipeline(config, artifacts, out); break;
  }
  emit_outputs(artifacts, config.run.output_dir);
  out << "wrote " << artifacts.size() << " artifact(s) + manifest.json to "
      << config.run.output_dir << "\n";
}

int cli_main(int argc, char** argv) {
  CLI::App app{"boundary-control turnpike laboratory for 2x2 hyperbolic systems"};
  app.name("turnpike-hyp");
  std::string command_arg, config_path, out_dir;
  bool svg = false;
  std::uint64_t seed = 0;
  double tol = 0.0;
  app.add_option("command", command_arg,
                 "certify | simulate | solve-static | solve-dynamic | "
                 "solve-integer | sweep | pipeline (overrides the config)");
  app.add_option("--config", config_path, "path to the run configuration")
      ->required();
  app.add_option("--out", out_dir, "output directory (default from config)");
  app.add_flag("--svg", svg, "also emit SVG plots");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized diagnostics");
  auto* tol_opt = app.add_option("--tol", tol, "solver tolerance override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!command_arg.empty()) cfg.command = command_from_name(command_arg);
    if (!out_dir.empty()) cfg.run.output_dir = out_dir;
    if (const char* env = std::getenv("TURNPIKE_OUT"); env && *env)
      cfg.run.output_dir = env;
    if (svg) cfg.run.emit_svg = true;
    if (seed_opt->count() > 0) cfg.run.seed = seed;
    if (tol_opt->count() > 0) cfg.run.tol = tol;
    run_command(cfg, std::cout);
    return kExitOk;
  } catch (const NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const SPDViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace turnpike
