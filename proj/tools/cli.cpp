#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "dispersal/ess.hpp"
#include "dispersal/montecarlo.hpp"
#include "dispersal/solvers.hpp"
#include "instance_io.hpp"

namespace dispersal::cli {

using nlohmann::json;

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  if (s == "-0." + std::string(static_cast<std::size_t>(decimals), '0')) s.erase(0, 1);
  return s;
}

std::vector<SweepRow> sweep_rows(double f2, double c_min, double c_max,
                                 std::size_t steps) {
  if (!(f2 > 0.0 && f2 <= 1.0)) throw ValidationError("--f2: must lie in (0, 1]");
  if (!(c_max < 1.0))
    throw ValidationError("--c-max: must be below 1 (site values stop decreasing at c = 1)");
  if (!(c_min <= c_max)) throw ValidationError("--c-min: must not exceed --c-max");
  if (steps < 1) throw ValidationError("--steps: must be at least 1");

  const ValueProfile profile({1.0, f2});
  const std::size_t players = 2;
  const double optimal =
      coverage(profile, players, sigma_star(profile, players).strategy);

  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double c = steps == 1 ? c_min
                                : c_min + (c_max - c_min) * static_cast<double>(i) /
                                              static_cast<double>(steps - 1);
    const GameInstance game(profile, players, CongestionPolicy::table({1.0, c}));
    const auto ifd = ifd_solve(game);
    const auto welfare = welfare_opt(game);
    rows.push_back({c, coverage(profile, players, ifd.strategy), optimal,
                    coverage(profile, players, welfare.strategy)});
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows)
    out << format_fixed(r.c) << ',' << format_fixed(r.cover_ifd) << ','
        << format_fixed(r.cover_optimal) << ',' << format_fixed(r.cover_welfare_opt)
        << '\n';
}

namespace {

json in_input_order(const ValueProfile& profile, const Strategy& s) {
  return json(profile.to_input_order(s.probs()));
}

json site_order(const ValueProfile& profile) {
  return json(std::vector<std::size_t>(profile.original_index().begin(),
                                       profile.original_index().end()));
}

void write_json(const json& doc, std::ostream& out) { out << doc.dump(2) << '\n'; }

// --- solve -----------------------------------------------------------------

int cmd_solve(const std::string& path, const std::string& mode,
              std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const auto file = load_instance(path);
  json doc;
  doc["mode"] = mode;
  doc["players"] = file.players;
  doc["policy"] = file.policy.name();
  doc["site_order"] = site_order(file.profile);
  if (file.profile.was_reordered())
    err << "note: site values were sorted descending; site_order lists input indices\n";

  if (file.players == 1) {
    err << "warning: single player; the answer is the point mass on the most valuable site\n";
    const auto only = Strategy::point_mass(file.profile.size(), 0);
    doc["strategy"] = in_input_order(file.profile, only);
    doc["support_size"] = 1;
    doc["common_value"] = file.profile[0];
    write_json(doc, out);
    return kExitOk;
  }

  const auto game = file.game();
  if (mode == "sigma-star") {
    const auto result = sigma_star(file.profile, file.players);
    const auto check = verify_ifd(game.with_policy(CongestionPolicy::exclusive()),
                                  result.strategy, 1e-9);
    doc["strategy"] = in_input_order(file.profile, result.strategy);
    doc["support_size"] = result.support_size;
    doc["normalizer"] = result.normalizer;
    doc["common_value"] = result.common_value;
    doc["coverage"] = coverage(file.profile, file.players, result.strategy);
    doc["exclusive_residual"] = check.residual;
  } else if (mode == "ifd") {
    const auto report = ifd_solve(game);
    doc["strategy"] = in_input_order(file.profile, report.strategy);
    doc["support_size"] = report.support_size;
    doc["common_value"] = report.common_value;
    doc["residual"] = report.residual;
    doc["boundary_flag"] = report.boundary_flag;
    doc["iterations"] = report.iterations;
    doc["site_values"] = json(file.profile.to_input_order(report.site_values));
    doc["coverage"] = coverage(file.profile, file.players, report.strategy);
  } else {
    WelfareOptions options;
    options.seed = seed;
    const auto result = welfare_opt(game, options);
    doc["strategy"] = in_input_order(file.profile, result.strategy);
    doc["payoff"] = result.payoff;
    doc["global_search"] = result.exhaustive;
    doc["coverage"] = coverage(file.profile, file.players, result.strategy);
    if (!result.exhaustive)
      err << "note: multi-start local search; the optimum is not certified global\n";
  }
  write_json(doc, out);
  return kExitOk;
}

// --- spoa ------------------------------------------------------------------

int cmd_spoa(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto file = load_instance(path);
  if (file.players == 1) {
    err << "warning: single player; every policy attains the optimum\n";
    out << format_fixed(1.0) << '\n';
    return kExitOk;
  }
  out << format_fixed(spoa(file.game())) << '\n';
  return kExitOk;
}

// --- ess-check -------------------------------------------------------------

int cmd_ess_check(const std::string& path, std::size_t mutants, std::uint64_t seed,
                  std::ostream& out) {
  if (mutants == 0) throw ValidationError("--mutants: must be at least 1");
  const auto file = load_instance(path);
  const auto game = file.game();
  if (game.sites() < 2) throw ValidationError("values: need at least 2 sites for mutants");

  const bool exclusive = game.policy().is_exclusive_up_to(game.players());
  const Strategy candidate = exclusive ? sigma_star(file.profile, file.players).strategy
                                       : ifd_solve(game).strategy;
  const auto batch = generate_mutants(candidate, seed, mutants);

  std::size_t passed = 0;
  std::map<std::size_t, std::size_t> witness_counts;
  json failures = json::array();
  for (const auto& mutant : batch) {
    const auto verdict = ess_characterization(game, candidate, mutant);
    if (verdict.passed) {
      ++passed;
      ++witness_counts[*verdict.witness_m];
    } else {
      failures.push_back({{"mutant", in_input_order(file.profile, mutant)},
                          {"margins", verdict.margins}});
    }
  }

  json witnesses = json::object();
  for (const auto& [m, n] : witness_counts) witnesses[std::to_string(m)] = n;
  json doc;
  doc["candidate"] = exclusive ? "sigma-star" : "ifd";
  doc["candidate_strategy"] = in_input_order(file.profile, candidate);
  doc["policy"] = file.policy.name();
  doc["seed"] = seed;
  doc["mutants"] = batch.size();
  doc["passed"] = passed;
  doc["witness_counts"] = witnesses;
  doc["failures"] = failures;
  doc["pass_required"] = exclusive;
  write_json(doc, out);
  return exclusive && passed != batch.size() ? kExitFailure : kExitOk;
}

// --- sweep -----------------------------------------------------------------

int cmd_sweep(double f2, double c_min, double c_max, std::size_t steps,
              const std::string& out_path, std::ostream& out) {
  const auto rows = sweep_rows(f2, c_min, c_max, steps);
  if (out_path.empty() || out_path == "-") {
    write_sweep_csv(rows, out);
    return kExitOk;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw ValidationError("--out: cannot open " + out_path);
  write_sweep_csv(rows, file);
  return kExitOk;
}

// --- simulate --------------------------------------------------------------

int cmd_simulate(const std::string& path, const std::string& source,
                 const std::string& strategy_path, std::uint64_t rounds,
                 std::uint64_t seed, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  if (rounds < 1) throw ValidationError("--rounds: must be at least 1");
  const auto file = load_instance(path);
  const auto game = file.game();

  std::optional<Strategy> strategy;
  if (source == "sigma-star") {
    strategy = sigma_star(file.profile, file.players).strategy;
  } else if (source == "ifd") {
    strategy = ifd_solve(game).strategy;
  } else {
    if (strategy_path.empty())
      throw ValidationError("--strategy-file: required when --strategy file");
    strategy = load_strategy(strategy_path, file.profile);
  }

  SimConfig config{game, std::vector<Strategy>(game.players(), *strategy), rounds, seed};
  const auto report = simulate(config);
  if (report.degenerate)
    err << "warning: a single round gives no variance estimate; standard errors are 0\n";

  json doc;
  doc["strategy_source"] = source;
  doc["strategy"] = in_input_order(file.profile, *strategy);
  doc["rounds"] = report.rounds;
  doc["seed"] = report.seed;
  doc["degenerate"] = report.degenerate;
  doc["mean_payoff_per_player"] = report.mean_payoff;
  doc["std_error_payoff"] = report.std_error_payoff;
  doc["mean_coverage"] = report.mean_coverage;
  doc["std_error_coverage"] = report.std_error_coverage;
  doc["expected_payoff"] = symmetric_payoff(game, *strategy);
  doc["expected_coverage"] = coverage(file.profile, file.players, *strategy);

  if (out_path.empty() || out_path == "-") {
    write_json(doc, out);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ValidationError("--out: cannot open " + out_path);
    write_json(doc, f);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria, optimal coverage, and stability of the dispersal game"};
  app.require_subcommand(1);

  std::string instance;
  std::string mode = "sigma-star";
  std::uint64_t seed = 1;
  std::size_t mutants = 100;
  std::uint64_t rounds = 100000;
  std::string strategy_source = "sigma-star";
  std::string strategy_file;
  std::string out_path;
  double f2 = 0.5;
  double c_min = -0.5;
  double c_max = 0.5;
  std::size_t steps = 101;

  auto* solve = app.add_subcommand("solve", "Solve for an equilibrium or optimum");
  solve->add_option("--instance", instance, "Instance JSON file")->required();
  solve->add_option("--mode", mode, "sigma-star | ifd | welfare-opt")
      ->check(CLI::IsMember({"sigma-star", "ifd", "welfare-opt"}));
  solve->add_option("--seed", seed, "Seed for the multi-start welfare search");

  auto* spoa_cmd = app.add_subcommand("spoa", "Symmetric price of anarchy of an instance");
  spoa_cmd->add_option("--instance", instance, "Instance JSON file")->required();

  auto* ess = app.add_subcommand("ess-check", "Test evolutionary stability against mutants");
  ess->add_option("--instance", instance, "Instance JSON file")->required();
  ess->add_option("--mutants", mutants, "Number of mutants");
  ess->add_option("--seed", seed, "Mutant generator seed");

  auto* sweep = app.add_subcommand("sweep", "Coverage versus collision cost c (2 sites, 2 players)");
  sweep->add_option("--f2", f2, "Value of the second site, in (0, 1]");
  sweep->add_option("--c-min", c_min, "Smallest c");
  sweep->add_option("--c-max", c_max, "Largest c (< 1)");
  sweep->add_option("--steps", steps, "Grid points");
  sweep->add_option("--out", out_path, "CSV output path (stdout if omitted)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of payoffs and coverage");
  sim->add_option("--instance", instance, "Instance JSON file")->required();
  sim->add_option("--strategy", strategy_source, "sigma-star | ifd | file")
      ->check(CLI::IsMember({"sigma-star", "ifd", "file"}));
  sim->add_option("--strategy-file", strategy_file, "Strategy JSON (with --strategy file)");
  sim->add_option("--rounds", rounds, "Number of rounds");
  sim->add_option("--seed", seed, "Simulation seed");
  sim->add_option("--out", out_path, "JSON output path (stdout if omitted)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("dispersal");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (solve->parsed()) return cmd_solve(instance, mode, seed, out, err);
    if (spoa_cmd->parsed()) return cmd_spoa(instance, out, err);
    if (ess->parsed()) return cmd_ess_check(instance, mutants, seed, out);
    if (sweep->parsed()) return cmd_sweep(f2, c_min, c_max, steps, out_path, out);
    if (sim->parsed())
      return cmd_simulate(instance, strategy_source, strategy_file, rounds, seed,
                          out_path, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << " (" << e.diagnostics() << ")\n";
    return kExitSolver;
  }
  return kExitFailure;
}

}  // namespace dispersal::cli
