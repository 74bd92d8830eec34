#include "seqmeas/cli.hpp"

#include "seqmeas/entanglement.hpp"
#include "seqmeas/montecarlo.hpp"
#include "seqmeas/strategies.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace seqmeas::cli {
namespace {

std::vector<double> uniform_grid(double lo, double hi, int steps) {
  if (steps == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  grid.back() = hi;
  return grid;
}

std::vector<Strategy> selected(const SweepConfig& config, std::initializer_list<Strategy> supported) {
  if (config.strategy == "all") return supported;
  const Strategy s = parse_strategy(config.strategy);
  for (Strategy allowed : supported)
    if (allowed == s) return {s};
  throw ConfigError("strategy '" + config.strategy + "' is not available for " + config.command);
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_double(v);
        else if constexpr (std::is_same_v<T, std::string>)
          return v;
        else
          return std::to_string(v);
      },
      cell);
}

std::string format_name(Format f) { return f == Format::csv ? "csv" : "json"; }

}  // namespace

void SweepConfig::validate() const {
  if (psi_steps < 1) throw ConfigError("--psi-steps must be at least 1");
  if (k_bar_steps < 1) throw ConfigError("--kbar-steps must be at least 1");
  if (n < 1) throw ConfigError("--n must be at least 1");
  if (!(werner_p >= 0.0 && werner_p <= 1.0)) throw ConfigError("--werner-p must lie in [0, 1]");
  if (strategy != "all") {
    try {
      parse_strategy(strategy);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto& v : {pbs_th, pbs_rv})
    if (v && !(*v >= 0.0 && *v <= 1.0)) throw ConfigError("PBS port probabilities must lie in [0, 1]");
}

std::optional<PbsImperfection> SweepConfig::pbs() const {
  if (!pbs_th && !pbs_rv) return std::nullopt;
  return PbsImperfection::from_ports(pbs_th.value_or(1.0), pbs_rv.value_or(1.0));
}

Table sweep_single(const SweepConfig& config) {
  Table t{{"psi", "theta_b", "k", "c_ideal", "c_model", "c_incoherent_reference"}, {}, false};
  const DensityMatrix4 singlet = singlet_state();
  const DensityMatrix4 source = werner_state(config.werner_p);
  for (double psi_value : uniform_grid(0.0, kPi / 4, config.psi_steps)) {
    const KitStrength psi(psi_value);
    const MeasurementKit ideal(psi);
    const MeasurementKit modelled(psi, MeterBasisAngle{}, config.pbs());
    const double k_ideal = knowledge_of_kit(ideal).value;
    t.rows.push_back({psi.value(), strength_to_waveplate(psi), knowledge_of_kit(modelled).value,
                      single_coherent(ideal, singlet).c, concurrence(apply_kit(source, modelled).non_selective),
                      1.0 - k_ideal});
  }
  return t;
}

Table sweep_strategies(const SweepConfig& config) {
  if (config.n != 2) throw ConfigError("sweep-strategies compares two-measurement strategies; use --n 2");
  const auto strategies = selected(config, {Strategy::incoherent, Strategy::independent, Strategy::adaptive});
  Table t{{"psi", "k_bar", "strategy", "k_tot", "c"}, {}, false};
  const DensityMatrix4 initial = werner_state(config.werner_p);
  const auto pbs = config.pbs();
  for (double psi_value : uniform_grid(0.0, kPi / 4, config.psi_steps)) {
    const KitStrength psi(psi_value);
    const double k_bar = knowledge_of_kit(MeasurementKit(psi, MeterBasisAngle{}, pbs)).value;
    for (Strategy s : strategies) {
      TradeoffPoint p;
      switch (s) {
        case Strategy::incoherent: p = incoherent_sequence(k_bar, 2, initial); break;
        case Strategy::independent:
          p = independent_coherent_pair(psi, initial, KnowledgeEstimator::first_kit, pbs);
          break;
        default: {
          const AdaptiveSolution opt = optimize_adaptive_pair(psi, 1e-9, pbs);
          t.flagged = t.flagged || !opt.converged;
          p = adaptive_coherent_pair(psi, opt.lambda0, opt.lambda1, initial, pbs);
        }
      }
      t.rows.push_back({psi.value(), k_bar, to_string(s), p.k_tot, p.c});
    }
  }
  return t;
}

Table adaptive_angles(const SweepConfig& config) {
  Table t{{"psi", "lambda0", "lambda1", "k_tot", "residual_vs_optimal_tradeoff", "converged"}, {}, false};
  const DensityMatrix4 initial = werner_state(config.werner_p);
  const auto pbs = config.pbs();
  for (double psi_value : uniform_grid(0.0, kPi / 4, config.psi_steps)) {
    const KitStrength psi(psi_value);
    const AdaptiveSolution opt = optimize_adaptive_pair(psi, 1e-9, pbs);
    const TradeoffPoint p = adaptive_coherent_pair(psi, opt.lambda0, opt.lambda1, initial, pbs);
    const double residual = std::abs(std::sqrt(std::max(0.0, 1.0 - p.c * p.c)) - opt.k_tot);
    t.flagged = t.flagged || !opt.converged;
    t.rows.push_back({psi.value(), opt.lambda0.value(), opt.lambda1.value(), opt.k_tot, residual,
                      std::int64_t{opt.converged ? 1 : 0}});
  }
  return t;
}

Table accumulation(const SweepConfig& config) {
  const auto strategies =
      selected(config, {Strategy::single, Strategy::incoherent, Strategy::independent, Strategy::adaptive});
  for (Strategy s : strategies)
    if (s == Strategy::adaptive && config.n > kMaxSequenceLength)
      throw ConfigError("adaptive sequences are limited to n <= 8");
  Table t{{"k_bar", "strategy", "n", "k_tot", "c", "c_zeno_expansion"}, {}, false};
  StrategyOptions options{werner_state(config.werner_p), config.pbs(), 1e-9};
  for (double k_bar : uniform_grid(0.0, 1.0, config.k_bar_steps)) {
    for (Strategy s : strategies) {
      const int n = s == Strategy::single ? 1 : config.n;
      TradeoffPoint p;
      if (s == Strategy::adaptive) {
        const auto r = adaptive_sequence(KitStrength::from_knowledge(k_bar), n, options.tol, options.initial,
                                         options.pbs);
        t.flagged = t.flagged || !r.converged;
        p = r.point;
      } else {
        const double grid[] = {k_bar};
        p = accumulation_curve(s, grid, n, options).front();
      }
      t.rows.push_back({k_bar, to_string(s), std::int64_t{n}, p.k_tot, p.c, zeno_expansion(s, n, k_bar)});
    }
  }
  return t;
}

Table montecarlo(const SweepConfig& config) {
  if (config.shots < 1) throw ConfigError("montecarlo needs --shots >= 1");
  const auto strategies = selected(config, {Strategy::single, Strategy::independent, Strategy::adaptive});
  Table t{{"psi", "strategy", "k_hat", "k_sigma", "c_hat", "seed"}, {}, false};
  const DensityMatrix4 initial = werner_state(config.werner_p);
  const auto pbs = config.pbs();
  std::uint64_t row = 0;
  for (double psi_value : uniform_grid(0.0, kPi / 4, config.psi_steps)) {
    const KitStrength psi(psi_value);
    for (Strategy s : strategies) {
      const RngSeed seed = derive_seed(RngSeed{config.seed}, row++);
      const auto est =
          emulate_experiment(protocol_tree(s, psi, pbs), protocol_estimator(s), initial, config.shots, seed);
      t.rows.push_back({psi.value(), to_string(s), est.knowledge.k_hat, est.knowledge.sigma,
                        est.concurrence.c_hat, seed.value});
    }
  }
  return t;
}

Table run_command(const SweepConfig& config) {
  if (config.command == "sweep-single") return sweep_single(config);
  if (config.command == "sweep-strategies") return sweep_strategies(config);
  if (config.command == "adaptive-angles") return adaptive_angles(config);
  if (config.command == "accumulation") return accumulation(config);
  if (config.command == "montecarlo") return montecarlo(config);
  throw ConfigError("unknown command '" + config.command + "'");
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_cell(row[c]);
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table, const SweepConfig& config) {
  using Json = nlohmann::ordered_json;
  Json cfg;
  cfg["command"] = config.command;
  cfg["psi_steps"] = config.psi_steps;
  cfg["kbar_steps"] = config.k_bar_steps;
  cfg["n"] = config.n;
  cfg["strategy"] = config.strategy;
  cfg["werner_p"] = config.werner_p;
  cfg["pbs_th"] = config.pbs_th ? Json(*config.pbs_th) : Json(nullptr);
  cfg["pbs_rv"] = config.pbs_rv ? Json(*config.pbs_rv) : Json(nullptr);
  cfg["shots"] = config.shots;
  cfg["seed"] = config.seed;
  cfg["format"] = format_name(config.format);

  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r;
    for (std::size_t c = 0; c < row.size(); ++c)
      std::visit([&](const auto& v) { r[table.columns[c]] = v; }, row[c]);
    rows.push_back(std::move(r));
  }
  Json doc;
  doc["config"] = std::move(cfg);
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_output(const Table& table, const SweepConfig& config) {
  const std::string text = config.format == Format::csv ? to_csv(table) : to_json(table, config);
  if (config.output_path.empty() || config.output_path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(config.output_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + config.output_path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + config.output_path + "'");
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Sequential partial measurements on a shared two-qubit state"};
  app.set_config("--config", "", "TOML/INI file whose keys mirror the flag names (flags win)");
  app.require_subcommand(1);
  app.fallthrough();

  SweepConfig config;
  std::string format = "csv";
  app.add_option("--psi-steps", config.psi_steps, "Points on the psi grid over [0, pi/4]");
  app.add_option("--kbar-steps", config.k_bar_steps, "Points on the K_bar grid over [0, 1]");
  app.add_option("--n", config.n, "Number of sequential measurements");
  app.add_option("--strategy", config.strategy, "single | incoherent | independent | adaptive | all");
  app.add_option("--werner-p", config.werner_p, "Werner weight of the source state");
  app.add_option("--pbs-th", config.pbs_th, "PBS transmission for H (r_H = 1 - t_H)");
  app.add_option("--pbs-rv", config.pbs_rv, "PBS reflection for V (t_V = 1 - r_V)");
  app.add_option("--shots", config.shots, "Shots per input / tomography setting (0 = analytic)");
  app.add_option("--seed", config.seed, "Base RNG seed");
  app.add_option("--out", config.output_path, "Output file (default stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  for (const char* name : {"sweep-single", "sweep-strategies", "adaptive-angles", "accumulation", "montecarlo"})
    app.add_subcommand(name)->callback([&config, name] { config.command = name; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidConfig;
  }
  config.format = format == "json" ? Format::json : Format::csv;

  try {
    config.validate();
    const Table table = run_command(config);
    write_output(table, config);
    if (table.flagged) {
      std::cerr << "warning: optimizer did not converge for at least one row\n";
      return kNonConvergence;
    }
    return kSuccess;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }
}

}  // namespace seqmeas::cli
