#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "causalbounds/bootstrap.hpp"
#include "causalbounds/bounds.hpp"
#include "causalbounds/error.hpp"
#include "causalbounds/logistic.hpp"
#include "causalbounds/report.hpp"

namespace cbounds::cli {

namespace {

Error usage(const std::string& message) { return Error(ErrorCode::UsageError, message); }

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
  return s;
}

}  // namespace

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"Worst-case ATE bounds over inverse-propensity weights", "causal-bounds"};
  app.require_subcommand(1);
  app.allow_config_extras(false);
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

  auto* bounds = app.add_subcommand("bounds", "Bounds for one dataset")->fallthrough();
  auto* simulate = app.add_subcommand("simulate", "Replicate the simulation tables")->fallthrough();
  auto* boot = app.add_subcommand("bootstrap", "Bounds with bootstrap intervals for one dataset")->fallthrough();

  std::string input, output, g_terms, ladder_list, method = "Proposed", scenario = "S1", dump_lp, replicate_dump, export_dir;
  std::vector<double> deltas{0.01}, lambdas;
  std::size_t bootstrap_b = 0;
  std::uint64_t seed = 0;

  app.add_option("--input", input, "Input CSV with columns y, z and covariates");
  app.add_option("--delta", deltas, "Positivity parameter(s) in (0, 0.5)")->delimiter(',')->capture_default_str();
  app.add_option("--lambda", lambdas, "Odds-ratio bound(s) >= 1")->delimiter(',');
  app.add_option("--g-terms", g_terms, "Comma separated g(X) terms, e.g. \"1,x1,x2,x1*x2\"");
  app.add_option("--ladder", ladder_list, "Basis ladder level(s) D1..D4, comma separated");
  app.add_option("--method", method, "Proposed, QB or Both")->capture_default_str();
  app.add_option("--bootstrap", bootstrap_b, "Bootstrap replicates B (0: none)");
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--scenario", scenario, "S1 or S2")->capture_default_str();
  app.add_option("--replicates", cfg.replicates, "Simulated studies per setting")->capture_default_str();
  app.add_option("--sample-size", cfg.sample_size, "Units per simulated study")->capture_default_str();
  app.add_option("--true-ate-studies", cfg.true_ate_studies, "Studies pooled for the true ATE")
      ->capture_default_str();
  app.add_option("--output", output, "Report CSV (default: standard output)");
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_flag("--standardize", cfg.analysis.standardize, "Centre and scale covariates before expansion");
  app.add_option("--qb-folds", cfg.analysis.qb_folds, "Cross-fitting folds for QB")->capture_default_str();
  app.add_flag("--qb-delta-box", cfg.analysis.qb_delta_box, "Intersect the QB box with the delta box");
  app.add_option("--dump-lp", dump_lp, "Write the programs of the first setting as text");
  app.add_option("--replicate-dump", replicate_dump, "Per-replicate CSV (bootstrap or simulate)");
  app.add_option("--export-dir", export_dir, "simulate: write each generated study as study_<r>.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw usage(e.what());
  }

  if (bounds->parsed()) cfg.command = Command::Bounds;
  if (simulate->parsed()) cfg.command = Command::Simulate;
  if (boot->parsed()) cfg.command = Command::Bootstrap;

  try {
    if (deltas.empty()) throw usage("--delta needs a value");
    for (const double dl : deltas) {
      if (!(dl > 0.0 && dl < 0.5)) throw usage("--delta must lie in (0, 0.5)");
    }
    for (const double lam : lambdas) {
      if (!(lam >= 1.0)) throw usage("--lambda must be at least 1");
    }
    cfg.deltas = deltas;
    cfg.lambdas = lambdas;
    cfg.sensitivity.delta = deltas.front();
    if (!lambdas.empty()) cfg.sensitivity.lambda = lambdas.front();
    cfg.sensitivity.seed = seed;
    cfg.sensitivity.basis_terms = split_term_list(g_terms);
    if (!cfg.sensitivity.basis_terms.empty()) parse_terms(cfg.sensitivity.basis_terms);
    for (const auto& piece : split_term_list(ladder_list)) cfg.ladders.push_back(parse_ladder(piece));
    if (!cfg.ladders.empty() && !cfg.sensitivity.basis_terms.empty()) {
      throw usage("--ladder and --g-terms are mutually exclusive");
    }
    if (method == "Both" || method == "both") {
      cfg.both_methods = true;
    } else {
      cfg.method = parse_method(method);
    }
    if ((cfg.both_methods || cfg.method == Method::QB) && lambdas.empty()) {
      throw usage("--method QB needs --lambda");
    }
    cfg.scenario = parse_scenario(scenario);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UsageError) throw;
    throw usage(e.what());
  }

  if (cfg.command != Command::Simulate) {
    if (input.empty()) throw usage("--input is required");
    cfg.input = input;
    if (deltas.size() > 1 || lambdas.size() > 1 || cfg.ladders.size() > 1) {
      throw usage("bounds and bootstrap take a single --delta, --lambda and --ladder");
    }
  }
  if (cfg.command == Command::Bootstrap && bootstrap_b == 0) bootstrap_b = 1000;
  cfg.sensitivity.bootstrap_b = bootstrap_b;
  if (cfg.replicates < 1) throw usage("--replicates must be positive");
  if (cfg.analysis.qb_folds < 2) throw usage("--qb-folds must be at least 2");
  if (!output.empty()) cfg.output = output;
  if (!dump_lp.empty()) cfg.dump_lp = dump_lp;
  if (!replicate_dump.empty()) cfg.replicate_dump = replicate_dump;
  if (!export_dir.empty()) cfg.export_dir = export_dir;
  return cfg;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return f;
}

void emit(const std::optional<std::filesystem::path>& path, std::ostream& out, const std::string& text) {
  if (path) {
    auto f = open_output(*path);
    f << text;
  } else {
    out << text;
  }
}

void dump_programs(const RunConfig& cfg, const Dataset& d, const std::filesystem::path& path) {
  const auto basis = resolve_basis(cfg.sensitivity, d.k(), cfg.analysis.add_constant);
  const Dataset data = cfg.analysis.standardize ? d.standardized() : d;
  const auto custom = uses_d4_columns(basis) ? d4_custom_columns(d) : CustomColumns{};
  const auto g = expand(basis, data, custom);
  std::optional<Eigen::VectorXd> ehat;
  if (cfg.sensitivity.lambda) ehat = fit_mar_propensity(data).ehat;
  auto f = open_output(path);
  for (const Arm arm : {Arm::Treated, Arm::Control}) {
    std::vector<Interval> env;
    if (ehat) env = or_envelope(*ehat, *cfg.sensitivity.lambda, arm);
    const auto p = build_polytope(data, g, cfg.sensitivity.delta, arm, env);
    Eigen::VectorXd cost(static_cast<Eigen::Index>(p.indices.size()));
    for (std::size_t j = 0; j < p.indices.size(); ++j) {
      cost[static_cast<Eigen::Index>(j)] = data.y()[static_cast<Eigen::Index>(p.indices[j])] / static_cast<double>(d.n());
    }
    f << "# arm " << to_string(arm) << '\n';
    auto lp = p.program(cost, Sense::Min);
    for (Eigen::Index j = 0; j < lp.lower.size(); ++j) {
      if (lp.lower[j] > lp.upper[j]) lp.upper[j] = lp.lower[j];  // keep crossed boxes writable
    }
    write_lp_text(lp, f);
  }
}

int run_bounds(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  auto sens = cfg.sensitivity;
  const Dataset d = load_csv(cfg.input);
  if (!cfg.ladders.empty()) sens.basis_terms = ladder(cfg.ladders.front(), d.k()).labels();

  std::vector<Method> methods;
  if (cfg.both_methods) {
    methods = {Method::Proposed, Method::QB};
  } else {
    methods = {cfg.method};
  }
  const std::string basis_label =
      !cfg.ladders.empty() ? std::string(to_string(cfg.ladders.front()))
                           : join(resolve_basis(sens, d.k(), cfg.analysis.add_constant).labels());

  std::vector<BoundsRow> rows;
  std::vector<BootstrapSummary> summaries;
  for (const Method m : methods) {
    BoundsRow row;
    row.method = m;
    row.basis = m == Method::QB ? "1,qhat" : basis_label;
    row.delta = sens.delta;
    row.lambda = sens.lambda;
    row.bounds = analyze(d, sens, m, cfg.analysis).bounds;
    if (sens.bootstrap_b > 0) {
      try {
        row.bootstrap = bootstrap_bounds(d, sens, m, cfg.analysis, cfg.threads);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AllReplicatesInfeasible) throw;
        log << "warning: " << e.what() << '\n';
      }
    }
    if (row.bootstrap) summaries.push_back(*row.bootstrap);
    rows.push_back(std::move(row));
  }
  if (cfg.dump_lp) {
    RunConfig c = cfg;
    c.sensitivity = sens;
    dump_programs(c, d, *cfg.dump_lp);
  }
  if (cfg.replicate_dump && !summaries.empty()) {
    auto f = open_output(*cfg.replicate_dump);
    write_replicates_csv(summaries.front(), f);
  }
  std::ostringstream report;
  write_bounds_report(rows, report);
  emit(cfg.output, out, report.str());
  if (!summaries.empty()) log << "percentile rule: " << summaries.front().percentile_rule << '\n';

  for (const auto& r : rows) {
    if (!r.bounds.feasible()) return 2;
  }
  return 0;
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  auto scenario = Scenario::make(cfg.scenario);
  scenario.n = cfg.sample_size;
  scenario.replicates = cfg.replicates;
  const auto seed = cfg.sensitivity.seed;

  std::vector<TableSetting> settings;
  const std::vector<Ladder> ladders = cfg.ladders.empty() ? std::vector<Ladder>{Ladder::D1} : cfg.ladders;
  if (cfg.both_methods || cfg.method == Method::Proposed) {
    auto s = table_settings(Method::Proposed, ladders, cfg.deltas, cfg.both_methods ? std::vector<double>{} : cfg.lambdas);
    settings.insert(settings.end(), s.begin(), s.end());
  }
  if (cfg.both_methods || cfg.method == Method::QB) {
    auto s = table_settings(Method::QB, {}, cfg.deltas, cfg.lambdas);
    settings.insert(settings.end(), s.begin(), s.end());
  }

  const auto truth = true_ate(scenario, cfg.true_ate_studies, seed, cfg.threads);
  log << "true ATE " << format_number(truth.value) << " (MC s.e. " << format_number(truth.standard_error) << ", "
      << truth.units << " units)\n";
  const auto report = run_table(scenario, settings, seed, truth.value, cfg.analysis, cfg.threads);

  std::vector<SimulatedStudy> studies;
  for (std::size_t r = 0; r < scenario.replicates; ++r) studies.push_back(simulate_replicate(scenario, seed, r));
  for (const double dl : cfg.deltas) {
    log << "positivity violations at delta " << format_number(dl) << ": "
        << format_number(positivity_violation_rate(studies, dl)) << '\n';
  }
  if (cfg.export_dir) {
    std::filesystem::create_directories(*cfg.export_dir);
    for (std::size_t r = 0; r < studies.size(); ++r) {
      write_csv(studies[r].dataset, *cfg.export_dir / ("study_" + std::to_string(r) + ".csv"));
    }
  }

  std::ostringstream csv;
  write_simulation_csv(report, csv);
  emit(cfg.output, out, csv.str());
  if (cfg.replicate_dump) {
    auto f = open_output(*cfg.replicate_dump);
    write_replicate_dump(report, f);
  }
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  switch (cfg.command) {
    case Command::Bounds:
    case Command::Bootstrap:
      return run_bounds(cfg, out, log);
    case Command::Simulate:
      return run_simulate(cfg, out, log);
  }
  return 1;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = parse_args(argc, argv, out);
    if (!cfg) return 0;
    return run(*cfg, out, err);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    err << "causal-bounds: " << msg << '\n';
    return 1;
  }
}

}  // namespace cbounds::cli
