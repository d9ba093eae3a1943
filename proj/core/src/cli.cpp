#include "loglin/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "loglin/json_io.hpp"

namespace loglin {
namespace {

constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kNoConvergence = 2;
constexpr int kIoError = 3;

struct FitArgs {
  std::string table_path;
  double lambda = 0.0;
  std::string block_weights = "sqrt-dim";
  double tol = 1e-7;
  int max_iter = 50000;
  std::string out_path;
};

void add_fit_flags(CLI::App& cmd, FitArgs& args) {
  cmd.add_option("--table", args.table_path, "Contingency table JSON")->required();
  cmd.add_option("--lambda", args.lambda, "Penalty level")->required();
  cmd.add_option("--block-weights", args.block_weights, "Block weight rule")
      ->check(CLI::IsMember({"sqrt-dim", "unit"}));
  cmd.add_option("--tol", args.tol, "Subgradient certificate tolerance");
  cmd.add_option("--max-iter", args.max_iter, "Iteration cap");
  cmd.add_option("--out", args.out_path, "Output path (stdout if omitted)");
}

PenaltyConfig make_penalty(const FitArgs& args) {
  PenaltyConfig penalty;
  penalty.lambda = args.lambda;
  penalty.rule = args.block_weights == "unit" ? PenaltyConfig::WeightRule::kUnit
                                              : PenaltyConfig::WeightRule::kSqrtDim;
  return penalty;
}

void write_output(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    save_json(j, out_path);
  }
}

int run_fit(const FitArgs& args, bool facets_only) {
  const ContingencyTable table = load_table(args.table_path);
  const Design design = saturated_design(table.shape);
  SolverConfig solver;
  solver.kkt_tol = args.tol;
  solver.max_iter = args.max_iter;
  const FitResult result = fit(design, table, make_penalty(args), solver);
  if (facets_only) {
    write_output(facets_to_json(result.selected), args.out_path);
  } else {
    write_output(fit_result_to_json(result, design), args.out_path);
  }
  if (!result.converged) {
    std::cerr << "solver did not reach the certificate tolerance within "
              << args.max_iter << " iterations (worst residual "
              << result.kkt.worst << ")\n";
    return kNoConvergence;
  }
  return kOk;
}

int run_simulate(const std::string& scenario_path, const std::string& out_path, bool timings) {
  const Scenario scenario = scenario_from_json(load_json(scenario_path));
  const SimulationSummary summary = run_scenario(scenario);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  emit_csv(summary, out, timings);
  if (!out) throw std::runtime_error("write to " + out_path + " failed");
  return kOk;
}

void dump_design_csv(const Design& design, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "cell";
  for (std::size_t b = 0; b < design.block_count(); ++b) {
    const auto& block = design.block(b);
    for (long j = 0; j < block.matrix.cols(); ++j) {
      out << ",\"" << block.subset.key() << "[" << j << "]\"";
    }
  }
  out << "\n";
  const Eigen::MatrixXd dense = design.dense();
  for (long i = 0; i < dense.rows(); ++i) {
    out << i;
    for (long j = 0; j < dense.cols(); ++j) out << ',' << dense(i, j);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

int run_check(const std::string& table_path, const std::vector<int>& shape_levels, double N,
              const std::string& theta0_path, double lambda, const std::string& block_weights,
              double eps, const std::string& dump_path) {
  TableShape shape({2});
  if (!table_path.empty()) {
    const ContingencyTable table = load_table(table_path);
    shape = table.shape;
    N = table.total();
  } else if (!shape_levels.empty()) {
    shape = TableShape(shape_levels);
  } else {
    std::cerr << "check requires --table or --shape\n";
    return kUsageError;
  }

  if (!dump_path.empty()) {
    dump_design_csv(saturated_design(shape), dump_path);
    return kOk;
  }

  if (theta0_path.empty()) {
    std::cerr << "check requires --theta0 (or --dump-design)\n";
    return kUsageError;
  }
  if (table_path.empty() && N <= 0.0) {
    std::cerr << "check with --shape requires --N\n";
    return kUsageError;
  }

  const nlohmann::json spec = load_json(theta0_path);
  const SimplicialComplex delta0 = facets_from_json(spec.at("facets"), shape.K());
  const InteractionClass cls = downward_closure(delta0);
  const auto& theta0_json = spec.at("theta0");
  BlockedVector theta0;
  for (const auto& h : cls.sets()) {
    if (!theta0_json.contains(h.key())) {
      throw std::invalid_argument("theta0 is missing block \"" + h.key() + "\"");
    }
    const auto block = theta0_json.at(h.key()).get<std::vector<double>>();
    theta0.blocks.emplace_back(Eigen::Map<const Eigen::VectorXd>(block.data(), block.size()));
  }

  const Design model_design = assemble_design(shape, cls);
  const Eigen::VectorXd pi0 = mean_map(model_design, theta0, 1.0).pi;

  PenaltyConfig penalty;
  penalty.lambda = lambda;
  penalty.rule = block_weights == "unit" ? PenaltyConfig::WeightRule::kUnit
                                         : PenaltyConfig::WeightRule::kSqrtDim;
  const ConditionReport report =
      condition_report(saturated_design(shape), pi0, theta0, cls, N, penalty, eps);
  std::cout << condition_report_to_json(report).dump(2) << '\n';
  return kOk;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Group-lasso model selection for multinomial contingency tables"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a penalized log-linear model");
  add_fit_flags(*fit_cmd, fit_args);

  FitArgs select_args;
  CLI::App* select_cmd = app.add_subcommand("select", "Fit and print the selected facets");
  add_fit_flags(*select_cmd, select_args);

  std::string scenario_path;
  std::string csv_path;
  bool timings = false;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a Monte-Carlo scenario");
  sim_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  sim_cmd->add_option("--out", csv_path, "Summary CSV path")->required();
  sim_cmd->add_flag("--timings", timings, "Record wall time per rung (breaks determinism)");

  std::string check_table;
  std::vector<int> check_shape;
  double check_n = 0.0;
  std::string theta0_path;
  double check_lambda = 0.0;
  std::string check_weights = "sqrt-dim";
  double eps = 0.1;
  std::string dump_path;
  CLI::App* check_cmd = app.add_subcommand("check", "Report asymptotic-regime diagnostics");
  check_cmd->add_option("--table", check_table, "Contingency table JSON");
  check_cmd->add_option("--shape", check_shape, "Level counts, e.g. --shape 2 2 2");
  check_cmd->add_option("--N", check_n, "Sample size (with --shape)");
  check_cmd->add_option("--theta0", theta0_path, "JSON with facets and theta0 blocks");
  check_cmd->add_option("--lambda", check_lambda, "Penalty level");
  check_cmd->add_option("--block-weights", check_weights, "Block weight rule")
      ->check(CLI::IsMember({"sqrt-dim", "unit"}));
  check_cmd->add_option("--eps", eps, "Slack in the irrepresentability bounds");
  check_cmd->add_option("--dump-design", dump_path, "Write the saturated design matrix as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kOk : kUsageError;
  } catch (const CLI::ParseError& e) {
    std::ostringstream usage;
    usage << e.what() << '\n' << app.help();
    std::cerr << usage.str();
    return kUsageError;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_args, /*facets_only=*/false);
    if (select_cmd->parsed()) return run_fit(select_args, /*facets_only=*/true);
    if (sim_cmd->parsed()) return run_simulate(scenario_path, csv_path, timings);
    return run_check(check_table, check_shape, check_n, theta0_path, check_lambda, check_weights,
                     eps, dump_path);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kUsageError;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace loglin
