#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "esenc/csv.hpp"
#include "esenc/dgps.hpp"
#include "esenc/encompassing.hpp"
#include "esenc/forecast_models.hpp"
#include "esenc/harness.hpp"
#include "esenc/types.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDataError = 2;
constexpr int kExitNumericError = 3;

struct CommonOptions {
  double alpha = 0.025;
  double level = 0.10;
  std::uint64_t seed = 42;
  int restarts = 10;
  double tol = 1e-8;
  int max_evals = 20000;
  double bandwidth = 0.0;
  bool newey_west = false;
  bool lambda_realized_inner = false;
  std::string link = "linear-intercept";
  bool restrict_intercepts = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--alpha", opt.alpha, "Tail probability level")
      ->capture_default_str();
  cmd->add_option("--level", opt.level, "Significance level for decisions")
      ->capture_default_str();
  cmd->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  cmd->add_option("--restarts", opt.restarts,
                  "Perturbed optimizer starts beyond the null anchors")
      ->capture_default_str();
  cmd->add_option("--tol", opt.tol, "Optimizer objective-spread tolerance")
      ->capture_default_str();
  cmd->add_option("--max-evals", opt.max_evals,
                  "Objective evaluation cap per simplex run")
      ->capture_default_str();
  cmd->add_option("--bandwidth", opt.bandwidth,
                  "Kernel density bandwidth (0 = robust-scale rule)")
      ->capture_default_str();
  cmd->add_flag("--newey-west", opt.newey_west,
                "Newey-West correction of the outer-product covariance");
  cmd->add_flag("--lambda-realized-inner", opt.lambda_realized_inner,
                "Keep the realized inner-ES bracket in the curvature estimate");
  cmd->add_option("--link", opt.link,
                  "Combination function: linear-intercept, linear, convex or "
                  "anchored-offset")
      ->capture_default_str();
  cmd->add_flag("--restrict-intercepts", opt.restrict_intercepts,
                "Include intercepts in the null restriction");
}

esenc::enc::TestOptions test_options(const CommonOptions& opt) {
  esenc::enc::TestOptions t;
  t.spec_q = esenc::links::parse_link(opt.link);
  t.spec_e = esenc::links::parse_link(opt.link);
  t.estimation.seed = opt.seed;
  t.estimation.n_restarts = opt.restarts;
  t.estimation.tol = opt.tol;
  t.estimation.max_evals = opt.max_evals;
  t.covariance.bandwidth = opt.bandwidth;
  t.covariance.newey_west = opt.newey_west;
  t.covariance.lambda_realized_inner = opt.lambda_realized_inner;
  t.restrict_intercepts = opt.restrict_intercepts;
  return t;
}

json theta_json(const esenc::Theta& theta) {
  json out;
  out["beta"] = std::vector<double>(theta.beta.data(),
                                    theta.beta.data() + theta.beta.size());
  out["eta"] =
      std::vector<double>(theta.eta.data(), theta.eta.data() + theta.eta.size());
  return out;
}

json report_json(const esenc::enc::TestReport& rep) {
  json out;
  out["statistic"] = rep.statistic;
  out["df"] = rep.df;
  out["p_value"] = rep.p_value;
  out["theta_hat"] = theta_json(rep.theta_hat);
  out["objective"] = rep.objective;
  out["converged"] = rep.converged;
  out["bandwidth"] = rep.bandwidth;
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw esenc::data_error("cannot open '" + path + "' for writing");
  os << content;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& family, double pi, int n, int burn_in,
                 std::uint64_t seed, bool escaviar_flip,
                 const std::string& out_path) {
  esenc::dgp::DgpSpec spec;
  spec.family = esenc::dgp::parse_family(family);
  spec.pi = pi;
  spec.n = n;
  spec.burn_in = burn_in;
  spec.seed = seed;
  spec.escaviar_update_on_violations = escaviar_flip;
  const esenc::ForecastSet fs = esenc::dgp::simulate(spec);

  std::ostringstream os;
  esenc::csv::write_forecast_csv(os, fs.y(), fs.q1(), fs.q2(), fs.e1(), fs.e2());
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_text_file(out_path, os.str());
  }
  return kExitOk;
}

int cmd_test(const std::string& input, const std::string& variant_name,
             const std::string& direction, const CommonOptions& opt,
             const std::string& out_path) {
  const esenc::csv::Table table = esenc::csv::read_table_file(input);
  const Eigen::VectorXd y = table.vector("y");
  const Eigen::VectorXd e1 = table.vector("e1");
  const Eigen::VectorXd e2 = table.vector("e2");
  std::optional<Eigen::VectorXd> q1, q2;
  if (table.has_column("q1") || table.has_column("q2")) {
    q1 = table.vector("q1");
    q2 = table.vector("q2");
  }

  const esenc::enc::TestVariant variant = esenc::enc::parse_variant(variant_name);
  if (variant != esenc::enc::TestVariant::StrictES && !q1.has_value()) {
    throw esenc::data_error(variant_name + " test requires VaR forecasts");
  }

  const esenc::ForecastSet fs(y, q1, q2, e1, e2, esenc::ProbLevel(opt.alpha));
  const esenc::enc::TestOptions topt = test_options(opt);

  json out;
  out["schema"] = 1;
  out["alpha"] = opt.alpha;
  out["level"] = opt.level;
  out["variant"] = variant_name;
  out["direction"] = direction;
  if (direction == "both") {
    const auto [h01, h02] = esenc::enc::run_both(fs, variant, topt);
    out["h01"] = report_json(h01);
    out["h02"] = report_json(h02);
    const esenc::enc::Decision d =
        esenc::enc::decide(h01.p_value, h02.p_value, opt.level, h01.theta_hat);
    json dj;
    dj["outcome"] = esenc::enc::outcome_name(d.outcome);
    if (d.combined_weights) dj["combined_weights"] = theta_json(*d.combined_weights);
    out["decision"] = dj;
  } else {
    const esenc::enc::Direction dir = direction == "h01"
                                          ? esenc::enc::Direction::H01
                                          : esenc::enc::Direction::H02;
    out[direction] = report_json(esenc::enc::run_test(fs, variant, dir, topt));
  }

  const std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
  return kExitOk;
}

int cmd_matrix(const std::string& input, int m,
               const std::vector<std::string>& model_names,
               const CommonOptions& opt, int workers,
               const std::string& out_dir) {
  const esenc::csv::Table table = esenc::csv::read_table_file(input);
  const Eigen::VectorXd returns = table.vector("y");

  std::vector<esenc::fc::ModelSpec> models;
  for (const auto& name : model_names) {
    esenc::fc::ModelSpec spec;
    spec.kind = esenc::fc::parse_model(name);
    spec.alpha = opt.alpha;
    models.push_back(spec);
  }

  esenc::fc::PairwiseOptions popt;
  popt.test = test_options(opt);
  popt.level = opt.level;
  popt.fit.seed = opt.seed;
  popt.n_workers = workers;
  const esenc::fc::PairwiseResult result =
      esenc::fc::pairwise_matrix(returns, m, models, popt);

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> labels;
  for (const auto& mspec : models) labels.push_back(esenc::fc::model_name(mspec.kind));

  for (const auto& [variant, pvalues] : result.pvalues) {
    std::ostringstream os;
    esenc::csv::write_matrix_csv(os, labels, pvalues);
    write_text_file(out_dir + "/pvalues_" + esenc::enc::variant_name(variant) +
                        ".csv",
                    os.str());
  }

  std::ostringstream outcomes;
  outcomes << "variant,model,NR,E1,E2,C\n";
  for (const auto& [variant, freq] : result.outcome_freq) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      outcomes << esenc::enc::variant_name(variant) << ',' << labels[i];
      for (int c = 0; c < 4; ++c) {
        outcomes << ',' << esenc::csv::format_double(freq(i, c));
      }
      outcomes << '\n';
    }
  }
  write_text_file(out_dir + "/outcomes.csv", outcomes.str());

  std::ostringstream na;
  na << "model_i,model_j,reason\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (!result.na_reason[i][j].empty() && i < j) {
        std::string reason = result.na_reason[i][j];
        for (auto& ch : reason) {
          if (ch == ',' || ch == '\n') ch = ';';
        }
        na << labels[i] << ',' << labels[j] << ',' << reason << '\n';
      }
    }
  }
  write_text_file(out_dir + "/na_reasons.csv", na.str());
  return kExitOk;
}

int cmd_mc(const std::string& family, const std::vector<int>& n_grid,
           const std::vector<double>& pi_grid, int reps,
           const std::vector<double>& levels,
           const std::vector<std::string>& variant_names, int burn_in,
           const CommonOptions& opt, int workers, bool escaviar_flip,
           const std::string& out_path) {
  esenc::mc::ExperimentPlan plan;
  plan.family = esenc::dgp::parse_family(family);
  plan.n_grid = n_grid;
  plan.pi_grid = pi_grid;
  plan.n_reps = reps;
  if (!levels.empty()) plan.levels = levels;
  plan.variants.clear();
  for (const auto& v : variant_names) {
    plan.variants.push_back(esenc::enc::parse_variant(v));
  }
  plan.burn_in = burn_in;
  plan.base_seed = opt.seed;
  plan.test_options = test_options(opt);
  plan.n_workers = workers;
  plan.escaviar_update_on_violations = escaviar_flip;

  const esenc::mc::ResultTable table = esenc::mc::run_plan(
      plan, [](const std::string& msg) { std::cerr << msg << "\n"; });

  std::ostringstream os;
  table.write_csv(os);
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_text_file(out_path, os.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecast encompassing tests for Expected Shortfall and "
               "Value-at-Risk forecasts"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI config file (one [subcommand] section per command)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a path from one of the "
                                             "simulation designs");
  sim->fallthrough(true);
  std::string sim_family = "garch";
  double sim_pi = 0.0;
  int sim_n = 1000;
  int sim_burn = 1000;
  std::uint64_t sim_seed = 1;
  bool sim_flip = false;
  std::string sim_out;
  sim->add_option("--family", sim_family,
                  "garch, gas-t, vares-gas or es-caviar")
      ->capture_default_str();
  sim->add_option("--pi", sim_pi, "Combination weight in [0,1]")
      ->capture_default_str();
  sim->add_option("--n", sim_n, "Path length")->capture_default_str();
  sim->add_option("--burn-in", sim_burn, "Discarded warm-up steps")
      ->capture_default_str();
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_flag("--escaviar-update-on-violations", sim_flip,
                "Flip the ES-CAViaR offset update to violation days");
  sim->add_option("--out", sim_out, "Output CSV path (default: stdout)");

  // test
  auto* test = app.add_subcommand("test", "Run one encompassing test on a "
                                          "forecast CSV");
  test->fallthrough(true);
  std::string test_input, test_variant = "strict", test_direction = "both",
              test_out;
  CommonOptions test_opt;
  test->add_option("--input", test_input, "CSV with columns t,y[,q1],e1[,q2],e2")
      ->required();
  test->add_option("--variant", test_variant, "joint, aux, strict or var")
      ->capture_default_str();
  test->add_option("--direction", test_direction, "h01, h02 or both")
      ->check(CLI::IsMember({"h01", "h02", "both"}))
      ->capture_default_str();
  test->add_option("--out", test_out, "JSON report path (default: stdout)");
  add_common(test, test_opt);

  // matrix
  auto* matrix = app.add_subcommand("matrix", "Pairwise encompassing tests "
                                              "over the forecasting models");
  matrix->fallthrough(true);
  std::string matrix_input, matrix_out = "matrix_out";
  int matrix_m = 1000;
  int matrix_workers = 0;
  std::vector<std::string> matrix_models = {
      "histsim",  "riskmetrics", "gjr-garch-t",  "gas-t",
      "gas-1f",   "gas-2f",      "es-caviar-as", "es-caviar-sav"};
  CommonOptions matrix_opt;
  matrix->add_option("--input", matrix_input, "CSV with columns t,y")->required();
  matrix->add_option("--m", matrix_m, "In-sample size")->capture_default_str();
  matrix->add_option("--models", matrix_models, "Forecasting models")
      ->delimiter(',')
      ->capture_default_str();
  matrix->add_option("--workers", matrix_workers,
                     "Worker threads (0 = logical cores)")
      ->capture_default_str();
  matrix->add_option("--out-dir", matrix_out, "Output directory")
      ->capture_default_str();
  add_common(matrix, matrix_opt);

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo size/power experiment");
  mc->fallthrough(true);
  std::string mc_family = "garch", mc_out;
  std::vector<int> mc_n_grid = {1000};
  std::vector<double> mc_pi_grid = {0.0};
  std::vector<double> mc_levels = {0.01, 0.05, 0.10};
  std::vector<std::string> mc_variants = {"strict", "aux", "joint", "var"};
  int mc_reps = 500;
  int mc_burn = 1000;
  int mc_workers = 0;
  bool mc_flip = false;
  CommonOptions mc_opt;
  mc->add_option("--family", mc_family, "garch, gas-t, vares-gas or es-caviar")
      ->capture_default_str();
  mc->add_option("--n-grid", mc_n_grid, "Sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--pi-grid", mc_pi_grid, "Combination weights")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--reps", mc_reps, "Replications per cell")
      ->capture_default_str();
  mc->add_option("--levels", mc_levels, "Nominal sizes")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--variants", mc_variants, "Tests to run")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--burn-in", mc_burn, "Discarded warm-up steps")
      ->capture_default_str();
  mc->add_option("--workers", mc_workers, "Worker threads (0 = logical cores)")
      ->capture_default_str();
  mc->add_flag("--escaviar-update-on-violations", mc_flip,
               "Flip the ES-CAViaR offset update to violation days");
  mc->add_option("--out", mc_out, "Results CSV path (default: stdout)");
  add_common(mc, mc_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(sim_family, sim_pi, sim_n, sim_burn, sim_seed,
                          sim_flip, sim_out);
    }
    if (test->parsed()) {
      return cmd_test(test_input, test_variant, test_direction, test_opt,
                      test_out);
    }
    if (matrix->parsed()) {
      return cmd_matrix(matrix_input, matrix_m, matrix_models, matrix_opt,
                        matrix_workers, matrix_out);
    }
    if (mc->parsed()) {
      return cmd_mc(mc_family, mc_n_grid, mc_pi_grid, mc_reps, mc_levels,
                    mc_variants, mc_burn, mc_opt, mc_workers, mc_flip, mc_out);
    }
  } catch (const esenc::data_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitDataError;
  } catch (const esenc::numeric_error& ex) {
    std::cerr << "numeric error: " << ex.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}
