#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "esenc/encompassing.hpp"
#include "esenc/types.hpp"

namespace esenc::fc {

enum class ModelKind {
  HistSim,
  RiskMetrics,
  GjrGarchT,
  GasT,
  Gas1F,
  Gas2F,
  EsCaviarAS,
  EsCaviarSAV,
};

std::string model_name(ModelKind kind);
ModelKind parse_model(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::RiskMetrics;
  int window = 250;  // HistSim only
  double alpha = 0.025;
};

struct FitOptions {
  std::uint64_t seed = 7;
  int n_starts = 5;
  double tol = 1e-8;
  int max_evals = 20000;
};

struct FittedModel {
  ModelSpec spec;
  Eigen::VectorXd params;
  bool converged = true;
  double objective = 0.0;
};

//! Estimates model parameters on the in-sample window.  HistSim and
//! RiskMetrics carry fixed parameters; GJR-GARCH-t and GAS-t are fit by
//! maximum likelihood; the VaR/ES GAS and ES-CAViaR models by minimizing the
//! mean FZ0 loss, all with the multi-start simplex optimizer.
FittedModel fit(const ModelSpec& spec, const Eigen::VectorXd& insample,
                const FitOptions& options = {});

//! One-step-ahead (VaR, ES) forecasts under a fixed scheme: parameters are
//! frozen at the in-sample fit, recursions roll forward over realized
//! returns.  Element j of the output forecasts returns[m + j].
std::pair<Eigen::VectorXd, Eigen::VectorXd> forecast_path(
    const FittedModel& fitted, const Eigen::VectorXd& returns, int m);

struct PairwiseOptions {
  enc::TestOptions test;
  double level = 0.10;
  std::vector<enc::TestVariant> variants = {
      enc::TestVariant::JointVaRES, enc::TestVariant::VaR,
      enc::TestVariant::AuxES, enc::TestVariant::StrictES};
  FitOptions fit;
  int n_workers = 0;  // 0 = hardware concurrency
};

struct PairwiseResult {
  std::vector<ModelSpec> models;
  //! p-value of "model i encompasses model j" in cell (i, j); NaN on the
  //! diagonal and for failed pairs.
  std::map<enc::TestVariant, Eigen::MatrixXd> pvalues;
  //! Relative outcome frequencies {NR, E1, E2, C} per model row.
  std::map<enc::TestVariant, Eigen::MatrixX4d> outcome_freq;
  //! Failure reason per unordered pair, empty when the pair ran.
  std::vector<std::vector<std::string>> na_reason;
};

//! Fits every model, rolls out the forecasts and runs all pair-wise
//! encompassing tests.  Per-pair failures are recorded and skipped.
PairwiseResult pairwise_matrix(const Eigen::VectorXd& returns, int m,
                               const std::vector<ModelSpec>& models,
                               const PairwiseOptions& options = {});

}  // namespace esenc::fc
