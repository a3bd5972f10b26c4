#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "esenc/dgps.hpp"
#include "esenc/encompassing.hpp"

namespace esenc::mc {

struct ExperimentPlan {
  dgp::DgpFamily family = dgp::DgpFamily::GarchCombo;
  int burn_in = 1000;
  std::vector<int> n_grid = {1000};
  std::vector<double> pi_grid = {0.0};
  int n_reps = 500;
  std::vector<double> levels = {0.01, 0.05, 0.10};
  std::vector<enc::TestVariant> variants = {
      enc::TestVariant::StrictES, enc::TestVariant::AuxES,
      enc::TestVariant::JointVaRES, enc::TestVariant::VaR};
  std::uint64_t base_seed = 1;
  enc::TestOptions test_options;
  int n_workers = 0;  // 0 = hardware concurrency
  bool escaviar_update_on_violations = false;
};

struct RepResult {
  bool failed = false;
  std::string error;
  std::map<enc::TestVariant, std::pair<enc::TestReport, enc::TestReport>> reports;
};

struct CellResult {
  int n = 0;
  double pi = 0.0;
  std::vector<RepResult> reps;

  int failures() const;
  //! Rejection frequency of the given null among non-failed replications.
  double rejection_rate(enc::TestVariant variant, enc::Direction direction,
                        double level) const;
};

//! Runs all replications of one (n, pi) cell in parallel.  Replication r
//! draws from the stream hash(base_seed, cell_index, r), so results do not
//! depend on the worker count.
CellResult run_cell(const ExperimentPlan& plan, int n, double pi,
                    std::uint64_t cell_index);

struct ResultRow {
  dgp::DgpFamily family;
  int n;
  double pi;
  enc::TestVariant variant;
  enc::Direction direction;
  double level;
  double freq;
  double se;
  int failures;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  void write_csv(std::ostream& os) const;
};

using ProgressFn = std::function<void(const std::string&)>;

//! Full size/power table over the n and pi grids.  Aborts when more than 20%
//! of a cell's replications fail.
ResultTable run_plan(const ExperimentPlan& plan, const ProgressFn& progress = {});

}  // namespace esenc::mc
