#include "esenc/harness.hpp"

#include <cmath>

#include "esenc/csv.hpp"
#include "esenc/parallel.hpp"
#include "esenc/rng.hpp"

namespace esenc::mc {

int CellResult::failures() const {
  int out = 0;
  for (const auto& r : reps) out += r.failed ? 1 : 0;
  return out;
}

double CellResult::rejection_rate(enc::TestVariant variant,
                                  enc::Direction direction,
                                  double level) const {
  int rejects = 0;
  int effective = 0;
  for (const auto& r : reps) {
    if (r.failed) continue;
    const auto it = r.reports.find(variant);
    if (it == r.reports.end()) continue;
    ++effective;
    const enc::TestReport& rep =
        direction == enc::Direction::H01 ? it->second.first : it->second.second;
    rejects += (rep.p_value <= level) ? 1 : 0;
  }
  if (effective == 0) return std::nan("");
  return double(rejects) / double(effective);
}

CellResult run_cell(const ExperimentPlan& plan, int n, double pi,
                    std::uint64_t cell_index) {
  CellResult cell;
  cell.n = n;
  cell.pi = pi;
  cell.reps.resize(plan.n_reps);
  parallel_for(plan.n_reps, plan.n_workers, [&](int r) {
    RepResult& out = cell.reps[r];
    try {
      dgp::DgpSpec spec;
      spec.family = plan.family;
      spec.pi = pi;
      spec.n = n;
      spec.burn_in = plan.burn_in;
      spec.seed = stream_key(plan.base_seed, cell_index, std::uint64_t(r));
      spec.escaviar_update_on_violations = plan.escaviar_update_on_violations;
      const ForecastSet fs = dgp::simulate(spec);
      enc::TestOptions topt = plan.test_options;
      topt.estimation.seed = stream_key(spec.seed, 0x7E57u);
      out.reports = enc::run_suite(fs, plan.variants, topt);
    } catch (const std::exception& ex) {
      out.failed = true;
      out.error = ex.what();
    }
  });
  return cell;
}

void ResultTable::write_csv(std::ostream& os) const {
  os << "dgp,n,pi,variant,direction,level,freq,se,failures\n";
  for (const auto& row : rows) {
    os << dgp::family_name(row.family) << ',' << row.n << ','
       << csv::format_double(row.pi) << ',' << enc::variant_name(row.variant)
       << ',' << enc::direction_name(row.direction) << ','
       << csv::format_double(row.level) << ',' << csv::format_double(row.freq)
       << ',' << csv::format_double(row.se) << ',' << row.failures << '\n';
  }
}

ResultTable run_plan(const ExperimentPlan& plan, const ProgressFn& progress) {
  if (plan.n_reps < 1) throw data_error("replication count must be at least 1");
  if (plan.n_grid.empty() || plan.pi_grid.empty() || plan.levels.empty()) {
    throw data_error("experiment grids must be non-empty");
  }
  ResultTable table;
  std::uint64_t cell_index = 0;
  for (int n : plan.n_grid) {
    for (double pi : plan.pi_grid) {
      const CellResult cell = run_cell(plan, n, pi, cell_index);
      const int failures = cell.failures();
      if (failures > 0.2 * plan.n_reps) {
        throw numeric_error(
            "more than 20% of replications failed in cell (" +
            dgp::family_name(plan.family) + ", n=" + std::to_string(n) +
            ", pi=" + csv::format_double(pi) + "): " +
            (cell.reps.empty() ? "" : cell.reps.front().error));
      }
      const int effective = plan.n_reps - failures;
      for (auto variant : plan.variants) {
        for (auto direction : {enc::Direction::H01, enc::Direction::H02}) {
          for (double level : plan.levels) {
            ResultRow row;
            row.family = plan.family;
            row.n = n;
            row.pi = pi;
            row.variant = variant;
            row.direction = direction;
            row.level = level;
            row.freq = cell.rejection_rate(variant, direction, level);
            row.se = effective > 0
                         ? std::sqrt(row.freq * (1.0 - row.freq) / effective)
                         : std::nan("");
            row.failures = failures;
            table.rows.push_back(row);
          }
        }
      }
      if (progress) {
        progress("cell " + dgp::family_name(plan.family) +
                 " n=" + std::to_string(n) + " pi=" + csv::format_double(pi) +
                 " done (" + std::to_string(failures) + " failures)");
      }
      ++cell_index;
    }
  }
  return table;
}

}  // namespace esenc::mc
