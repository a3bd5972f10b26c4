// Acceptance suite: ten end-to-end checks of the statistical properties the
// library is built to deliver, printed one PASS/FAIL line each.  Monte Carlo
// campaigns are shared between checks, so the expensive cells run once.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "esenc/csv.hpp"
#include "esenc/dgps.hpp"
#include "esenc/encompassing.hpp"
#include "esenc/estimation.hpp"
#include "esenc/harness.hpp"
#include "esenc/links.hpp"
#include "esenc/parallel.hpp"
#include "esenc/rng.hpp"
#include "esenc/scoring.hpp"
#include "esenc/special.hpp"

using namespace esenc;

namespace {

struct Options {
  std::string cli;
  std::string workdir = "acceptance_work";
  int workers = 0;
  std::uint64_t seed = 20250801;
};

int g_failures = 0;

void report(int id, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void progress(const std::string& msg) {
  std::cerr << "  ... " << msg << "\n";
  std::cerr.flush();
}

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * x);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared Monte Carlo campaigns.
// ---------------------------------------------------------------------------

struct CellKey {
  dgp::DgpFamily family;
  int n;
  double pi;
  bool operator<(const CellKey& other) const {
    return std::tie(family, n, pi) <
           std::tie(other.family, other.n, other.pi);
  }
};

class Campaigns {
public:
  explicit Campaigns(const Options& opt) : opt_(opt) {}

  const mc::CellResult& cell(dgp::DgpFamily family, int n, double pi,
                             const std::vector<enc::TestVariant>& variants) {
    const CellKey key{family, n, pi};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    mc::ExperimentPlan plan;
    plan.family = family;
    plan.n_grid = {n};
    plan.pi_grid = {pi};
    plan.n_reps = 500;
    plan.variants = variants;
    plan.base_seed = opt_.seed;
    plan.n_workers = opt_.workers;
    const auto t0 = std::chrono::steady_clock::now();
    // Cell index keyed on the cell itself so cached cells are reproducible
    // no matter which criterion requests them first.
    const std::uint64_t cell_index =
        stream_key(static_cast<std::uint64_t>(family) + 1, n,
                   static_cast<std::uint64_t>(pi * 1000));
    mc::CellResult result = mc::run_cell(plan, n, pi, cell_index);
    progress("cell " + dgp::family_name(family) + " n=" + std::to_string(n) +
             " pi=" + csv::format_double(pi) + ": " +
             std::to_string(result.failures()) + " failures, " +
             std::to_string(int(wall_seconds(t0))) + "s");
    return cache_.emplace(key, std::move(result)).first->second;
  }

private:
  Options opt_;
  std::map<CellKey, mc::CellResult> cache_;
};

enc::Direction true_null_direction(double pi) {
  return pi == 0.0 ? enc::Direction::H01 : enc::Direction::H02;
}

// ---------------------------------------------------------------------------
// Criterion 1: psi matches finite differences of the composed objective.
// ---------------------------------------------------------------------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto spec = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  CounterRng rng(987654);
  int checked = 0;
  int bad = 0;
  double worst = 0.0;
  while (checked < 10000) {
    const double qf1 = -0.5 - 2.5 * rng.next_uniform();
    const double qf2 = -0.5 - 2.5 * rng.next_uniform();
    const double ef1 = qf1 - 0.5 - rng.next_uniform();
    const double ef2 = qf2 - 0.5 - rng.next_uniform();
    const double y = 6.0 * rng.next_uniform() - 4.0;
    Eigen::VectorXd theta(6);
    theta << 0.2 * rng.next_uniform() - 0.1, 0.7 + 0.6 * rng.next_uniform(),
        0.4 * rng.next_uniform() - 0.2, 0.2 * rng.next_uniform() - 0.1,
        0.7 + 0.6 * rng.next_uniform(), 0.4 * rng.next_uniform() - 0.2;
    const double alpha = 0.025;
    const double gq = links::link_value(spec, qf1, qf2, theta.head(3));
    const double ge = links::link_value(spec, ef1, ef2, theta.tail(3));
    if (!(ge < 0.0) || std::abs(y - gq) <= 1e-5) continue;
    ++checked;

    const auto v =
        scoring::psi(y, gq, ge, links::link_gradient(spec, qf1, qf2, theta.head(3)),
                     links::link_gradient(spec, ef1, ef2, theta.tail(3)), alpha);
    Eigen::VectorXd analytic(6);
    analytic << v.psi_q, v.psi_e;
    auto composed = [&](const Eigen::VectorXd& th) {
      return scoring::fz0_loss(
          y, links::link_value(spec, qf1, qf2, th.head(3)),
          links::link_value(spec, ef1, ef2, th.tail(3)), alpha);
    };
    const double h = 1e-7;
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd up = theta, dn = theta;
      up[i] += h;
      dn[i] -= h;
      const double fd = (composed(up) - composed(dn)) / (2.0 * h);
      const double rel =
          std::abs(analytic[i] - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      if (rel > 1e-5) ++bad;
    }
  }
  const double secs = wall_seconds(t0);
  report(1, bad == 0 && secs < 10.0,
         "psi matches finite differences at 10^4 feasible points",
         "worst relative error " + csv::format_double(worst) + ", " +
             std::to_string(int(secs)) + "s");
}

// ---------------------------------------------------------------------------
// Criterion 2: empirical FZ0 grid minimization selects the normal tail cell.
// ---------------------------------------------------------------------------

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 1000000;
  std::vector<double> y(n);
  CounterRng rng(24601);
  for (int i = 0; i < n; ++i) y[i] = rng.next_normal();
  std::sort(y.begin(), y.end());
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];

  const double alpha = 0.025;
  auto mean_loss = [&](double q, double e) {
    // mean fz0 = -1 + q/e - A(q)/(alpha e) + log(-e),
    // A(q) = mean((q - Y) 1{Y <= q})
    const auto it = std::upper_bound(y.begin(), y.end(), q);
    const auto cnt = double(it - y.begin());
    const double a = (cnt * q - prefix[std::size_t(it - y.begin())]) / n;
    return -1.0 + q / e - a / (alpha * e) + std::log(-e);
  };

  double best = 1e300, best_q = 0, best_e = 0;
  for (int iq = 0; iq <= 40; ++iq) {
    const double q = -2.15 + 0.01 * iq;
    for (int ie = 0; ie <= 40; ++ie) {
      const double e = -2.55 + 0.01 * ie;
      if (!(e < q)) continue;
      const double value = mean_loss(q, e);
      if (value < best) {
        best = value;
        best_q = q;
        best_e = e;
      }
    }
  }
  const double secs = wall_seconds(t0);
  const bool pass = std::abs(best_q - (-1.96)) < 1e-9 &&
                    std::abs(best_e - (-2.34)) < 1e-9 && secs < 60.0;
  report(2, pass, "FZ0 grid minimum sits in the normal-tail cell",
         "argmin (" + csv::format_double(best_q) + ", " +
             csv::format_double(best_e) + "), target cell (-1.96, -2.34), " +
             std::to_string(int(secs)) + "s");
}

// ---------------------------------------------------------------------------
// Criterion 3: strict and auxiliary tests are well-sized at n = 4000.
// ---------------------------------------------------------------------------

void criterion_3(Campaigns& campaigns) {
  const std::vector<enc::TestVariant> variants = {enc::TestVariant::StrictES,
                                                  enc::TestVariant::AuxES};
  bool pass = true;
  std::string detail;
  for (auto family :
       {dgp::DgpFamily::GarchCombo, dgp::DgpFamily::GasTCombo,
        dgp::DgpFamily::VarEsGasCombo, dgp::DgpFamily::EsCaviarCombo}) {
    for (double pi : {0.0, 1.0}) {
      const auto& cell = campaigns.cell(family, 4000, pi, variants);
      const auto dir = true_null_direction(pi);
      for (auto variant : variants) {
        const double r5 = cell.rejection_rate(variant, dir, 0.05);
        const double r10 = cell.rejection_rate(variant, dir, 0.10);
        const bool ok = r5 >= 0.02 && r5 <= 0.09 && r10 >= 0.06 && r10 <= 0.15;
        pass &= ok;
        if (!ok) {
          detail += dgp::family_name(family) + " pi=" + csv::format_double(pi) +
                    " " + enc::variant_name(variant) + " " + pct(r5) + "/" +
                    pct(r10) + "; ";
        }
      }
    }
  }
  if (detail.empty()) detail = "all 16 size checks inside [2,9]%/[6,15]%";
  report(3, pass, "strict and auxiliary ES tests are well-sized at n=4000",
         detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: size distortion ordering at n = 1000.
// ---------------------------------------------------------------------------

void criterion_4(Campaigns& campaigns) {
  const std::vector<enc::TestVariant> variants = {enc::TestVariant::StrictES,
                                                  enc::TestVariant::JointVaRES,
                                                  enc::TestVariant::VaR};
  double sum_strict = 0.0, sum_joint = 0.0, sum_var = 0.0;
  int cells = 0;
  for (auto family :
       {dgp::DgpFamily::GarchCombo, dgp::DgpFamily::GasTCombo,
        dgp::DgpFamily::VarEsGasCombo, dgp::DgpFamily::EsCaviarCombo}) {
    for (double pi : {0.0, 1.0}) {
      const auto& cell = campaigns.cell(family, 1000, pi, variants);
      const auto dir = true_null_direction(pi);
      sum_strict += cell.rejection_rate(enc::TestVariant::StrictES, dir, 0.05);
      sum_joint += cell.rejection_rate(enc::TestVariant::JointVaRES, dir, 0.05);
      sum_var += cell.rejection_rate(enc::TestVariant::VaR, dir, 0.05);
      ++cells;
    }
  }
  const double mean_strict = sum_strict / cells;
  const double mean_joint = sum_joint / cells;
  const double mean_var = sum_var / cells;
  const bool pass =
      mean_var >= mean_joint && mean_joint >= mean_strict - 0.02;
  report(4, pass,
         "size ordering var >= joint >= strict - 2pp at n=1000 (cell average)",
         "var " + pct(mean_var) + ", joint " + pct(mean_joint) + ", strict " +
             pct(mean_strict));
}

// ---------------------------------------------------------------------------
// Criterion 5: power is monotone in pi and high at the far end.
// ---------------------------------------------------------------------------

void criterion_5(Campaigns& campaigns) {
  std::vector<double> power;
  for (double pi : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const std::vector<enc::TestVariant> variants =
        pi == 0.0 ? std::vector<enc::TestVariant>{enc::TestVariant::StrictES,
                                                  enc::TestVariant::AuxES}
                  : std::vector<enc::TestVariant>{enc::TestVariant::StrictES};
    const auto& cell =
        campaigns.cell(dgp::DgpFamily::GarchCombo, 2000, pi, variants);
    power.push_back(
        cell.rejection_rate(enc::TestVariant::StrictES, enc::Direction::H01, 0.05));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < power.size(); ++i) {
    if (power[i] < power[i - 1] - 0.02) monotone = false;
  }
  const auto& far = campaigns.cell(
      dgp::DgpFamily::GarchCombo, 4000, 1.0,
      {enc::TestVariant::StrictES, enc::TestVariant::AuxES});
  const double power_far =
      far.rejection_rate(enc::TestVariant::StrictES, enc::Direction::H01, 0.05);
  std::string curve;
  for (double p : power) curve += pct(p) + " ";
  const bool pass = monotone && power_far >= 0.80;
  report(5, pass, "strict-test power is monotone in pi and >= 80% at pi=1",
         "curve n=2000: " + curve + "| n=4000 pi=1: " + pct(power_far));
}

// ---------------------------------------------------------------------------
// Criterion 6: strict and auxiliary p-values nearly coincide.
// ---------------------------------------------------------------------------

void criterion_6(Campaigns& campaigns) {
  const auto& cell = campaigns.cell(
      dgp::DgpFamily::GarchCombo, 2000, 0.0,
      {enc::TestVariant::StrictES, enc::TestVariant::AuxES});
  int close = 0, total = 0;
  for (const auto& rep : cell.reps) {
    if (rep.failed) continue;
    if (total == 200) break;
    ++total;
    const double ps = rep.reports.at(enc::TestVariant::StrictES).first.p_value;
    const double pa = rep.reports.at(enc::TestVariant::AuxES).first.p_value;
    close += std::abs(ps - pa) < 0.05 ? 1 : 0;
  }
  const double rate = double(close) / std::max(1, total);
  report(6, rate >= 0.90 && total == 200,
         "strict and auxiliary p-values within 0.05 of each other",
         pct(rate) + " of " + std::to_string(total) + " replications");
}

// ---------------------------------------------------------------------------
// Criterion 7: null distribution of the strict statistic is chi-squared(2).
// ---------------------------------------------------------------------------

void criterion_7(Campaigns& campaigns) {
  const auto& cell = campaigns.cell(
      dgp::DgpFamily::GarchCombo, 4000, 0.0,
      {enc::TestVariant::StrictES, enc::TestVariant::AuxES});
  std::vector<double> stats;
  for (const auto& rep : cell.reps) {
    if (rep.failed) continue;
    stats.push_back(rep.reports.at(enc::TestVariant::StrictES).first.statistic);
  }
  std::sort(stats.begin(), stats.end());
  const int n = static_cast<int>(stats.size());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = 1.0 - num::chi2_sf(stats[i], 2);
    d = std::max(d, std::max(std::abs(f - double(i) / n),
                             std::abs(f - double(i + 1) / n)));
  }
  // asymptotic Kolmogorov critical value at the 1% level
  const double critical = 1.62762 / std::sqrt(double(n));
  report(7, d < critical, "strict statistics pass the KS test against chi2(2)",
         "D=" + csv::format_double(d) + " vs critical " +
             csv::format_double(critical) + " (n=" + std::to_string(n) + ")");
}

// ---------------------------------------------------------------------------
// Criterion 8: estimator error halves from n=1000 to n=4000.
// ---------------------------------------------------------------------------

void criterion_8(const Options& opt) {
  const auto link = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  Eigen::VectorXd theta0(6);
  theta0 << 0, 1, 0, 0, 1, 0;
  std::vector<double> err1(100), err4(100);
  parallel_for(100, opt.workers, [&](int s) {
    for (int which = 0; which < 2; ++which) {
      dgp::DgpSpec spec;
      spec.family = dgp::DgpFamily::GarchCombo;
      spec.pi = 0.0;
      spec.n = which == 0 ? 1000 : 4000;
      spec.seed = stream_key(opt.seed, 0xC8, s * 2 + which);
      const ForecastSet fs = dgp::simulate(spec);
      mestim::EstimateOptions eopt;
      eopt.seed = stream_key(spec.seed, 0x7E57u);
      const auto est = mestim::estimate(fs, link, link,
                                        mestim::EstimationMode::JointOrAux, eopt);
      const double err = (est.theta_hat.stacked() - theta0).cwiseAbs().maxCoeff();
      (which == 0 ? err1[s] : err4[s]) = err;
    }
  });
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double m1 = median(err1);
  const double m4 = median(err4);
  const double ratio = m4 / m1;
  report(8, ratio >= 0.375 && ratio <= 0.625,
         "median estimation error halves from n=1000 to n=4000",
         "median " + csv::format_double(m1) + " -> " + csv::format_double(m4) +
             ", ratio " + csv::format_double(ratio));
}

// ---------------------------------------------------------------------------
// Criterion 9: Wald statistics are invariant to rescaling the data.
// ---------------------------------------------------------------------------

void criterion_9() {
  dgp::DgpSpec spec;
  spec.family = dgp::DgpFamily::GarchCombo;
  spec.pi = 0.5;
  spec.n = 2000;
  spec.seed = 424243;
  const ForecastSet fs = dgp::simulate(spec);
  const std::vector<enc::TestVariant> variants = {
      enc::TestVariant::StrictES, enc::TestVariant::AuxES,
      enc::TestVariant::JointVaRES, enc::TestVariant::VaR};
  const auto base = enc::run_suite(fs, variants, {});
  double worst = 0.0;
  for (double c : {0.1, 10.0}) {
    const auto scaled = enc::run_suite(fs.scaled(c), variants, {});
    for (auto v : variants) {
      worst = std::max(worst, std::abs(scaled.at(v).first.statistic -
                                       base.at(v).first.statistic));
      worst = std::max(worst, std::abs(scaled.at(v).second.statistic -
                                       base.at(v).second.statistic));
    }
  }
  report(9, worst < 1e-6, "Wald statistics invariant to rescaling by 0.1 and 10",
         "largest statistic change " + csv::format_double(worst));
}

// ---------------------------------------------------------------------------
// Criterion 10: pipeline outputs are byte-stable.
// ---------------------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("missing output file " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run_cli(const std::string& cmd) {
  std::cerr << "  $ " << cmd << "\n";
  return std::system(cmd.c_str());
}

void criterion_10(const Options& opt) {
  if (opt.cli.empty()) {
    report(10, false, "pipeline golden files byte-stable", "no CLI path given");
    return;
  }
  const std::string w = opt.workdir;
  std::error_code ec;
  std::filesystem::create_directories(w, ec);
  bool pass = true;
  std::string detail;

  // simulate -> test round trip, run twice
  for (int run = 1; run <= 2; ++run) {
    const std::string tag = w + "/r" + std::to_string(run);
    if (run_cli(opt.cli + " simulate --family garch --pi 0.5 --n 2000 --seed 11 --out " +
                tag + "_sim.csv") != 0 ||
        run_cli(opt.cli + " test --input " + tag + "_sim.csv --variant strict "
                "--direction both --seed 7 --out " + tag + "_rep.json") != 0) {
      pass = false;
      detail += "CLI run failed; ";
    }
  }
  if (pass) {
    if (slurp(w + "/r1_sim.csv") != slurp(w + "/r2_sim.csv")) {
      pass = false;
      detail += "simulate not byte-stable; ";
    }
    if (slurp(w + "/r1_rep.json") != slurp(w + "/r2_rep.json")) {
      pass = false;
      detail += "test report not byte-stable; ";
    }
  }

  // matrix across worker counts
  if (pass) {
    if (run_cli(opt.cli + " simulate --family garch --pi 0.3 --n 1400 --seed 13 --out " +
                w + "/returns_full.csv") != 0) {
      pass = false;
      detail += "matrix input simulation failed; ";
    }
  }
  if (pass) {
    // keep t,y only
    const std::string full = slurp(w + "/returns_full.csv");
    std::istringstream is(full);
    std::ostringstream os;
    std::string line;
    std::getline(is, line);
    os << "t,y\n";
    while (std::getline(is, line)) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      os << line.substr(0, c2) << "\n";
    }
    std::ofstream(w + "/returns.csv", std::ios::binary) << os.str();

    const std::string models = "riskmetrics,histsim,gjr-garch-t,es-caviar-sav";
    for (int workers : {1, 2}) {
      if (run_cli(opt.cli + " matrix --input " + w + "/returns.csv --m 1000 "
                  "--models " + models + " --seed 19 --workers " +
                  std::to_string(workers) + " --out-dir " + w + "/mx" +
                  std::to_string(workers)) != 0) {
        pass = false;
        detail += "matrix run failed; ";
      }
    }
  }
  if (pass) {
    for (const char* file :
         {"/pvalues_strict.csv", "/pvalues_aux.csv", "/pvalues_joint.csv",
          "/pvalues_var.csv", "/outcomes.csv"}) {
      if (slurp(w + "/mx1" + file) != slurp(w + "/mx2" + file)) {
        pass = false;
        detail += std::string(file) + " differs across worker counts; ";
      }
    }
  }
  if (detail.empty()) detail = "simulate/test reports and matrix outputs identical";
  report(10, pass, "pipeline golden files byte-stable across runs and workers",
         detail);
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) opt.cli = argv[++i];
    if (arg == "--workdir" && i + 1 < argc) opt.workdir = argv[++i];
    if (arg == "--workers" && i + 1 < argc) opt.workers = std::atoi(argv[++i]);
  }

  Campaigns campaigns(opt);
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3(campaigns);
  criterion_4(campaigns);
  criterion_5(campaigns);
  criterion_6(campaigns);
  criterion_7(campaigns);
  criterion_8(opt);
  criterion_9();
  criterion_10(opt);
  std::printf("acceptance finished in %d s with %d failure(s)\n",
              int(wall_seconds(t0)), g_failures);
  return g_failures == 0 ? 0 : 1;
}
