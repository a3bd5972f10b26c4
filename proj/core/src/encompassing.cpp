#include "esenc/encompassing.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "esenc/special.hpp"

namespace esenc::enc {

std::string variant_name(TestVariant v) {
  switch (v) {
    case TestVariant::JointVaRES:
      return "joint";
    case TestVariant::AuxES:
      return "aux";
    case TestVariant::StrictES:
      return "strict";
    case TestVariant::VaR:
      return "var";
  }
  return "?";
}

TestVariant parse_variant(const std::string& name) {
  if (name == "joint") return TestVariant::JointVaRES;
  if (name == "aux") return TestVariant::AuxES;
  if (name == "strict") return TestVariant::StrictES;
  if (name == "var") return TestVariant::VaR;
  throw data_error("unknown test variant '" + name +
                   "' (expected joint, aux, strict or var)");
}

std::string direction_name(Direction d) {
  return d == Direction::H01 ? "h01" : "h02";
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::NR:
      return "NR";
    case Outcome::E1:
      return "E1";
    case Outcome::E2:
      return "E2";
    case Outcome::C:
      return "C";
  }
  return "?";
}

std::pair<double, int> wald(const Eigen::VectorXd& theta_hat,
                            const Eigen::MatrixXd& omega_hat,
                            const Restriction& restriction, Eigen::Index n) {
  const int r = restriction.df();
  if (r == 0) throw data_error("empty restriction");
  Eigen::VectorXd d(r);
  Eigen::MatrixXd sub(r, r);
  for (int i = 0; i < r; ++i) {
    const int ii = restriction.indices[i];
    if (ii < 0 || ii >= theta_hat.size()) {
      throw data_error("restriction index out of range");
    }
    d[i] = theta_hat[ii] - restriction.values[i];
    for (int j = 0; j < r; ++j) {
      sub(i, j) = omega_hat(ii, restriction.indices[j]);
    }
  }
  // Equilibrate the sub-block so the singularity guard is unit-invariant.
  Eigen::VectorXd scale(r);
  for (int i = 0; i < r; ++i) {
    const double sii = std::abs(sub(i, i));
    if (!(sii > 0.0) || !std::isfinite(sii)) {
      throw singular_omega("omega sub-block has a vanishing diagonal entry");
    }
    scale[i] = 1.0 / std::sqrt(sii);
  }
  const Eigen::MatrixXd sym =
      scale.asDiagonal() * (0.5 * (sub + sub.transpose())) * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw singular_omega("eigendecomposition of the omega sub-block failed");
  }
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  const double emin = ev.cwiseAbs().minCoeff();
  if (!(emin > 0.0) || emax / emin > 1e12) {
    throw singular_omega("omega sub-block is numerically singular");
  }
  const Eigen::VectorXd z =
      eig.eigenvectors().transpose() * (scale.asDiagonal() * d);
  const double stat =
      double(n) * (z.array().square() / ev.array()).sum();
  return {std::max(stat, 0.0), r};
}

namespace {

Restriction slope_restriction(const links::LinkSpec& spec, Direction direction,
                              int offset, bool restrict_intercept) {
  const Eigen::VectorXd target =
      direction == Direction::H01
          ? links::null_theta(spec)
          : [&spec]() {
              const auto swapped = links::swapped_null_theta(spec);
              if (!swapped) {
                throw data_error(
                    "link kind cannot express the swapped null hypothesis");
              }
              return *swapped;
            }();
  Restriction out;
  std::vector<double> vals;
  const bool has_intercept =
      spec.kind == links::LinkKind::LinearIntercept ||
      spec.kind == links::LinkKind::AnchoredOffset;
  for (int i = 0; i < spec.k; ++i) {
    if (i == 0 && has_intercept && !restrict_intercept) continue;
    out.indices.push_back(offset + i);
    vals.push_back(target[i]);
  }
  out.values = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
  return out;
}

Restriction merge(const Restriction& a, const Restriction& b) {
  Restriction out;
  out.indices = a.indices;
  out.indices.insert(out.indices.end(), b.indices.begin(), b.indices.end());
  out.values.resize(a.values.size() + b.values.size());
  out.values << a.values, b.values;
  return out;
}

}  // namespace

Restriction default_restriction(TestVariant variant, Direction direction,
                                const TestOptions& options) {
  switch (variant) {
    case TestVariant::JointVaRES:
      return merge(slope_restriction(options.spec_q, direction, 0,
                                     options.restrict_intercepts),
                   slope_restriction(options.spec_e, direction, options.spec_q.k,
                                     options.restrict_intercepts));
    case TestVariant::AuxES:
    case TestVariant::StrictES:
      return slope_restriction(options.spec_e, direction, options.spec_q.k,
                               options.restrict_intercepts);
    case TestVariant::VaR:
      return slope_restriction(options.spec_q, direction, 0,
                               options.restrict_intercepts);
  }
  throw data_error("unknown test variant");
}

namespace {

//! Shared estimation + covariance pass for one estimation mode.
struct FitBundle {
  mestim::EstimationResult est;
  vcov::SandwichCov cov;
  Eigen::VectorXd theta;
  Eigen::Index n = 0;
};

FitBundle fit_bundle(const ForecastSet& fs, mestim::EstimationMode mode,
                     const TestOptions& options) {
  FitBundle out;
  out.est = mestim::estimate(fs, options.spec_q, options.spec_e, mode,
                             options.estimation);
  out.theta = out.est.theta_hat.stacked();
  mestim::CombinationProblem problem(fs, options.spec_q, options.spec_e, mode);
  out.cov = vcov::sandwich(problem, out.theta, options.covariance);
  out.n = fs.size();
  return out;
}

FitBundle fit_var_bundle(const ForecastSet& fs, const TestOptions& options) {
  FitBundle out;
  out.est = mestim::estimate_var(fs, options.spec_q, options.estimation);
  out.theta = out.est.theta_hat.beta;
  mestim::QuantileProblem problem(fs, options.spec_q);
  out.cov = vcov::var_sandwich(problem, out.theta, options.covariance);
  out.n = fs.size();
  return out;
}

TestReport report_from(const FitBundle& bundle, TestVariant variant,
                       Direction direction, const TestOptions& options) {
  TestReport rep;
  rep.variant = variant;
  rep.direction = direction;
  const Restriction restriction = default_restriction(variant, direction, options);
  const auto [stat, df] = wald(bundle.theta, bundle.cov.omega, restriction,
                               bundle.n);
  rep.statistic = stat;
  rep.df = df;
  rep.p_value = num::chi2_sf(stat, df);
  rep.theta_hat = bundle.est.theta_hat;
  rep.objective = bundle.est.objective;
  rep.converged = bundle.est.converged;
  rep.bandwidth = bundle.cov.bandwidth;
  return rep;
}

mestim::EstimationMode mode_of(TestVariant variant) {
  return variant == TestVariant::StrictES ? mestim::EstimationMode::Strict
                                          : mestim::EstimationMode::JointOrAux;
}

}  // namespace

TestReport run_test(const ForecastSet& fs, TestVariant variant,
                    Direction direction, const TestOptions& options) {
  if (variant == TestVariant::VaR) return var_test(fs, direction, options);
  const FitBundle bundle = fit_bundle(fs, mode_of(variant), options);
  return report_from(bundle, variant, direction, options);
}

TestReport var_test(const ForecastSet& fs, Direction direction,
                    const TestOptions& options) {
  const FitBundle bundle = fit_var_bundle(fs, options);
  return report_from(bundle, TestVariant::VaR, direction, options);
}

std::pair<TestReport, TestReport> run_both(const ForecastSet& fs,
                                           TestVariant variant,
                                           const TestOptions& options) {
  const FitBundle bundle = variant == TestVariant::VaR
                               ? fit_var_bundle(fs, options)
                               : fit_bundle(fs, mode_of(variant), options);
  return {report_from(bundle, variant, Direction::H01, options),
          report_from(bundle, variant, Direction::H02, options)};
}

std::map<TestVariant, std::pair<TestReport, TestReport>> run_suite(
    const ForecastSet& fs, const std::vector<TestVariant>& variants,
    const TestOptions& options) {
  std::map<TestVariant, std::pair<TestReport, TestReport>> out;
  const bool wants_joint =
      std::find(variants.begin(), variants.end(), TestVariant::JointVaRES) !=
      variants.end();
  const bool wants_aux =
      std::find(variants.begin(), variants.end(), TestVariant::AuxES) !=
      variants.end();

  std::optional<FitBundle> joint_bundle;
  if (wants_joint || wants_aux) {
    joint_bundle =
        fit_bundle(fs, mestim::EstimationMode::JointOrAux, options);
  }
  for (TestVariant v : variants) {
    switch (v) {
      case TestVariant::JointVaRES:
      case TestVariant::AuxES:
        out.emplace(v, std::make_pair(
                           report_from(*joint_bundle, v, Direction::H01, options),
                           report_from(*joint_bundle, v, Direction::H02, options)));
        break;
      case TestVariant::StrictES: {
        const FitBundle b = fit_bundle(fs, mestim::EstimationMode::Strict, options);
        out.emplace(v, std::make_pair(
                           report_from(b, v, Direction::H01, options),
                           report_from(b, v, Direction::H02, options)));
        break;
      }
      case TestVariant::VaR: {
        const FitBundle b = fit_var_bundle(fs, options);
        out.emplace(v, std::make_pair(
                           report_from(b, v, Direction::H01, options),
                           report_from(b, v, Direction::H02, options)));
        break;
      }
    }
  }
  return out;
}

Decision decide(double p1, double p2, double level,
                const std::optional<Theta>& theta_hat) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
    throw data_error("p-values must lie in [0, 1]");
  }
  Decision d;
  d.level = level;
  const bool r1 = p1 <= level;
  const bool r2 = p2 <= level;
  if (!r1 && !r2) {
    d.outcome = Outcome::NR;
  } else if (r1 && !r2) {
    d.outcome = Outcome::E1;
  } else if (!r1 && r2) {
    d.outcome = Outcome::E2;
  } else {
    d.outcome = Outcome::C;
    d.combined_weights = theta_hat;
  }
  return d;
}

}  // namespace esenc::enc
