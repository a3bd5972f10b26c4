#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "esenc/estimation.hpp"
#include "esenc/forecast_set.hpp"
#include "esenc/sandwich.hpp"
#include "esenc/types.hpp"

namespace esenc::enc {

enum class TestVariant { JointVaRES, AuxES, StrictES, VaR };
enum class Direction { H01, H02 };
enum class Outcome { NR, E1, E2, C };

std::string variant_name(TestVariant v);
TestVariant parse_variant(const std::string& name);
std::string direction_name(Direction d);
std::string outcome_name(Outcome o);

//! Linear parameter restriction theta[indices] = values.
struct Restriction {
  std::vector<int> indices;
  Eigen::VectorXd values;

  int df() const { return static_cast<int>(indices.size()); }
};

struct TestReport {
  TestVariant variant;
  Direction direction;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  Theta theta_hat;
  double objective = 0.0;
  bool converged = false;
  double bandwidth = 0.0;
};

struct Decision {
  Outcome outcome;
  double level;
  std::optional<Theta> combined_weights;
};

struct TestOptions {
  links::LinkSpec spec_q = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  links::LinkSpec spec_e = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  mestim::EstimateOptions estimation;
  vcov::SandwichOptions covariance;
  bool restrict_intercepts = false;
};

//! Wald statistic n (theta_R - r)' [omega_RR]^-1 (theta_R - r) and its
//! degrees of freedom.
std::pair<double, int> wald(const Eigen::VectorXd& theta_hat,
                            const Eigen::MatrixXd& omega_hat,
                            const Restriction& restriction, Eigen::Index n);

//! Null restriction for the variant under the default linear links.  H01
//! restricts the tested slope blocks to (1, 0), H02 to (0, 1); intercepts are
//! left free unless restrict_intercepts is set.
Restriction default_restriction(TestVariant variant, Direction direction,
                                const TestOptions& options);

TestReport run_test(const ForecastSet& fs, TestVariant variant,
                    Direction direction, const TestOptions& options = {});

TestReport var_test(const ForecastSet& fs, Direction direction,
                    const TestOptions& options = {});

//! Both directions of one variant from a single estimation/covariance pass
//! (the restriction is applied post-estimation, so the expensive work is
//! shared).
std::pair<TestReport, TestReport> run_both(const ForecastSet& fs,
                                           TestVariant variant,
                                           const TestOptions& options = {});

//! All requested variants, sharing the joint estimation between the
//! JointVaRES and AuxES variants.
std::map<TestVariant, std::pair<TestReport, TestReport>> run_suite(
    const ForecastSet& fs, const std::vector<TestVariant>& variants,
    const TestOptions& options = {});

//! Four-outcome forecast selection rule from the two opposing p-values.
Decision decide(double p1, double p2, double level,
                const std::optional<Theta>& theta_hat = std::nullopt);

}  // namespace esenc::enc
