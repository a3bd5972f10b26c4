#pragma once

#include <Eigen/Core>

#include "esenc/estimation.hpp"
#include "esenc/types.hpp"

namespace esenc::vcov {

struct SandwichOptions {
  double bandwidth = 0.0;  // 0 selects the robust-scale rule
  bool newey_west = false;
  //! Include the realized inner-ES bracket in the lambda_ee block.  The
  //! bracket has conditional mean zero whenever the ES equation is correctly
  //! specified, but its heavy-tailed noise is correlated with the score and
  //! inflates the finite-sample size of the Wald tests.
  bool lambda_realized_inner = false;
};

//! Misspecification-robust covariance pieces of the M-estimator:
//! omega = lambda^-1 sigma lambda^-1.
struct SandwichCov {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd omega;
  double bandwidth = 0.0;
};

//! Outer-product estimator (1/n) sum psi_t psi_t'.
Eigen::MatrixXd sigma_hat(const mestim::CombinationProblem& problem,
                          const Eigen::VectorXd& theta);

//! Plug-in curvature estimator.  Indicator terms replace F_t - alpha, a
//! Gaussian kernel density estimate replaces f_t, Hessian terms enter through
//! the link Hessians (zero for linear links).
Eigen::MatrixXd lambda_hat(const mestim::CombinationProblem& problem,
                           const Eigen::VectorXd& theta, double bandwidth,
                           bool realized_inner = false);

//! Silverman-style rule on quantile residuals: n^(-1/3) mad/0.6745.
double default_bandwidth(const mestim::CombinationProblem& problem,
                         const Eigen::VectorXd& theta);

//! lambda^-1 sigma lambda^-1 via a symmetric eigendecomposition with a
//! condition-number guard.
Eigen::MatrixXd omega_of(const Eigen::MatrixXd& lambda,
                         const Eigen::MatrixXd& sigma);

SandwichCov sandwich(const mestim::CombinationProblem& problem,
                     const Eigen::VectorXd& theta,
                     const SandwichOptions& options = {});

// Quantile-only versions for the VaR baseline test (standard quantile
// regression sandwich).
Eigen::MatrixXd var_sigma_hat(const mestim::QuantileProblem& problem,
                              const Eigen::VectorXd& beta);
Eigen::MatrixXd var_lambda_hat(const mestim::QuantileProblem& problem,
                               const Eigen::VectorXd& beta, double bandwidth);
double var_default_bandwidth(const mestim::QuantileProblem& problem,
                             const Eigen::VectorXd& beta);
SandwichCov var_sandwich(const mestim::QuantileProblem& problem,
                         const Eigen::VectorXd& beta,
                         const SandwichOptions& options = {});

}  // namespace esenc::vcov
