#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "esenc/forecast_set.hpp"
#include "esenc/links.hpp"
#include "esenc/types.hpp"

namespace esenc::mestim {

//! JointOrAux feeds the quantile link with VaR forecasts; Strict feeds it
//! with the ES forecasts instead, so only ES forecasts are required.
enum class EstimationMode { JointOrAux, Strict };

struct EstimateOptions {
  std::uint64_t seed = 42;
  int n_restarts = 10;  // perturbed starts beyond the two null anchors
  double tol = 1e-8;
  int max_evals = 20000;
  double param_bound = 50.0;  // sup-norm bound on theta
  double feasibility_margin = 1e-8;
};

struct EstimationResult {
  Theta theta_hat;
  double objective = 0.0;
  bool converged = false;
  int n_restarts_used = 0;
  bool feasible = false;
};

inline constexpr double kPenaltyBase = 1e10;

//! Sample objective for the joint (VaR, ES) combination regression with the
//! link structure flattened into per-observation affine coefficients.  Also
//! serves the covariance estimators, which need per-observation link values
//! and gradients at theta-hat.
class CombinationProblem {
public:
  CombinationProblem(const ForecastSet& fs, links::LinkSpec spec_q,
                     links::LinkSpec spec_e, EstimationMode mode);

  //! Mean FZ0 loss at theta; infeasible parameter values (non-negative ES
  //! link, ES link above quantile link, or parameter bound violations) map to
  //! kPenaltyBase plus a smooth distance-to-feasibility term.
  double objective(const Eigen::VectorXd& theta) const;

  //! Link values over the sample; no penalties applied.
  void eval_links(const Eigen::VectorXd& theta, Eigen::VectorXd& gq,
                  Eigen::VectorXd& ge) const;

  Eigen::VectorXd grad_q(Eigen::Index t) const;
  Eigen::VectorXd grad_e(Eigen::Index t) const;
  Eigen::MatrixXd hessian_q(Eigen::Index t, const Eigen::VectorXd& beta) const;
  Eigen::MatrixXd hessian_e(Eigen::Index t, const Eigen::VectorXd& eta) const;

  Eigen::Index n() const { return y_.size(); }
  int k_beta() const { return spec_q_.k; }
  int k_eta() const { return spec_e_.k; }
  int k() const { return spec_q_.k + spec_e_.k; }
  double alpha() const { return alpha_; }
  const Eigen::VectorXd& y() const { return y_; }
  const links::LinkSpec& spec_q() const { return spec_q_; }
  const links::LinkSpec& spec_e() const { return spec_e_; }
  EstimationMode mode() const { return mode_; }

  double param_bound = 50.0;
  double feasibility_margin = 1e-8;

private:
  links::LinkSpec spec_q_, spec_e_;
  EstimationMode mode_;
  double alpha_;
  Eigen::VectorXd y_;
  // Raw forecast series feeding each link (mode-dependent for the q link).
  Eigen::VectorXd qf1_, qf2_, ef1_, ef2_;
  // Affine representation g = base + coef . theta_block, zero padded to 3.
  Eigen::VectorXd qbase_, ebase_;
  Eigen::VectorXd qc_[3], ec_[3];
};

//! Mean tick loss problem for the VaR-only combination regression.
class QuantileProblem {
public:
  QuantileProblem(const ForecastSet& fs, links::LinkSpec spec_q);

  double objective(const Eigen::VectorXd& beta) const;
  void eval_link(const Eigen::VectorXd& beta, Eigen::VectorXd& gq) const;
  Eigen::VectorXd grad_q(Eigen::Index t) const;
  Eigen::MatrixXd hessian_q(Eigen::Index t, const Eigen::VectorXd& beta) const;

  Eigen::Index n() const { return y_.size(); }
  int k() const { return spec_q_.k; }
  double alpha() const { return alpha_; }
  const Eigen::VectorXd& y() const { return y_; }
  const links::LinkSpec& spec_q() const { return spec_q_; }

  double param_bound = 50.0;

private:
  links::LinkSpec spec_q_;
  double alpha_;
  Eigen::VectorXd y_, f1_, f2_;
  Eigen::VectorXd base_;
  Eigen::VectorXd c_[3];
};

//! Spec-facing wrapper: penalized mean FZ0 loss at theta.
double objective(const ForecastSet& fs, links::LinkSpec spec_q,
                 links::LinkSpec spec_e, EstimationMode mode,
                 const Theta& theta);

//! Multi-start Nelder-Mead minimization of the joint combination objective.
//! Deterministic for fixed options.seed.  Inputs are standardized by a robust
//! scale internally and the fit mapped back, so results are equivariant under
//! rescaling of (y, q, e).
EstimationResult estimate(const ForecastSet& fs, links::LinkSpec spec_q,
                          links::LinkSpec spec_e, EstimationMode mode,
                          const EstimateOptions& options = {});

//! Same machinery for the VaR-only tick loss regression.
EstimationResult estimate_var(const ForecastSet& fs, links::LinkSpec spec_q,
                              const EstimateOptions& options = {});

}  // namespace esenc::mestim
