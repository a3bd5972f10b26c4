#include "esenc/sandwich.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "esenc/special.hpp"

namespace esenc::vcov {

namespace {

constexpr double kConditionLimit = 1e12;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

double gaussian_kernel(double u) { return num::normal_pdf(u); }

//! psi_t stacked into the rows of an n x k matrix.
Eigen::MatrixXd psi_matrix(const mestim::CombinationProblem& problem,
                           const Eigen::VectorXd& theta) {
  const Eigen::Index n = problem.n();
  const int kb = problem.k_beta();
  const int ke = problem.k_eta();
  const double alpha = problem.alpha();
  Eigen::VectorXd gq, ge;
  problem.eval_links(theta, gq, ge);
  Eigen::MatrixXd psi(n, kb + ke);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (!(ge[t] < 0.0)) {
      throw domain_error("non-negative ES link value at theta-hat, row " +
                         std::to_string(t));
    }
    const double hit = (problem.y()[t] <= gq[t]) ? 1.0 : 0.0;
    const double inner = ge[t] - gq[t] + (gq[t] - problem.y()[t]) * hit / alpha;
    psi.row(t).head(kb) =
        -problem.grad_q(t).transpose() * ((hit - alpha) / (alpha * ge[t]));
    psi.row(t).tail(ke) =
        problem.grad_e(t).transpose() * (inner / (ge[t] * ge[t]));
  }
  return psi;
}

Eigen::MatrixXd newey_west(const Eigen::MatrixXd& psi) {
  const Eigen::Index n = psi.rows();
  const int lag = static_cast<int>(std::floor(std::pow(double(n), 0.2)));
  Eigen::MatrixXd sigma = psi.transpose() * psi / double(n);
  for (int l = 1; l <= lag; ++l) {
    const double w = 1.0 - double(l) / double(lag + 1);
    Eigen::MatrixXd gamma =
        psi.bottomRows(n - l).transpose() * psi.topRows(n - l) / double(n);
    sigma += w * (gamma + gamma.transpose());
  }
  return sigma;
}

}  // namespace

Eigen::MatrixXd sigma_hat(const mestim::CombinationProblem& problem,
                          const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd psi = psi_matrix(problem, theta);
  return symmetrized(psi.transpose() * psi / double(problem.n()));
}

Eigen::MatrixXd lambda_hat(const mestim::CombinationProblem& problem,
                           const Eigen::VectorXd& theta, double bandwidth,
                           bool realized_inner) {
  if (!(bandwidth > 0.0)) throw domain_error("bandwidth must be positive");
  const Eigen::Index n = problem.n();
  const int kb = problem.k_beta();
  const int ke = problem.k_eta();
  const double alpha = problem.alpha();
  const Eigen::VectorXd beta = theta.head(kb);
  const Eigen::VectorXd eta = theta.tail(ke);

  Eigen::VectorXd gq, ge;
  problem.eval_links(theta, gq, ge);

  Eigen::MatrixXd lqq = Eigen::MatrixXd::Zero(kb, kb);
  Eigen::MatrixXd lqe = Eigen::MatrixXd::Zero(kb, ke);
  Eigen::MatrixXd lee = Eigen::MatrixXd::Zero(ke, ke);

  for (Eigen::Index t = 0; t < n; ++t) {
    if (!(ge[t] < 0.0)) {
      throw domain_error("non-negative ES link value at theta-hat, row " +
                         std::to_string(t));
    }
    const double y = problem.y()[t];
    const double hit = (y <= gq[t]) ? 1.0 : 0.0;
    const double inner = ge[t] - gq[t] + (gq[t] - y) * hit / alpha;
    const double fhat = gaussian_kernel((y - gq[t]) / bandwidth) / bandwidth;
    const Eigen::VectorXd dq = problem.grad_q(t);
    const Eigen::VectorXd de = problem.grad_e(t);
    const double e2 = ge[t] * ge[t];

    // Jacobian of the identification function: curvature of the expected
    // loss, positive definite near the optimum.
    lqq.noalias() -= problem.hessian_q(t, beta) * ((hit - alpha) / (alpha * ge[t]));
    lqq.noalias() -= dq * dq.transpose() * (fhat / (alpha * ge[t]));
    lqe.noalias() += dq * de.transpose() * ((hit - alpha) / (alpha * e2));
    lee.noalias() += de * de.transpose() / e2;
    if (realized_inner) {
      lee.noalias() += (problem.hessian_e(t, eta) / e2 -
                        2.0 * de * de.transpose() / (e2 * ge[t])) *
                       inner;
    }
  }

  Eigen::MatrixXd lambda(kb + ke, kb + ke);
  lambda.topLeftCorner(kb, kb) = lqq;
  lambda.topRightCorner(kb, ke) = lqe;
  lambda.bottomLeftCorner(ke, kb) = lqe.transpose();
  lambda.bottomRightCorner(ke, ke) = lee;
  lambda /= double(n);
  return symmetrized(lambda);
}

double default_bandwidth(const mestim::CombinationProblem& problem,
                         const Eigen::VectorXd& theta) {
  Eigen::VectorXd gq, ge;
  problem.eval_links(theta, gq, ge);
  Eigen::VectorXd resid = problem.y() - gq;
  const double n = double(problem.n());
  double scale = num::mad(resid.data(), resid.size()) / 0.6745;
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    scale = std::sqrt((resid.array() - resid.mean()).square().mean());
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  return std::pow(n, -1.0 / 3.0) * scale;
}

Eigen::MatrixXd omega_of(const Eigen::MatrixXd& lambda,
                         const Eigen::MatrixXd& sigma) {
  const Eigen::MatrixXd lam = symmetrized(lambda);
  // Equilibrate to unit diagonal before inverting; the condition check is
  // then invariant to the units of the regressors and flags genuine
  // identification failure rather than scaling.
  const Eigen::Index k = lam.rows();
  Eigen::VectorXd d(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double lii = std::abs(lam(i, i));
    if (!(lii > 0.0) || !std::isfinite(lii)) {
      throw singular_lambda("lambda has a vanishing diagonal entry");
    }
    d[i] = 1.0 / std::sqrt(lii);
  }
  const Eigen::MatrixXd scaled = d.asDiagonal() * lam * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  if (eig.info() != Eigen::Success) {
    throw singular_lambda("eigendecomposition of lambda failed");
  }
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  const double emin = ev.cwiseAbs().minCoeff();
  if (!(emin > 0.0) || emax / emin > kConditionLimit) {
    throw singular_lambda("lambda is numerically singular (condition number " +
                          std::to_string(emin > 0.0 ? emax / emin : INFINITY) +
                          ")");
  }
  // lambda^-1 = D (scaled)^-1 D
  const Eigen::MatrixXd inv_scaled = eig.eigenvectors() *
                                     ev.cwiseInverse().asDiagonal() *
                                     eig.eigenvectors().transpose();
  const Eigen::MatrixXd inv =
      d.asDiagonal() * inv_scaled * d.asDiagonal();
  return symmetrized(inv * symmetrized(sigma) * inv);
}

SandwichCov sandwich(const mestim::CombinationProblem& problem,
                     const Eigen::VectorXd& theta,
                     const SandwichOptions& options) {
  SandwichCov out;
  out.bandwidth = options.bandwidth > 0.0 ? options.bandwidth
                                          : default_bandwidth(problem, theta);
  const Eigen::MatrixXd psi = psi_matrix(problem, theta);
  out.sigma = symmetrized(options.newey_west
                              ? newey_west(psi)
                              : Eigen::MatrixXd(psi.transpose() * psi /
                                                double(problem.n())));
  out.lambda =
      lambda_hat(problem, theta, out.bandwidth, options.lambda_realized_inner);
  out.omega = omega_of(out.lambda, out.sigma);
  return out;
}

Eigen::MatrixXd var_sigma_hat(const mestim::QuantileProblem& problem,
                              const Eigen::VectorXd& beta) {
  const Eigen::Index n = problem.n();
  const int k = problem.k();
  const double alpha = problem.alpha();
  Eigen::VectorXd gq;
  problem.eval_link(beta, gq);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double hit = (problem.y()[t] <= gq[t]) ? 1.0 : 0.0;
    const Eigen::VectorXd dq = problem.grad_q(t);
    sigma.noalias() += dq * dq.transpose() * ((hit - alpha) * (hit - alpha));
  }
  return symmetrized(sigma / double(n));
}

Eigen::MatrixXd var_lambda_hat(const mestim::QuantileProblem& problem,
                               const Eigen::VectorXd& beta, double bandwidth) {
  if (!(bandwidth > 0.0)) throw domain_error("bandwidth must be positive");
  const Eigen::Index n = problem.n();
  const int k = problem.k();
  const double alpha = problem.alpha();
  Eigen::VectorXd gq;
  problem.eval_link(beta, gq);
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double y = problem.y()[t];
    const double hit = (y <= gq[t]) ? 1.0 : 0.0;
    const double fhat = gaussian_kernel((y - gq[t]) / bandwidth) / bandwidth;
    const Eigen::VectorXd dq = problem.grad_q(t);
    lambda.noalias() += dq * dq.transpose() * fhat;
    lambda.noalias() += problem.hessian_q(t, beta) * (hit - alpha);
  }
  return symmetrized(lambda / double(n));
}

double var_default_bandwidth(const mestim::QuantileProblem& problem,
                             const Eigen::VectorXd& beta) {
  Eigen::VectorXd gq;
  problem.eval_link(beta, gq);
  Eigen::VectorXd resid = problem.y() - gq;
  double scale = num::mad(resid.data(), resid.size()) / 0.6745;
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    scale = std::sqrt((resid.array() - resid.mean()).square().mean());
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  return std::pow(double(problem.n()), -1.0 / 3.0) * scale;
}

SandwichCov var_sandwich(const mestim::QuantileProblem& problem,
                         const Eigen::VectorXd& beta,
                         const SandwichOptions& options) {
  SandwichCov out;
  out.bandwidth = options.bandwidth > 0.0
                      ? options.bandwidth
                      : var_default_bandwidth(problem, beta);
  out.sigma = var_sigma_hat(problem, beta);
  if (options.newey_west) {
    const Eigen::Index n = problem.n();
    const int k = problem.k();
    const double alpha = problem.alpha();
    Eigen::VectorXd gq;
    problem.eval_link(beta, gq);
    Eigen::MatrixXd psi(n, k);
    for (Eigen::Index t = 0; t < n; ++t) {
      const double hit = (problem.y()[t] <= gq[t]) ? 1.0 : 0.0;
      psi.row(t) = problem.grad_q(t).transpose() * (hit - alpha);
    }
    out.sigma = symmetrized(newey_west(psi));
  }
  out.lambda = var_lambda_hat(problem, beta, out.bandwidth);
  out.omega = omega_of(out.lambda, out.sigma);
  return out;
}

}  // namespace esenc::vcov
