#include "esenc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esenc/nelder_mead.hpp"
#include "esenc/rng.hpp"
#include "esenc/special.hpp"

namespace esenc::mestim {

namespace {

void fill_affine(const links::LinkSpec& spec, const Eigen::VectorXd& f1,
                 const Eigen::VectorXd& f2, Eigen::VectorXd& base,
                 Eigen::VectorXd* coef) {
  const Eigen::Index n = f1.size();
  base.resize(n);
  for (int j = 0; j < 3; ++j) coef[j].resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const links::AffineLink a = links::affine_link(spec, f1[t], f2[t]);
    base[t] = a.base;
    for (int j = 0; j < 3; ++j) coef[j][t] = a.coef[j];
  }
}

double box_penalty(const Eigen::VectorXd& theta, double bound) {
  double pen = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) return std::numeric_limits<double>::infinity();
    const double over = std::abs(theta[i]) - bound;
    if (over > 0.0) pen += over * over;
  }
  return pen;
}

inline double sq(double x) { return x * x; }

}  // namespace

CombinationProblem::CombinationProblem(const ForecastSet& fs,
                                       links::LinkSpec spec_q,
                                       links::LinkSpec spec_e,
                                       EstimationMode mode)
    : spec_q_(spec_q),
      spec_e_(spec_e),
      mode_(mode),
      alpha_(fs.alpha().value()),
      y_(fs.y()),
      ef1_(fs.e1()),
      ef2_(fs.e2()) {
  if (mode == EstimationMode::JointOrAux) {
    if (!fs.has_var_forecasts()) {
      throw data_error("joint/auxiliary estimation requires VaR forecasts");
    }
    qf1_ = fs.q1();
    qf2_ = fs.q2();
  } else {
    qf1_ = fs.e1();
    qf2_ = fs.e2();
  }
  fill_affine(spec_q_, qf1_, qf2_, qbase_, qc_);
  fill_affine(spec_e_, ef1_, ef2_, ebase_, ec_);
}

double CombinationProblem::objective(const Eigen::VectorXd& theta) const {
  if (theta.size() != k()) {
    throw length_mismatch("theta has length " + std::to_string(theta.size()) +
                          ", expected " + std::to_string(k()));
  }
  const double bpen = box_penalty(theta, param_bound);
  if (bpen > 0.0) return kPenaltyBase + bpen;

  double b[3] = {0.0, 0.0, 0.0};
  double h[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < spec_q_.k; ++i) b[i] = theta[i];
  for (int i = 0; i < spec_e_.k; ++i) h[i] = theta[spec_q_.k + i];

  const Eigen::Index n = y_.size();
  const double* yy = y_.data();
  const double* qb = qbase_.data();
  const double* q0 = qc_[0].data();
  const double* q1 = qc_[1].data();
  const double* q2 = qc_[2].data();
  const double* eb = ebase_.data();
  const double* e0 = ec_[0].data();
  const double* e1 = ec_[1].data();
  const double* e2 = ec_[2].data();

  const double inv_alpha = 1.0 / alpha_;
  const double margin = feasibility_margin;
  double acc = 0.0;
  double pen = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double gq = qb[t] + q0[t] * b[0] + q1[t] * b[1] + q2[t] * b[2];
    const double ge = eb[t] + e0[t] * h[0] + e1[t] * h[1] + e2[t] * h[2];
    if (ge >= -margin || ge > gq) {
      pen += sq(std::max(0.0, ge + margin)) + sq(std::max(0.0, ge - gq));
      continue;
    }
    const double hit = (yy[t] <= gq) ? 1.0 : 0.0;
    const double inner = ge - gq + (gq - yy[t]) * hit * inv_alpha;
    acc += -inner / ge + std::log(-ge);
  }
  if (pen > 0.0 || !std::isfinite(acc)) {
    return kPenaltyBase + std::min(pen, kPenaltyBase);
  }
  return acc / static_cast<double>(n);
}

void CombinationProblem::eval_links(const Eigen::VectorXd& theta,
                                    Eigen::VectorXd& gq,
                                    Eigen::VectorXd& ge) const {
  double b[3] = {0.0, 0.0, 0.0};
  double h[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < spec_q_.k; ++i) b[i] = theta[i];
  for (int i = 0; i < spec_e_.k; ++i) h[i] = theta[spec_q_.k + i];
  const Eigen::Index n = y_.size();
  gq.resize(n);
  ge.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    gq[t] = qbase_[t] + qc_[0][t] * b[0] + qc_[1][t] * b[1] + qc_[2][t] * b[2];
    ge[t] = ebase_[t] + ec_[0][t] * h[0] + ec_[1][t] * h[1] + ec_[2][t] * h[2];
  }
}

Eigen::VectorXd CombinationProblem::grad_q(Eigen::Index t) const {
  Eigen::VectorXd g(spec_q_.k);
  for (int i = 0; i < spec_q_.k; ++i) g[i] = qc_[i][t];
  return g;
}

Eigen::VectorXd CombinationProblem::grad_e(Eigen::Index t) const {
  Eigen::VectorXd g(spec_e_.k);
  for (int i = 0; i < spec_e_.k; ++i) g[i] = ec_[i][t];
  return g;
}

Eigen::MatrixXd CombinationProblem::hessian_q(Eigen::Index t,
                                              const Eigen::VectorXd& beta) const {
  return links::link_hessian(spec_q_, qf1_[t], qf2_[t], beta);
}

Eigen::MatrixXd CombinationProblem::hessian_e(Eigen::Index t,
                                              const Eigen::VectorXd& eta) const {
  return links::link_hessian(spec_e_, ef1_[t], ef2_[t], eta);
}

QuantileProblem::QuantileProblem(const ForecastSet& fs, links::LinkSpec spec_q)
    : spec_q_(spec_q), alpha_(fs.alpha().value()), y_(fs.y()) {
  if (!fs.has_var_forecasts()) {
    throw data_error("the VaR combination regression requires VaR forecasts");
  }
  f1_ = fs.q1();
  f2_ = fs.q2();
  fill_affine(spec_q_, f1_, f2_, base_, c_);
}

double QuantileProblem::objective(const Eigen::VectorXd& beta) const {
  if (beta.size() != spec_q_.k) {
    throw length_mismatch("beta has length " + std::to_string(beta.size()) +
                          ", expected " + std::to_string(spec_q_.k));
  }
  const double bpen = box_penalty(beta, param_bound);
  if (bpen > 0.0) return kPenaltyBase + bpen;
  double b[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < spec_q_.k; ++i) b[i] = beta[i];
  const Eigen::Index n = y_.size();
  double acc = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double gq = base_[t] + c_[0][t] * b[0] + c_[1][t] * b[1] + c_[2][t] * b[2];
    const double hit = (y_[t] <= gq) ? 1.0 : 0.0;
    acc += (hit - alpha_) * (gq - y_[t]);
  }
  return acc / static_cast<double>(n);
}

void QuantileProblem::eval_link(const Eigen::VectorXd& beta,
                                Eigen::VectorXd& gq) const {
  double b[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < spec_q_.k; ++i) b[i] = beta[i];
  const Eigen::Index n = y_.size();
  gq.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    gq[t] = base_[t] + c_[0][t] * b[0] + c_[1][t] * b[1] + c_[2][t] * b[2];
  }
}

Eigen::VectorXd QuantileProblem::grad_q(Eigen::Index t) const {
  Eigen::VectorXd g(spec_q_.k);
  for (int i = 0; i < spec_q_.k; ++i) g[i] = c_[i][t];
  return g;
}

Eigen::MatrixXd QuantileProblem::hessian_q(Eigen::Index t,
                                           const Eigen::VectorXd& beta) const {
  return links::link_hessian(spec_q_, f1_[t], f2_[t], beta);
}

double objective(const ForecastSet& fs, links::LinkSpec spec_q,
                 links::LinkSpec spec_e, EstimationMode mode,
                 const Theta& theta) {
  CombinationProblem problem(fs, spec_q, spec_e, mode);
  return problem.objective(theta.stacked());
}

namespace {

//! Robust data scale used to standardize the series before optimization;
//! power-free and strictly positive.
double robust_scale(const Eigen::VectorXd& y) {
  const double m = num::mad(y.data(), y.size()) / 0.6745;
  if (m > 0.0 && std::isfinite(m)) return m;
  const double sd = std::sqrt(y.array().square().mean());
  return (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
}

//! Indices of parameters that scale with the data (intercept-like terms).
std::vector<int> scaling_indices(const links::LinkSpec& spec, int offset) {
  switch (spec.kind) {
    case links::LinkKind::LinearIntercept:
    case links::LinkKind::AnchoredOffset:
      return {offset};
    default:
      return {};
  }
}

struct StartSet {
  std::vector<Eigen::VectorXd> starts;
};

//! Mirror image of a stacked parameter under swapping the two forecasters,
//! when both links can express it.
std::optional<Eigen::VectorXd> mirror_stacked(const links::LinkSpec& spec_q,
                                              const links::LinkSpec& spec_e,
                                              const Eigen::VectorXd& theta) {
  const auto mq = links::mirror_theta(spec_q, theta.head(spec_q.k));
  const auto me = links::mirror_theta(spec_e, theta.tail(spec_e.k));
  if (!mq || !me) return std::nullopt;
  Eigen::VectorXd out(theta.size());
  out << *mq, *me;
  return out;
}

//! Null anchor, its mirror, and mirror-paired perturbations.  A mirror-closed
//! start set makes the fit equivariant under swapping the forecasters, which
//! the direction-symmetry of the tests relies on.
StartSet make_starts(const links::LinkSpec& spec_q, const links::LinkSpec& spec_e,
                     const EstimateOptions& options) {
  StartSet out;
  Eigen::VectorXd theta0(spec_q.k + spec_e.k);
  theta0 << links::null_theta(spec_q), links::null_theta(spec_e);
  out.starts.push_back(theta0);

  const auto opposite = mirror_stacked(spec_q, spec_e, theta0);
  if (opposite) out.starts.push_back(*opposite);

  CounterRng rng(stream_key(options.seed, 0x5741u));
  int added = 0;
  while (added < options.n_restarts) {
    Eigen::VectorXd v = theta0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] += 0.5 * rng.next_uniform() - 0.25;
    }
    out.starts.push_back(v);
    ++added;
    if (added >= options.n_restarts) break;
    if (const auto mirrored = mirror_stacked(spec_q, spec_e, v)) {
      out.starts.push_back(*mirrored);
      ++added;
    }
  }
  return out;
}

StartSet make_var_starts(const links::LinkSpec& spec_q,
                         const EstimateOptions& options) {
  StartSet out;
  Eigen::VectorXd theta0 = links::null_theta(spec_q);
  out.starts.push_back(theta0);
  if (const auto opposite = links::mirror_theta(spec_q, theta0)) {
    out.starts.push_back(*opposite);
  }
  CounterRng rng(stream_key(options.seed, 0x5742u));
  int added = 0;
  while (added < options.n_restarts) {
    Eigen::VectorXd v = theta0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] += 0.5 * rng.next_uniform() - 0.25;
    }
    out.starts.push_back(v);
    ++added;
    if (added >= options.n_restarts) break;
    if (const auto mirrored = links::mirror_theta(spec_q, v)) {
      out.starts.push_back(*mirrored);
      ++added;
    }
  }
  return out;
}

template <class Objective>
opt::NelderMeadResult best_of_starts(const Objective& f, const StartSet& starts,
                                     const EstimateOptions& options) {
  opt::NelderMeadResult best;
  best.fx = std::numeric_limits<double>::infinity();
  for (const auto& s : starts.starts) {
    opt::NelderMeadResult r = opt::nelder_mead(f, s, options.tol, options.max_evals);
    // Restart the simplex at its own optimum until it stops improving; a
    // collapsed simplex otherwise reports convergence away from the minimum
    // on the near-flat valleys that collinear forecasts produce.
    for (int polish = 0; polish < 4; ++polish) {
      opt::NelderMeadResult r2 =
          opt::nelder_mead(f, r.x, options.tol, options.max_evals);
      r2.evals += r.evals;
      const bool improved = r2.fx < r.fx - options.tol;
      if (r2.fx <= r.fx) r = r2;
      if (!improved) break;
    }
    if (r.fx < best.fx) best = r;
  }
  return best;
}

}  // namespace

EstimationResult estimate(const ForecastSet& fs, links::LinkSpec spec_q,
                          links::LinkSpec spec_e, EstimationMode mode,
                          const EstimateOptions& options) {
  const double scale = robust_scale(fs.y());
  const ForecastSet std_fs = fs.scaled(1.0 / scale);
  CombinationProblem problem(std_fs, spec_q, spec_e, mode);
  problem.param_bound = options.param_bound;
  problem.feasibility_margin = options.feasibility_margin;

  const StartSet starts = make_starts(spec_q, spec_e, options);
  auto f = [&](const Eigen::VectorXd& th) { return problem.objective(th); };
  const opt::NelderMeadResult best = best_of_starts(f, starts, options);

  if (!(best.fx < kPenaltyBase)) {
    throw no_feasible_start("no start point led to a feasible ES combination");
  }

  Eigen::VectorXd theta = best.x;
  for (int idx : scaling_indices(spec_q, 0)) theta[idx] *= scale;
  for (int idx : scaling_indices(spec_e, spec_q.k)) theta[idx] *= scale;

  EstimationResult res;
  res.theta_hat = Theta::split(theta, spec_q.k);
  CombinationProblem original(fs, spec_q, spec_e, mode);
  original.param_bound = options.param_bound * std::max(1.0, scale);
  original.feasibility_margin = options.feasibility_margin;
  res.objective = original.objective(theta);
  res.converged = best.converged;
  res.n_restarts_used = static_cast<int>(starts.starts.size());
  res.feasible = res.objective < kPenaltyBase;
  return res;
}

EstimationResult estimate_var(const ForecastSet& fs, links::LinkSpec spec_q,
                              const EstimateOptions& options) {
  const double scale = robust_scale(fs.y());
  const ForecastSet std_fs = fs.scaled(1.0 / scale);
  QuantileProblem problem(std_fs, spec_q);
  problem.param_bound = options.param_bound;

  const StartSet starts = make_var_starts(spec_q, options);
  auto f = [&](const Eigen::VectorXd& b) { return problem.objective(b); };
  const opt::NelderMeadResult best = best_of_starts(f, starts, options);

  if (!(best.fx < kPenaltyBase)) {
    throw no_feasible_start("tick loss minimization failed from every start");
  }

  Eigen::VectorXd beta = best.x;
  for (int idx : scaling_indices(spec_q, 0)) beta[idx] *= scale;

  EstimationResult res;
  res.theta_hat.beta = beta;
  res.theta_hat.eta = Eigen::VectorXd(0);
  QuantileProblem original(fs, spec_q);
  original.param_bound = options.param_bound * std::max(1.0, scale);
  res.objective = original.objective(beta);
  res.converged = best.converged;
  res.n_restarts_used = static_cast<int>(starts.starts.size());
  res.feasible = res.objective < kPenaltyBase;
  return res;
}

}  // namespace esenc::mestim
