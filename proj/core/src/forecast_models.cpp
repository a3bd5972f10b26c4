#include "esenc/forecast_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "esenc/dgps.hpp"
#include "esenc/nelder_mead.hpp"
#include "esenc/parallel.hpp"
#include "esenc/rng.hpp"
#include "esenc/special.hpp"

namespace esenc::fc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBigPenalty = 1e10;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Paths {
  Eigen::VectorXd q, e;
  double penalty = 0.0;  // distance to a feasible forecast path
};

//! Mean FZ0 loss of a forecast path against the realizations it predicts,
//! with infeasible paths mapped onto a penalty ramp.
double fz0_path_objective(const Eigen::VectorXd& y, const Paths& paths,
                          double alpha, int t0, int t1) {
  if (paths.penalty > 0.0) return kBigPenalty + std::min(paths.penalty, kBigPenalty);
  double acc = 0.0;
  double pen = 0.0;
  for (int t = t0; t < t1; ++t) {
    const double q = paths.q[t];
    const double e = paths.e[t];
    if (!(e < -1e-8) || e > q) {
      pen += std::max(0.0, e + 1e-8) * std::max(0.0, e + 1e-8) + 1.0;
      continue;
    }
    const double hit = (y[t] <= q) ? 1.0 : 0.0;
    const double inner = e - q + (q - y[t]) * hit / alpha;
    acc += -inner / e + std::log(-e);
  }
  if (pen > 0.0 || !std::isfinite(acc)) return kBigPenalty + std::min(pen, kBigPenalty);
  return acc / double(t1 - t0);
}

// ---------------------------------------------------------------------------
// Filters.  Element t of a path forecasts y[t] from information through t-1.
// ---------------------------------------------------------------------------

Paths path_histsim(const Eigen::VectorXd& y, int t0, int window, double alpha) {
  const int n = static_cast<int>(y.size());
  Paths out;
  out.q = Eigen::VectorXd::Constant(n, kNaN);
  out.e = Eigen::VectorXd::Constant(n, kNaN);
  std::vector<double> buf(window);
  for (int t = t0; t < n; ++t) {
    if (t < window) throw data_error("HistSim needs a full trailing window");
    std::copy(y.data() + t - window, y.data() + t, buf.begin());
    std::sort(buf.begin(), buf.end());
    const int k = static_cast<int>(std::ceil(window * alpha));
    const double q = buf[std::max(0, k - 1)];
    int below = 0;
    double tail_sum = 0.0;
    int tail_count = 0;
    for (double v : buf) {
      if (v < q) ++below;
      if (v <= q) {
        tail_sum += v;
        ++tail_count;
      } else {
        break;
      }
    }
    out.q[t] = q;
    out.e[t] = (below < 2) ? buf.front() : tail_sum / tail_count;
  }
  return out;
}

Paths path_riskmetrics(const Eigen::VectorXd& y, int t0, double s0, double alpha) {
  const int n = static_cast<int>(y.size());
  const double z = num::normal_quantile(alpha);
  const double xi = num::normal_es(alpha);
  Paths out;
  out.q.resize(n);
  out.e.resize(n);
  double s2 = s0;
  for (int t = 0; t < n; ++t) {
    const double s = std::sqrt(s2);
    out.q[t] = z * s;
    out.e[t] = xi * s;
    s2 = 0.94 * s2 + 0.06 * y[t] * y[t];
  }
  (void)t0;
  return out;
}

struct GjrParams {
  double omega, a, gamma, b, nu;
};

Paths path_gjr(const GjrParams& p, const Eigen::VectorXd& y, double s0,
               double alpha) {
  const int n = static_cast<int>(y.size());
  // Standardized-t tail multipliers at the fitted degrees of freedom.
  const double unit = std::sqrt((p.nu - 2.0) / p.nu);
  const double zq = num::student_t_quantile(alpha, p.nu) * unit;
  const double ze = num::student_t_es(alpha, p.nu) * unit;
  Paths out;
  out.q.resize(n);
  out.e.resize(n);
  double s2 = s0;
  for (int t = 0; t < n; ++t) {
    if (!(s2 > 0.0) || !std::isfinite(s2)) {
      out.penalty += 1.0;
      s2 = s0;
    }
    const double s = std::sqrt(s2);
    out.q[t] = zq * s;
    out.e[t] = ze * s;
    const double hit = (y[t] <= 0.0) ? 1.0 : 0.0;
    s2 = p.omega + (p.a + p.gamma * hit) * y[t] * y[t] + p.b * s2;
  }
  return out;
}

double gjr_nll(const GjrParams& p, const Eigen::VectorXd& y, double s0) {
  const int n = static_cast<int>(y.size());
  const double persistence = p.a + 0.5 * p.gamma + p.b;
  if (persistence >= 0.9995) {
    return kBigPenalty + (persistence - 0.9995) * (persistence - 0.9995);
  }
  const double log_c = std::lgamma(0.5 * (p.nu + 1.0)) - std::lgamma(0.5 * p.nu) -
                       0.5 * std::log(M_PI * (p.nu - 2.0));
  double s2 = s0;
  double nll = 0.0;
  for (int t = 0; t < n; ++t) {
    if (!(s2 > 1e-12) || !std::isfinite(s2)) return kBigPenalty + 1.0;
    const double x = y[t] / std::sqrt(s2);
    nll += 0.5 * std::log(s2) - log_c +
           0.5 * (p.nu + 1.0) * std::log1p(x * x / (p.nu - 2.0));
    const double hit = (y[t] <= 0.0) ? 1.0 : 0.0;
    s2 = p.omega + (p.a + p.gamma * hit) * y[t] * y[t] + p.b * s2;
  }
  if (!std::isfinite(nll)) return kBigPenalty + 1.0;
  return nll / double(n);
}

dgp::TGasParams decode_tgas(const Eigen::VectorXd& raw) {
  dgp::TGasParams p;
  p.mu = raw[0];
  p.kappa_s = raw[1];
  p.a_s = raw[2];
  p.b_s = raw[3];
  p.kappa_nu = raw[4];
  p.a_nu = raw[5];
  p.b_nu = raw[6];
  return p;
}

Paths path_tgas(const dgp::TGasParams& p, const Eigen::VectorXd& y, double var0,
                double alpha) {
  const int n = static_cast<int>(y.size());
  Paths out;
  out.q.resize(n);
  out.e.resize(n);
  dgp::TGasState st;
  st.sigma2 = (p.b_s < 1.0 && p.kappa_s > 0.0)
                  ? p.kappa_s / (1.0 - p.b_s)
                  : var0;
  if (!(st.sigma2 > 0.0) || !std::isfinite(st.sigma2)) st.sigma2 = var0;
  st.nu = (p.b_nu < 1.0) ? std::clamp(p.kappa_nu / (1.0 - p.b_nu), 2.1, 200.0)
                         : 10.0;
  if (!std::isfinite(st.nu)) st.nu = 10.0;
  for (int t = 0; t < n; ++t) {
    const double s = std::sqrt(st.sigma2);
    out.q[t] = p.mu + s * num::student_t_quantile(alpha, st.nu);
    out.e[t] = p.mu + s * num::student_t_es(alpha, st.nu);
    try {
      dgp::tgas_step(p, y[t], st);
    } catch (const unstable_recursion&) {
      out.penalty += 1.0;
      st.sigma2 = var0;
      st.nu = 10.0;
    }
  }
  return out;
}

double tgas_nll(const dgp::TGasParams& p, const Eigen::VectorXd& y, double var0) {
  const int n = static_cast<int>(y.size());
  dgp::TGasState st;
  st.sigma2 = (p.b_s < 1.0 && p.kappa_s > 0.0) ? p.kappa_s / (1.0 - p.b_s) : var0;
  if (!(st.sigma2 > 0.0) || !std::isfinite(st.sigma2)) st.sigma2 = var0;
  st.nu = (p.b_nu < 1.0) ? std::clamp(p.kappa_nu / (1.0 - p.b_nu), 2.1, 200.0)
                         : 10.0;
  double nll = 0.0;
  for (int t = 0; t < n; ++t) {
    const double nu = st.nu;
    const double s2 = st.sigma2;
    const double d = (y[t] - p.mu) * (y[t] - p.mu);
    nll += -std::lgamma(0.5 * (nu + 1.0)) + std::lgamma(0.5 * nu) +
           0.5 * std::log(nu * M_PI * s2) +
           0.5 * (nu + 1.0) * std::log1p(d / (nu * s2));
    try {
      dgp::tgas_step(p, y[t], st);
    } catch (const unstable_recursion&) {
      return kBigPenalty + 1.0;
    }
  }
  if (!std::isfinite(nll)) return kBigPenalty + 1.0;
  return nll / double(n);
}

struct Gas1fParams {
  double cq, ce, b, a;
};

Paths path_gas1f(const Gas1fParams& p, const Eigen::VectorXd& y, double alpha) {
  const int n = static_cast<int>(y.size());
  Paths out;
  out.q.resize(n);
  out.e.resize(n);
  double kappa = 0.0;
  for (int t = 0; t < n; ++t) {
    const double grow = std::exp(kappa);
    if (!std::isfinite(grow) || grow > 1e6) {
      out.penalty += 1.0;
      kappa = 0.0;
      out.q[t] = p.cq;
      out.e[t] = p.ce;
      continue;
    }
    const double q = p.cq * grow;
    const double e = p.ce * grow;
    out.q[t] = q;
    out.e[t] = e;
    const double hit = (y[t] <= q) ? 1.0 : 0.0;
    kappa = p.b * kappa + (p.a / e) * (hit * y[t] / alpha - e);
  }
  return out;
}

struct Gas2fParams {
  double wq, we, bq, be;
  double a11, a12, a21, a22;
};

Paths path_gas2f(const Gas2fParams& p, const Eigen::VectorXd& y, double alpha,
                 double q0, double e0) {
  const int n = static_cast<int>(y.size());
  Paths out;
  out.q.resize(n);
  out.e.resize(n);
  double q = q0, e = e0;
  for (int t = 0; t < n; ++t) {
    if (!std::isfinite(q) || !std::isfinite(e) || q >= 0.0 || e >= 0.0) {
      out.penalty += 1.0;
      q = q0;
      e = e0;
    }
    out.q[t] = q;
    out.e[t] = e;
    const double hit = (y[t] <= q) ? 1.0 : 0.0;
    const double lam1 = q * (alpha - hit);
    const double lam2 = hit * y[t] / alpha - e;
    const double qn = p.wq + p.bq * q + p.a11 * lam1 + p.a12 * lam2;
    const double en = p.we + p.be * e + p.a21 * lam1 + p.a22 * lam2;
    q = qn;
    e = en;
  }
  return out;
}

struct CaviarParams {
  bool asymmetric;
  double c, a_pos, a_neg, b;  // SAV uses a_pos for both slopes
  double g0, g1, g2;
};

Paths path_escaviar(const CaviarParams& p, const Eigen::VectorXd& y,
                    double q0_init, double /*alpha*/) {
  const int n = static_cast<int>(y.size());
  Paths out;
  out.q.resize(n);
  out.e.resize(n);
  double q = q0_init;
  double x = 0.0;
  for (int t = 0; t < n; ++t) {
    if (!std::isfinite(q) || q >= 0.0 || !std::isfinite(x)) {
      out.penalty += 1.0;
      q = q0_init;
      x = 0.0;
    }
    out.q[t] = q;
    out.e[t] = q - x;
    const double a = std::abs(y[t]);
    double qn;
    if (p.asymmetric) {
      qn = p.c - p.a_pos * a * (y[t] >= 0.0 ? 1.0 : 0.0) -
           p.a_neg * a * (y[t] < 0.0 ? 1.0 : 0.0) + p.b * q;
    } else {
      qn = p.c - p.a_pos * a + p.b * q;
    }
    if (q <= y[t]) {
      x = std::max(0.0, p.g0 + p.g1 * (q - y[t]) + p.g2 * q);
    }
    q = qn;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fitting.
// ---------------------------------------------------------------------------

struct FitProblem {
  std::function<double(const Eigen::VectorXd&)> objective;
  std::vector<Eigen::VectorXd> starts;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> decode;
};

std::vector<Eigen::VectorXd> perturbed_starts(const Eigen::VectorXd& center,
                                              int count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> out;
  out.push_back(center);
  CounterRng rng(stream_key(seed, 0xF175u));
  for (int s = 1; s < count; ++s) {
    Eigen::VectorXd v = center;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] += 0.5 * rng.next_uniform() - 0.25;
    }
    out.push_back(v);
  }
  return out;
}

FittedModel run_fit(const ModelSpec& spec, const FitProblem& problem,
                    const FitOptions& options) {
  opt::NelderMeadResult best;
  best.fx = std::numeric_limits<double>::infinity();
  for (const auto& s : problem.starts) {
    opt::NelderMeadResult r =
        opt::nelder_mead(problem.objective, s, options.tol, options.max_evals);
    opt::NelderMeadResult r2 =
        opt::nelder_mead(problem.objective, r.x, options.tol, options.max_evals);
    if (r2.fx <= r.fx) r = r2;
    if (r.fx < best.fx) best = r;
  }
  if (!std::isfinite(best.fx) || best.fx >= kBigPenalty) {
    throw fit_diverged("fit of model '" + model_name(spec.kind) +
                       "' did not reach a feasible optimum (objective " +
                       std::to_string(best.fx) + ")");
  }
  FittedModel out;
  out.spec = spec;
  out.params = problem.decode(best.x);
  out.converged = best.converged;
  out.objective = best.fx;
  return out;
}

double empirical_quantile(const Eigen::VectorXd& y, double alpha) {
  std::vector<double> buf(y.data(), y.data() + y.size());
  std::sort(buf.begin(), buf.end());
  const int k = std::max<int>(1, static_cast<int>(std::ceil(buf.size() * alpha)));
  return buf[k - 1];
}

}  // namespace

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::HistSim:
      return "histsim";
    case ModelKind::RiskMetrics:
      return "riskmetrics";
    case ModelKind::GjrGarchT:
      return "gjr-garch-t";
    case ModelKind::GasT:
      return "gas-t";
    case ModelKind::Gas1F:
      return "gas-1f";
    case ModelKind::Gas2F:
      return "gas-2f";
    case ModelKind::EsCaviarAS:
      return "es-caviar-as";
    case ModelKind::EsCaviarSAV:
      return "es-caviar-sav";
  }
  return "?";
}

ModelKind parse_model(const std::string& name) {
  if (name == "histsim") return ModelKind::HistSim;
  if (name == "riskmetrics") return ModelKind::RiskMetrics;
  if (name == "gjr-garch-t") return ModelKind::GjrGarchT;
  if (name == "gas-t") return ModelKind::GasT;
  if (name == "gas-1f") return ModelKind::Gas1F;
  if (name == "gas-2f") return ModelKind::Gas2F;
  if (name == "es-caviar-as") return ModelKind::EsCaviarAS;
  if (name == "es-caviar-sav") return ModelKind::EsCaviarSAV;
  throw data_error("unknown forecasting model '" + name + "'");
}

FittedModel fit(const ModelSpec& spec, const Eigen::VectorXd& insample,
                const FitOptions& options) {
  if (insample.size() < 250) {
    throw data_error("model estimation needs at least 250 in-sample returns");
  }
  if (spec.kind == ModelKind::HistSim && spec.window < 20) {
    throw data_error("HistSim window must be at least 20");
  }
  const double var0 = insample.array().square().mean();
  const double alpha = spec.alpha;

  switch (spec.kind) {
    case ModelKind::HistSim:
    case ModelKind::RiskMetrics: {
      FittedModel out;
      out.spec = spec;
      out.params = Eigen::VectorXd(0);
      return out;
    }
    case ModelKind::GjrGarchT: {
      FitProblem prob;
      auto decode = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd raw(5);
        raw << std::exp(p[0]), std::exp(p[1]), std::exp(p[2]), sigmoid(p[3]),
            2.05 + std::exp(p[4]);
        return raw;
      };
      prob.decode = decode;
      prob.objective = [&insample, var0, decode](const Eigen::VectorXd& p) {
        const Eigen::VectorXd raw = decode(p);
        return gjr_nll({raw[0], raw[1], raw[2], raw[3], raw[4]}, insample, var0);
      };
      Eigen::VectorXd start(5);
      start << std::log(0.044), std::log(0.024), std::log(0.058), logit(0.923),
          std::log(8.0 - 2.05);
      prob.starts = perturbed_starts(start, options.n_starts, options.seed);
      return run_fit(spec, prob, options);
    }
    case ModelKind::GasT: {
      FitProblem prob;
      auto decode = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd raw(7);
        raw << p[0], std::exp(p[1]), std::exp(p[2]), sigmoid(p[3]), p[4],
            std::exp(p[5]), sigmoid(p[6]);
        return raw;
      };
      prob.decode = decode;
      prob.objective = [&insample, var0, decode](const Eigen::VectorXd& p) {
        return tgas_nll(decode_tgas(decode(p)), insample, var0);
      };
      // Stable start: variance block at the simulation calibration, the
      // degrees-of-freedom block mean-reverting around nu = 10.
      Eigen::VectorXd start(7);
      start << insample.mean(), std::log(0.006), std::log(0.146), logit(0.994),
          0.3, std::log(0.05), logit(0.97);
      prob.starts = perturbed_starts(start, options.n_starts, options.seed);
      return run_fit(spec, prob, options);
    }
    case ModelKind::Gas1F: {
      FitProblem prob;
      auto decode = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd raw(4);
        const double cq = -std::exp(p[0]);
        raw << cq, cq - std::exp(p[1]), sigmoid(p[2]), p[3];
        return raw;
      };
      prob.decode = decode;
      prob.objective = [&insample, alpha, decode](const Eigen::VectorXd& p) {
        const Eigen::VectorXd raw = decode(p);
        const Paths paths = path_gas1f({raw[0], raw[1], raw[2], raw[3]},
                                       insample, alpha);
        return fz0_path_objective(insample, paths, alpha, 0,
                                  static_cast<int>(insample.size()));
      };
      Eigen::VectorXd start(4);
      start << std::log(1.164), std::log(1.757 - 1.164), logit(0.995), 0.007;
      prob.starts = perturbed_starts(start, options.n_starts, options.seed);
      return run_fit(spec, prob, options);
    }
    case ModelKind::Gas2F: {
      FitProblem prob;
      auto decode = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd raw(8);
        raw << p[0], p[1], sigmoid(p[2]), sigmoid(p[3]), p[4], p[5], p[6], p[7];
        return raw;
      };
      prob.decode = decode;
      const double q0 = empirical_quantile(insample, alpha);
      prob.objective = [&insample, alpha, q0, decode](const Eigen::VectorXd& p) {
        const Eigen::VectorXd raw = decode(p);
        const Gas2fParams gp{raw[0], raw[1], raw[2], raw[3],
                             raw[4], raw[5], raw[6], raw[7]};
        const Paths paths = path_gas2f(gp, insample, alpha, q0, 1.2 * q0);
        return fz0_path_objective(insample, paths, alpha, 0,
                                  static_cast<int>(insample.size()));
      };
      Eigen::VectorXd start(8);
      start << -0.009, -0.010, logit(0.993), logit(0.994), -0.358, -0.003,
          -0.351, -0.003;
      prob.starts = perturbed_starts(start, options.n_starts, options.seed);
      return run_fit(spec, prob, options);
    }
    case ModelKind::EsCaviarAS:
    case ModelKind::EsCaviarSAV: {
      const bool asym = spec.kind == ModelKind::EsCaviarAS;
      FitProblem prob;
      auto decode = [asym](const Eigen::VectorXd& p) {
        if (asym) {
          Eigen::VectorXd raw(7);
          raw << p[0], std::exp(p[1]), std::exp(p[2]), sigmoid(p[3]), p[4],
              p[5], p[6];
          return raw;
        }
        Eigen::VectorXd raw(6);
        raw << p[0], std::exp(p[1]), sigmoid(p[2]), p[3], p[4], p[5];
        return raw;
      };
      prob.decode = decode;
      const double q0 = empirical_quantile(insample, alpha);
      prob.objective = [&insample, alpha, q0, asym, decode](const Eigen::VectorXd& p) {
        const Eigen::VectorXd raw = decode(p);
        CaviarParams cp;
        cp.asymmetric = asym;
        if (asym) {
          cp = {true, raw[0], raw[1], raw[2], raw[3], raw[4], raw[5], raw[6]};
        } else {
          cp = {false, raw[0], raw[1], raw[1], raw[2], raw[3], raw[4], raw[5]};
        }
        const Paths paths = path_escaviar(cp, insample, q0, alpha);
        return fz0_path_objective(insample, paths, alpha, 0,
                                  static_cast<int>(insample.size()));
      };
      Eigen::VectorXd start(asym ? 7 : 6);
      if (asym) {
        start << -0.0003, std::log(0.05), std::log(0.15), logit(0.8), 0.00017,
            0.125, 0.84;
      } else {
        start << -0.0003, std::log(0.1), logit(0.8), 0.00017, 0.125, 0.84;
      }
      prob.starts = perturbed_starts(start, options.n_starts, options.seed);
      return run_fit(spec, prob, options);
    }
  }
  throw data_error("unknown forecasting model kind");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> forecast_path(
    const FittedModel& fitted, const Eigen::VectorXd& returns, int m) {
  const int n = static_cast<int>(returns.size());
  if (m <= 0 || m >= n) {
    throw data_error("in-sample size must satisfy 0 < m < T");
  }
  const double alpha = fitted.spec.alpha;
  const Eigen::VectorXd insample = returns.head(m);
  const double var0 = insample.array().square().mean();

  Paths paths;
  switch (fitted.spec.kind) {
    case ModelKind::HistSim:
      if (m < fitted.spec.window) {
        throw data_error("HistSim needs at least `window` in-sample returns");
      }
      paths = path_histsim(returns, m, fitted.spec.window, alpha);
      break;
    case ModelKind::RiskMetrics:
      paths = path_riskmetrics(returns, m, var0, alpha);
      break;
    case ModelKind::GjrGarchT: {
      const auto& p = fitted.params;
      paths = path_gjr({p[0], p[1], p[2], p[3], p[4]}, returns, var0, alpha);
      break;
    }
    case ModelKind::GasT:
      paths = path_tgas(decode_tgas(fitted.params), returns, var0, alpha);
      break;
    case ModelKind::Gas1F: {
      const auto& p = fitted.params;
      paths = path_gas1f({p[0], p[1], p[2], p[3]}, returns, alpha);
      break;
    }
    case ModelKind::Gas2F: {
      const auto& p = fitted.params;
      const double q0 = empirical_quantile(insample, alpha);
      paths = path_gas2f({p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]},
                         returns, alpha, q0, 1.2 * q0);
      break;
    }
    case ModelKind::EsCaviarAS:
    case ModelKind::EsCaviarSAV: {
      const auto& p = fitted.params;
      CaviarParams cp;
      if (fitted.spec.kind == ModelKind::EsCaviarAS) {
        cp = {true, p[0], p[1], p[2], p[3], p[4], p[5], p[6]};
      } else {
        cp = {false, p[0], p[1], p[1], p[2], p[3], p[4], p[5]};
      }
      const double q0 = empirical_quantile(insample, alpha);
      paths = path_escaviar(cp, returns, q0, alpha);
      break;
    }
  }
  return {paths.q.segment(m, n - m), paths.e.segment(m, n - m)};
}

PairwiseResult pairwise_matrix(const Eigen::VectorXd& returns, int m,
                               const std::vector<ModelSpec>& models,
                               const PairwiseOptions& options) {
  const int n_models = static_cast<int>(models.size());
  if (n_models < 2) throw data_error("pairwise testing needs at least 2 models");
  const int n = static_cast<int>(returns.size());
  if (m <= 0 || m >= n) throw data_error("in-sample size must satisfy 0 < m < T");

  PairwiseResult out;
  out.models = models;
  for (auto v : options.variants) {
    out.pvalues.emplace(v, Eigen::MatrixXd::Constant(n_models, n_models, kNaN));
    out.outcome_freq.emplace(v, Eigen::MatrixX4d::Zero(n_models, 4));
  }
  out.na_reason.assign(n_models, std::vector<std::string>(n_models));

  // Fit all models, then roll the forecasts forward.
  std::vector<std::optional<FittedModel>> fitted(n_models);
  std::vector<std::string> fit_error(n_models);
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> forecasts(n_models);
  parallel_for(n_models, options.n_workers, [&](int i) {
    try {
      FitOptions fo = options.fit;
      fo.seed = stream_key(options.fit.seed, 0xF17Cu, i);
      fitted[i] = fit(models[i], returns.head(m), fo);
      forecasts[i] = forecast_path(*fitted[i], returns, m);
    } catch (const std::exception& ex) {
      fit_error[i] = ex.what();
    }
  });

  struct Pair {
    int i, j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < n_models; ++i) {
    for (int j = i + 1; j < n_models; ++j) pairs.push_back({i, j});
  }

  const Eigen::VectorXd oos = returns.tail(n - m);
  std::mutex mutex;
  parallel_for(static_cast<int>(pairs.size()), options.n_workers, [&](int p) {
    const auto [i, j] = pairs[p];
    std::string reason;
    std::map<enc::TestVariant, std::pair<enc::TestReport, enc::TestReport>> suite;
    if (!fit_error[i].empty() || !fit_error[j].empty()) {
      reason = !fit_error[i].empty() ? "model " + model_name(models[i].kind) +
                                           ": " + fit_error[i]
                                     : "model " + model_name(models[j].kind) +
                                           ": " + fit_error[j];
    } else {
      try {
        ForecastSet fs(oos, forecasts[i].first, forecasts[j].first,
                       forecasts[i].second, forecasts[j].second,
                       ProbLevel(models[i].alpha));
        enc::TestOptions topt = options.test;
        topt.estimation.seed = stream_key(options.test.estimation.seed, i, j);
        suite = enc::run_suite(fs, options.variants, topt);
      } catch (const std::exception& ex) {
        reason = ex.what();
      }
    }
    std::lock_guard<std::mutex> lock(mutex);
    if (!reason.empty()) {
      out.na_reason[i][j] = reason;
      out.na_reason[j][i] = reason;
      return;
    }
    for (const auto& [variant, reports] : suite) {
      out.pvalues[variant](i, j) = reports.first.p_value;
      out.pvalues[variant](j, i) = reports.second.p_value;
    }
  });

  // Outcome frequencies per model row, over the pairs that ran.
  for (auto v : options.variants) {
    const Eigen::MatrixXd& pv = out.pvalues[v];
    for (int i = 0; i < n_models; ++i) {
      Eigen::Vector4d counts = Eigen::Vector4d::Zero();
      int ran = 0;
      for (int j = 0; j < n_models; ++j) {
        if (j == i || std::isnan(pv(i, j)) || std::isnan(pv(j, i))) continue;
        const enc::Decision d = enc::decide(pv(i, j), pv(j, i), options.level);
        counts[static_cast<int>(d.outcome)] += 1.0;
        ++ran;
      }
      if (ran > 0) out.outcome_freq[v].row(i) = counts.transpose() / double(ran);
    }
  }
  return out;
}

}  // namespace esenc::fc
