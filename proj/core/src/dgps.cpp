#include "esenc/dgps.hpp"

#include <cmath>

#include "esenc/rng.hpp"
#include "esenc/special.hpp"

namespace esenc::dgp {

namespace {

struct TailConstants {
  double z;   // alpha quantile of N(0,1)
  double xi;  // alpha ES of N(0,1)
};

TailConstants normal_tail() {
  return {num::normal_quantile(kDgpAlpha), num::normal_es(kDgpAlpha)};
}

void check_spec(const DgpSpec& spec) {
  if (!(spec.pi >= 0.0 && spec.pi <= 1.0)) {
    throw data_error("combination weight pi must lie in [0, 1]");
  }
  if (spec.n < 1) throw data_error("path length must be at least 1");
  if (spec.burn_in < 0) throw data_error("burn-in must be non-negative");
}

struct PathBuffers {
  Eigen::VectorXd y, q1, e1, q2, e2;
  explicit PathBuffers(int n) : y(n), q1(n), e1(n), q2(n), e2(n) {}

  ForecastSet to_set() const {
    return ForecastSet(y, q1, q2, e1, e2, ProbLevel(kDgpAlpha));
  }
};

}  // namespace

std::string family_name(DgpFamily family) {
  switch (family) {
    case DgpFamily::GarchCombo:
      return "garch";
    case DgpFamily::GasTCombo:
      return "gas-t";
    case DgpFamily::VarEsGasCombo:
      return "vares-gas";
    case DgpFamily::EsCaviarCombo:
      return "es-caviar";
  }
  return "?";
}

DgpFamily parse_family(const std::string& name) {
  if (name == "garch") return DgpFamily::GarchCombo;
  if (name == "gas-t") return DgpFamily::GasTCombo;
  if (name == "vares-gas") return DgpFamily::VarEsGasCombo;
  if (name == "es-caviar") return DgpFamily::EsCaviarCombo;
  throw data_error("unknown DGP family '" + name +
                   "' (expected garch, gas-t, vares-gas or es-caviar)");
}

ForecastSet simulate_garch_combo(const DgpSpec& spec, DgpDiagnostics* diag) {
  check_spec(spec);
  const TailConstants tail = normal_tail();
  CounterRng shocks(stream_key(spec.seed, 0x6A5Cu));

  // GARCH(1,1) and GJR-GARCH(1,1) calibrated to daily IBM returns; both
  // components are driven by the same standard normal shocks.
  double sig2_1 = 0.042 / (1.0 - 0.053 - 0.925);
  double sig2_2 = 0.044 / (1.0 - 0.024 - 0.5 * 0.058 - 0.923);
  double y1 = 0.0, y2 = 0.0;
  bool warm = false;

  PathBuffers out(spec.n);
  const int total = spec.burn_in + spec.n;
  for (int t = 0; t < total; ++t) {
    if (warm) {
      sig2_1 = 0.042 + 0.053 * y1 * y1 + 0.925 * sig2_1;
      sig2_2 = 0.044 + (0.024 + 0.058 * (y2 <= 0.0 ? 1.0 : 0.0)) * y2 * y2 +
               0.923 * sig2_2;
    }
    warm = true;
    const double s1 = std::sqrt(sig2_1);
    const double s2 = std::sqrt(sig2_2);
    const double u = shocks.next_normal();
    y1 = s1 * u;
    y2 = s2 * u;
    const double y = ((1.0 - spec.pi) * s1 + spec.pi * s2) * u;
    const int i = t - spec.burn_in;
    if (i >= 0) {
      out.y[i] = y;
      out.q1[i] = tail.z * s1;
      out.e1[i] = tail.xi * s1;
      out.q2[i] = tail.z * s2;
      out.e2[i] = tail.xi * s2;
    }
  }
  if (diag) *diag = {};
  return out.to_set();
}

TGasState tgas_initial_state(const TGasParams& params) {
  TGasState st;
  st.sigma2 = params.kappa_s / std::max(1e-8, 1.0 - params.b_s);
  if (!(st.sigma2 > 0.0)) st.sigma2 = 1.0;
  // The nu recursion has no stable fixed point for the calibrated loadings;
  // start from the middle of the admissible range.
  st.nu = std::clamp(params.kappa_nu / (1.0 - params.b_nu), 2.1, 200.0);
  if (!std::isfinite(st.nu)) st.nu = 10.0;
  return st;
}

bool tgas_step(const TGasParams& params, double y, TGasState& state) {
  const double d = (y - params.mu) * (y - params.mu);
  const double nu = state.nu;
  const double s2 = state.sigma2;
  const double denom = nu * s2 + d;

  // Inverse-Fisher scaled scores of the location-scale Student-t.
  const double score_s2 =
      s2 * (nu + 3.0) / nu * ((nu + 1.0) * d / denom - 1.0);

  // Plain score for the degrees of freedom: its Fisher information decays
  // like nu^-3, so an inverse-Fisher forcing is unbounded and makes the
  // already explosive recursion bounce between the clamps.  With a bounded
  // forcing the recursion settles at the upper clamp instead.
  const double score_nu =
      0.5 * (num::digamma(0.5 * (nu + 1.0)) - num::digamma(0.5 * nu) -
             1.0 / nu - std::log1p(d / (nu * s2)) +
             (nu + 1.0) * d / (nu * denom));

  double sigma2 = params.kappa_s + params.b_s * s2 + params.a_s * score_s2;
  double nu_next = params.kappa_nu + params.b_nu * nu + params.a_nu * score_nu;
  if (!std::isfinite(sigma2) || !std::isfinite(nu_next)) {
    throw unstable_recursion("t-GAS state became non-finite");
  }
  if (sigma2 < 1e-8) sigma2 = 1e-8;
  const bool clamped = nu_next < 2.1 || nu_next > 200.0;
  state.sigma2 = sigma2;
  state.nu = std::clamp(nu_next, 2.1, 200.0);
  return clamped;
}

ForecastSet simulate_gas_t_combo(const DgpSpec& spec, DgpDiagnostics* diag) {
  check_spec(spec);
  const TailConstants tail = normal_tail();
  CounterRng shocks1(stream_key(spec.seed, 0x6A51u));
  CounterRng shocks2(stream_key(spec.seed, 0x6A52u));
  CounterRng mixing(stream_key(spec.seed, 0x6A53u));

  // Component 1: the Gaussian volatility model of the GARCH family.
  double sig2_1 = 0.042 / (1.0 - 0.053 - 0.925);
  double y1 = 0.0;
  bool warm = false;

  // Component 2: Student-t score-driven variance and degrees of freedom.
  const TGasParams tp;
  TGasState st = tgas_initial_state(tp);
  double y2 = tp.mu;

  PathBuffers out(spec.n);
  long clamp_count = 0;
  long comp2_count = 0;
  const int total = spec.burn_in + spec.n;
  for (int t = 0; t < total; ++t) {
    if (warm) {
      sig2_1 = 0.042 + 0.053 * y1 * y1 + 0.925 * sig2_1;
      clamp_count += tgas_step(tp, y2, st) ? 1 : 0;
    }
    warm = true;
    const double s1 = std::sqrt(sig2_1);
    const double s2 = std::sqrt(st.sigma2);
    const double nu = st.nu;

    y1 = s1 * shocks1.next_normal();
    y2 = tp.mu + s2 * num::student_t_quantile(shocks2.next_uniform(), nu);
    const bool use2 = mixing.next_bernoulli(spec.pi);
    comp2_count += use2 ? 1 : 0;
    const double y = use2 ? y2 : y1;

    const int i = t - spec.burn_in;
    if (i >= 0) {
      out.y[i] = y;
      out.q1[i] = tail.z * s1;
      out.e1[i] = tail.xi * s1;
      out.q2[i] = tp.mu + s2 * num::student_t_quantile(kDgpAlpha, nu);
      out.e2[i] = tp.mu + s2 * num::student_t_es(kDgpAlpha, nu);
    }
  }
  if (diag) {
    diag->nu_clamp_fraction = double(clamp_count) / double(std::max(1, total - 1));
    diag->component2_fraction = double(comp2_count) / double(total);
  }
  return out.to_set();
}

ForecastSet simulate_varesgas_combo(const DgpSpec& spec, DgpDiagnostics* diag) {
  check_spec(spec);
  const TailConstants tail = normal_tail();
  CounterRng shocks1(stream_key(spec.seed, 0x6B51u));
  CounterRng shocks2(stream_key(spec.seed, 0x6B52u));
  CounterRng mixing(stream_key(spec.seed, 0x6B53u));

  // One-factor model: (q, e) = (-1.164, -1.757) exp(kappa).
  double kappa = 0.0;
  double q1 = -1.164, e1 = -1.757;
  // Two-factor model initialized at the zero-forcing fixed point.
  double q2 = -0.009 / (1.0 - 0.993);
  double e2 = -0.010 / (1.0 - 0.994);

  double y1 = 0.0, y2 = 0.0;
  bool warm = false;
  long comp2_count = 0;

  PathBuffers out(spec.n);
  const int total = spec.burn_in + spec.n;
  for (int t = 0; t < total; ++t) {
    if (warm) {
      const double hit1 = (y1 <= q1) ? 1.0 : 0.0;
      kappa = 0.995 * kappa +
              (0.007 / e1) * (hit1 * y1 / kDgpAlpha - e1);
      const double hit2 = (y2 <= q2) ? 1.0 : 0.0;
      const double lam1 = q2 * (kDgpAlpha - hit2);
      const double lam2 = hit2 * y2 / kDgpAlpha - e2;
      // Loadings assign the quantile forcing to the quantile equation; the
      // row-major reading mixes the large ES forcing into the quantile
      // equation and loses the ES < VaR ordering within a few steps.
      const double q2_next = -0.009 + 0.993 * q2 - 0.358 * lam1 - 0.003 * lam2;
      const double e2_next = -0.010 + 0.994 * e2 - 0.351 * lam1 - 0.003 * lam2;
      q2 = q2_next;
      e2 = e2_next;
      q1 = -1.164 * std::exp(kappa);
      e1 = -1.757 * std::exp(kappa);
    }
    warm = true;
    if (!(q1 < 0.0 && e1 < 0.0 && q2 < 0.0 && e2 < 0.0) ||
        !std::isfinite(q1 + e1 + q2 + e2)) {
      throw unstable_recursion("VaR/ES GAS recursion left the negative orthant");
    }
    if (!(e1 < q1 && e2 < q2)) {
      throw unstable_recursion("VaR/ES GAS recursion lost the ES < VaR ordering");
    }

    // Component draws matching the forecast pair exactly in distribution.
    const double mu1 = q1 - tail.z * (e1 - q1) / (tail.xi - tail.z);
    const double s1 = (e1 - q1) / (tail.xi - tail.z);
    const double mu2 = q2 - tail.z * (e2 - q2) / (tail.xi - tail.z);
    const double s2 = (e2 - q2) / (tail.xi - tail.z);
    y1 = mu1 + s1 * shocks1.next_normal();
    y2 = mu2 + s2 * shocks2.next_normal();
    const bool use2 = mixing.next_bernoulli(spec.pi);
    comp2_count += use2 ? 1 : 0;
    const double y = use2 ? y2 : y1;

    const int i = t - spec.burn_in;
    if (i >= 0) {
      out.y[i] = y;
      out.q1[i] = q1;
      out.e1[i] = e1;
      out.q2[i] = q2;
      out.e2[i] = e2;
    }
  }
  if (diag) {
    *diag = {};
    diag->component2_fraction = double(comp2_count) / double(total);
  }
  return out.to_set();
}

ForecastSet simulate_escaviar_combo(const DgpSpec& spec, DgpDiagnostics* diag) {
  check_spec(spec);
  const TailConstants tail = normal_tail();
  CounterRng noise(stream_key(spec.seed, 0x6C51u));
  const double sigma = 0.1;

  // Both quantile recursions are driven by the observed return path; the
  // shared offset recursion produces e = q - x with x clamped at zero.
  double q1 = -0.1, q2 = -0.1;
  double x1 = 0.0, x2 = 0.0;
  double y = 0.0;
  bool warm = false;

  auto update_x = [&spec](double x_prev, double q_prev, double y_now) {
    const bool printed_condition = q_prev <= y_now;
    const bool update = spec.escaviar_update_on_violations ? !printed_condition
                                                           : printed_condition;
    if (!update) return x_prev;
    const double x = 0.00017 + 0.125 * (q_prev - y_now) + 0.84 * q_prev;
    return std::max(x, 0.0);
  };

  PathBuffers out(spec.n);
  const int total = spec.burn_in + spec.n;
  for (int t = 0; t < total; ++t) {
    if (warm) {
      const double a = std::abs(y);
      const double q1_next = -0.0003 - 0.05 * a * (y >= 0.0 ? 1.0 : 0.0) -
                             0.15 * a * (y < 0.0 ? 1.0 : 0.0) + 0.8 * q1;
      const double q2_next = -0.0003 - 0.1 * a + 0.8 * q2;
      x1 = update_x(x1, q1, y);
      x2 = update_x(x2, q2, y);
      q1 = q1_next;
      q2 = q2_next;
    }
    warm = true;
    if (!std::isfinite(q1 + q2 + x1 + x2) || !(q1 < 0.0 && q2 < 0.0)) {
      throw unstable_recursion("ES-CAViaR recursion became degenerate");
    }
    const double e1 = q1 - x1;
    const double e2 = q2 - x2;

    // Noise centered so that its own alpha-ES is exactly zero.
    const double eps = -sigma * tail.xi + sigma * noise.next_normal();
    y = (1.0 - spec.pi) * e1 + spec.pi * e2 + eps;

    const int i = t - spec.burn_in;
    if (i >= 0) {
      out.y[i] = y;
      out.q1[i] = q1;
      out.e1[i] = e1;
      out.q2[i] = q2;
      out.e2[i] = e2;
    }
  }
  if (diag) *diag = {};
  return out.to_set();
}

ForecastSet simulate(const DgpSpec& spec, DgpDiagnostics* diag) {
  switch (spec.family) {
    case DgpFamily::GarchCombo:
      return simulate_garch_combo(spec, diag);
    case DgpFamily::GasTCombo:
      return simulate_gas_t_combo(spec, diag);
    case DgpFamily::VarEsGasCombo:
      return simulate_varesgas_combo(spec, diag);
    case DgpFamily::EsCaviarCombo:
      return simulate_escaviar_combo(spec, diag);
  }
  throw data_error("unknown DGP family");
}

}  // namespace esenc::dgp
