#pragma once

#include <cstdint>
#include <string>

#include "esenc/forecast_set.hpp"

namespace esenc::dgp {

//! All families simulate returns from a convex combination of two component
//! models, with combination weight pi.  pi = 0 makes the first forecaster's
//! null hypothesis true by construction, pi = 1 the second's.
enum class DgpFamily { GarchCombo, GasTCombo, VarEsGasCombo, EsCaviarCombo };

std::string family_name(DgpFamily family);
DgpFamily parse_family(const std::string& name);

//! Tail level the generators are calibrated to.
inline constexpr double kDgpAlpha = 0.025;

struct DgpSpec {
  DgpFamily family = DgpFamily::GarchCombo;
  double pi = 0.0;
  int n = 1000;
  int burn_in = 1000;
  std::uint64_t seed = 1;
  //! Escape hatch for the ES-CAViaR offset recursion, which as calibrated
  //! updates the offset on non-violations; setting this flips the update to
  //! violation days.
  bool escaviar_update_on_violations = false;
};

struct DgpDiagnostics {
  //! Fraction of steps on which the t-GAS degrees-of-freedom state had to be
  //! clamped back into [2.1, 200].
  double nu_clamp_fraction = 0.0;
  //! Realized frequency of component-2 draws under Bernoulli mixing.
  double component2_fraction = 0.0;
};

ForecastSet simulate_garch_combo(const DgpSpec& spec,
                                 DgpDiagnostics* diag = nullptr);
ForecastSet simulate_gas_t_combo(const DgpSpec& spec,
                                 DgpDiagnostics* diag = nullptr);
ForecastSet simulate_varesgas_combo(const DgpSpec& spec,
                                    DgpDiagnostics* diag = nullptr);
ForecastSet simulate_escaviar_combo(const DgpSpec& spec,
                                    DgpDiagnostics* diag = nullptr);

ForecastSet simulate(const DgpSpec& spec, DgpDiagnostics* diag = nullptr);

// Score-driven state of the Student-t component of the GasTCombo family,
// shared with the forecasting-model fits.
struct TGasParams {
  double mu = 0.0659;
  double kappa_s = 0.00599;
  double a_s = 0.146;
  double b_s = 0.994;
  double kappa_nu = -1.737;
  double a_nu = 7.563;
  double b_nu = 7.381;
};

struct TGasState {
  double sigma2;
  double nu;
};

//! One score update with inverse-Fisher scaling on (sigma^2, nu); nu is
//! clamped to [2.1, 200].  Returns whether the clamp was active.
bool tgas_step(const TGasParams& params, double y, TGasState& state);

TGasState tgas_initial_state(const TGasParams& params);

}  // namespace esenc::dgp
