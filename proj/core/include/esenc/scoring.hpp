#pragma once

#include <Eigen/Core>
#include <cmath>

#include "esenc/types.hpp"

namespace esenc::scoring {

//! Joint (VaR, ES) loss, homogeneous of degree zero.  Requires e < 0.
inline double fz0_loss(double y, double q, double e, double alpha) {
  if (!(e < 0.0)) throw domain_error("fz0_loss requires a negative ES forecast");
  const double hit = (y <= q) ? 1.0 : 0.0;
  const double inner = e - q + (q - y) * hit / alpha;
  return -inner / e + std::log(-e);
}

//! Quantile check loss used by the VaR-only baseline test.
inline double tick_loss(double y, double q, double alpha) {
  const double hit = (y <= q) ? 1.0 : 0.0;
  return (hit - alpha) * (q - y);
}

//! Identification function value, split like Theta.
struct PsiValue {
  Eigen::VectorXd psi_q;
  Eigen::VectorXd psi_e;
};

//! Almost-everywhere gradient of the composed FZ0 loss with respect to the
//! combination parameters, evaluated at link values (q, e) with link
//! gradients grad_q and grad_e.
inline PsiValue psi(double y, double q, double e, const Eigen::VectorXd& grad_q,
                    const Eigen::VectorXd& grad_e, double alpha) {
  if (!(e < 0.0)) throw domain_error("psi requires a negative ES link value");
  const double hit = (y <= q) ? 1.0 : 0.0;
  const double inner = e - q + (q - y) * hit / alpha;
  PsiValue out;
  out.psi_q = -grad_q * ((hit - alpha) / (alpha * e));
  out.psi_e = grad_e * (inner / (e * e));
  return out;
}

}  // namespace esenc::scoring
