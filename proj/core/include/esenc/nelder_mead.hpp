#pragma once

#include <Eigen/Core>
#include <functional>

namespace esenc::opt {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int evals = 0;
  bool converged = false;
};

//! Derivative-free simplex minimizer.  Convergence is declared once the
//! spread of objective values over the simplex falls below `tol`.  The
//! search is fully deterministic for a given starting point.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double tol,
                             int max_evals);

}  // namespace esenc::opt
