#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace esenc {

// Invalid user input (bad series, bad probability level, ...).  The CLI maps
// these to exit code 2.
class data_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class length_mismatch : public data_error {
public:
  using data_error::data_error;
};

class non_finite : public data_error {
public:
  using data_error::data_error;
};

class non_negative_es : public data_error {
public:
  using data_error::data_error;
};

class collinear_forecasts : public data_error {
public:
  using data_error::data_error;
};

// Numerical failure during estimation, covariance construction or
// simulation.  The CLI maps these to exit code 3.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class domain_error : public numeric_error {
public:
  using numeric_error::numeric_error;
};

class no_feasible_start : public numeric_error {
public:
  using numeric_error::numeric_error;
};

class singular_lambda : public numeric_error {
public:
  using numeric_error::numeric_error;
};

class singular_omega : public numeric_error {
public:
  using numeric_error::numeric_error;
};

class unstable_recursion : public numeric_error {
public:
  using numeric_error::numeric_error;
};

class fit_diverged : public numeric_error {
public:
  using numeric_error::numeric_error;
};

//! Tail probability level, constrained to (0, 1).
class ProbLevel {
public:
  explicit ProbLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw data_error("probability level must lie strictly in (0, 1), got " +
                       std::to_string(alpha));
    }
  }

  double value() const noexcept { return alpha_; }

private:
  double alpha_;
};

//! Combination parameter vector split into the quantile block (beta) and the
//! expected shortfall block (eta).
struct Theta {
  Eigen::VectorXd beta;
  Eigen::VectorXd eta;

  Eigen::Index size() const { return beta.size() + eta.size(); }

  Eigen::VectorXd stacked() const {
    Eigen::VectorXd out(size());
    out << beta, eta;
    return out;
  }

  static Theta split(const Eigen::VectorXd& theta, Eigen::Index k_beta) {
    Theta out;
    out.beta = theta.head(k_beta);
    out.eta = theta.tail(theta.size() - k_beta);
    return out;
  }
};

}  // namespace esenc
