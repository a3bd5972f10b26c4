#pragma once

#include <Eigen/Core>
#include <optional>

#include "esenc/types.hpp"

namespace esenc {

//! Aligned out-of-sample series: realizations plus two competitors' ES
//! forecasts, optionally their VaR forecasts.  Validated on construction and
//! immutable afterwards, so instances can be shared freely across Monte
//! Carlo workers.
class ForecastSet {
public:
  static constexpr double kCollinearityTol = 1e-10;

  ForecastSet(Eigen::VectorXd y, std::optional<Eigen::VectorXd> q1,
              std::optional<Eigen::VectorXd> q2, Eigen::VectorXd e1,
              Eigen::VectorXd e2, ProbLevel alpha);

  Eigen::Index size() const { return y_.size(); }
  bool has_var_forecasts() const { return q1_.has_value(); }

  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::VectorXd& e1() const { return e1_; }
  const Eigen::VectorXd& e2() const { return e2_; }
  const Eigen::VectorXd& q1() const;
  const Eigen::VectorXd& q2() const;
  ProbLevel alpha() const { return alpha_; }

  //! Same data with the two forecasters swapped.
  ForecastSet swapped() const;

  //! Same data with (y, q, e) multiplied by c > 0.
  ForecastSet scaled(double c) const;

private:
  Eigen::VectorXd y_;
  std::optional<Eigen::VectorXd> q1_, q2_;
  Eigen::VectorXd e1_, e2_;
  ProbLevel alpha_;
};

ForecastSet make_forecast_set(Eigen::VectorXd y, std::optional<Eigen::VectorXd> q1,
                              std::optional<Eigen::VectorXd> q2,
                              Eigen::VectorXd e1, Eigen::VectorXd e2,
                              double alpha);

}  // namespace esenc
