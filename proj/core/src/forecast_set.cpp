#include "esenc/forecast_set.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace esenc {

namespace {

void require_same_length(Eigen::Index n, const Eigen::VectorXd& v,
                         const char* name) {
  if (v.size() != n) {
    throw length_mismatch(std::string(name) + " has length " +
                          std::to_string(v.size()) + ", expected " +
                          std::to_string(n));
  }
}

void require_finite(const Eigen::VectorXd& v, const char* name) {
  for (Eigen::Index t = 0; t < v.size(); ++t) {
    if (!std::isfinite(v[t])) {
      throw non_finite(std::string(name) + " has a non-finite entry at row " +
                       std::to_string(t));
    }
  }
}

//! Rejects affine dependence between two non-constant forecast series: the
//! regressor matrix [1, f1, f2] is column-centered (which annihilates the
//! intercept column) and the singular values of the remaining two columns are
//! compared.  A pair of constant series has sigma_max == 0 and passes; the
//! identical-series case is caught separately.
void require_identified(const Eigen::VectorXd& f1, const Eigen::VectorXd& f2,
                        const char* what) {
  const Eigen::Index n = f1.size();
  Eigen::MatrixXd x(n, 2);
  x.col(0) = f1.array() - f1.mean();
  x.col(1) = f2.array() - f2.mean();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const auto& sv = svd.singularValues();
  if (sv[1] < ForecastSet::kCollinearityTol * sv[0]) {
    throw collinear_forecasts(std::string(what) +
                              " forecasts are collinear (singular value ratio " +
                              std::to_string(sv[1] / sv[0]) + ")");
  }
}

}  // namespace

ForecastSet::ForecastSet(Eigen::VectorXd y, std::optional<Eigen::VectorXd> q1,
                         std::optional<Eigen::VectorXd> q2, Eigen::VectorXd e1,
                         Eigen::VectorXd e2, ProbLevel alpha)
    : y_(std::move(y)),
      q1_(std::move(q1)),
      q2_(std::move(q2)),
      e1_(std::move(e1)),
      e2_(std::move(e2)),
      alpha_(alpha) {
  const Eigen::Index n = y_.size();
  if (n < 1) throw length_mismatch("realization series is empty");
  if (q1_.has_value() != q2_.has_value()) {
    throw length_mismatch("VaR forecasts must be supplied for both models or neither");
  }
  require_same_length(n, e1_, "e1");
  require_same_length(n, e2_, "e2");
  require_finite(y_, "y");
  require_finite(e1_, "e1");
  require_finite(e2_, "e2");
  for (Eigen::Index t = 0; t < n; ++t) {
    if (!(e1_[t] < 0.0) || !(e2_[t] < 0.0)) {
      throw non_negative_es("ES forecasts must be strictly negative, violated at row " +
                            std::to_string(t));
    }
  }
  if (e1_ == e2_) {
    throw collinear_forecasts("the two ES forecast series are identical");
  }
  if (q1_) {
    require_same_length(n, *q1_, "q1");
    require_same_length(n, *q2_, "q2");
    require_finite(*q1_, "q1");
    require_finite(*q2_, "q2");
    for (Eigen::Index t = 0; t < n; ++t) {
      if ((*q1_)[t] < e1_[t] || (*q2_)[t] < e2_[t]) {
        throw data_error("VaR forecast below ES forecast at row " +
                         std::to_string(t));
      }
    }
    require_identified(*q1_, *q2_, "VaR");
  }
  require_identified(e1_, e2_, "ES");
}

const Eigen::VectorXd& ForecastSet::q1() const {
  if (!q1_) throw data_error("forecast set carries no VaR forecasts");
  return *q1_;
}

const Eigen::VectorXd& ForecastSet::q2() const {
  if (!q2_) throw data_error("forecast set carries no VaR forecasts");
  return *q2_;
}

ForecastSet ForecastSet::swapped() const {
  return ForecastSet(y_, q2_, q1_, e2_, e1_, alpha_);
}

ForecastSet ForecastSet::scaled(double c) const {
  if (!(c > 0.0)) throw data_error("scale factor must be positive");
  auto scale_opt = [&](const std::optional<Eigen::VectorXd>& v) {
    return v ? std::optional<Eigen::VectorXd>(*v * c) : std::nullopt;
  };
  return ForecastSet(y_ * c, scale_opt(q1_), scale_opt(q2_), e1_ * c, e2_ * c,
                     alpha_);
}

ForecastSet make_forecast_set(Eigen::VectorXd y, std::optional<Eigen::VectorXd> q1,
                              std::optional<Eigen::VectorXd> q2,
                              Eigen::VectorXd e1, Eigen::VectorXd e2,
                              double alpha) {
  return ForecastSet(std::move(y), std::move(q1), std::move(q2), std::move(e1),
                     std::move(e2), ProbLevel(alpha));
}

}  // namespace esenc
