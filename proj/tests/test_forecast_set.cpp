#include <doctest.h>

#include "esenc/forecast_set.hpp"

using namespace esenc;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("constant feasible series are accepted") {
  const ForecastSet fs = make_forecast_set(vec({-1, 0, 1}), std::nullopt,
                                           std::nullopt, vec({-2, -2, -2}),
                                           vec({-3, -3, -3}), 0.025);
  CHECK(fs.size() == 3);
  CHECK_FALSE(fs.has_var_forecasts());
}

TEST_CASE("zero ES entry is rejected") {
  CHECK_THROWS_AS(make_forecast_set(vec({-1, 0, 1}), std::nullopt, std::nullopt,
                                    vec({-2, 0.0, -2}), vec({-3, -3, -3}),
                                    0.025),
                  non_negative_es);
}

TEST_CASE("identical ES series are rejected") {
  CHECK_THROWS_AS(make_forecast_set(vec({-1, 0, 1}), std::nullopt, std::nullopt,
                                    vec({-2, -2.5, -2}), vec({-2, -2.5, -2}),
                                    0.025),
                  collinear_forecasts);
}

TEST_CASE("affinely dependent ES series are rejected") {
  const Eigen::VectorXd e1 = vec({-2.0, -2.5, -3.0, -2.2});
  const Eigen::VectorXd e2 = 2.0 * e1 + Eigen::VectorXd::Constant(4, 0.5);
  CHECK_THROWS_AS(make_forecast_set(vec({1, 2, 3, 4}), std::nullopt,
                                    std::nullopt, e1, e2, 0.025),
                  collinear_forecasts);
}

TEST_CASE("length and finiteness checks name the offending series") {
  CHECK_THROWS_AS(make_forecast_set(vec({1, 2}), std::nullopt, std::nullopt,
                                    vec({-1, -2, -3}), vec({-2, -3, -4}), 0.025),
                  length_mismatch);
  CHECK_THROWS_AS(make_forecast_set(vec({1, NAN}), std::nullopt, std::nullopt,
                                    vec({-1, -2}), vec({-2, -3}), 0.025),
                  non_finite);
  CHECK_THROWS_AS(make_forecast_set(vec({}), std::nullopt, std::nullopt, vec({}),
                                    vec({}), 0.025),
                  length_mismatch);
}

TEST_CASE("VaR below ES is rejected per observation") {
  CHECK_THROWS_AS(make_forecast_set(vec({0, 0, 0}), vec({-2.5, -1, -1}),
                                    vec({-1, -1, -1.2}), vec({-2, -2.1, -2.2}),
                                    vec({-3, -3.1, -3.2}), 0.025),
                  data_error);
}

TEST_CASE("one-sided VaR forecasts are rejected") {
  CHECK_THROWS_AS(ForecastSet(vec({0, 0}), vec({-1, -1}), std::nullopt,
                              vec({-2, -2.2}), vec({-3, -3.1}), ProbLevel(0.025)),
                  length_mismatch);
}

TEST_CASE("alpha bounds enforced") {
  CHECK_THROWS_AS(ProbLevel(0.0), data_error);
  CHECK_THROWS_AS(ProbLevel(1.0), data_error);
  CHECK_THROWS_AS(ProbLevel(-0.1), data_error);
  CHECK(ProbLevel(0.025).value() == 0.025);
}

TEST_CASE("construction is idempotent") {
  const ForecastSet fs =
      make_forecast_set(vec({-1, 0, 1}), vec({-1.5, -1.6, -1.4}),
                        vec({-1.2, -1.05, -1.3}), vec({-2, -2.14, -1.9}),
                        vec({-3, -2.88, -3.1}), 0.025);
  const ForecastSet again(fs.y(), fs.q1(), fs.q2(), fs.e1(), fs.e2(), fs.alpha());
  CHECK(again.y() == fs.y());
  CHECK(again.q1() == fs.q1());
  CHECK(again.q2() == fs.q2());
  CHECK(again.e1() == fs.e1());
  CHECK(again.e2() == fs.e2());
}

TEST_CASE("swapped and scaled views") {
  const ForecastSet fs =
      make_forecast_set(vec({-1, 0, 1}), vec({-1.5, -1.6, -1.4}),
                        vec({-1.2, -1.05, -1.3}), vec({-2, -2.14, -1.9}),
                        vec({-3, -2.88, -3.1}), 0.025);
  const ForecastSet sw = fs.swapped();
  CHECK(sw.e1() == fs.e2());
  CHECK(sw.q2() == fs.q1());
  const ForecastSet sc = fs.scaled(10.0);
  CHECK(sc.y()[2] == doctest::Approx(10.0));
  CHECK(sc.e2()[0] == doctest::Approx(-30.0));
  CHECK_THROWS_AS(fs.scaled(0.0), data_error);
}
