#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "esenc/dgps.hpp"
#include "esenc/estimation.hpp"
#include "esenc/parallel.hpp"
#include "esenc/rng.hpp"
#include "esenc/special.hpp"

using namespace esenc;

namespace {

const links::LinkSpec kLink = links::LinkSpec::of(links::LinkKind::LinearIntercept);

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("joint estimation is consistent under the null") {
  // Pure-scale data generated by forecaster 1; theta* = (0,1,0,0,1,0).
  const int seeds = 20;
  std::vector<double> worst(seeds);
  parallel_for(seeds, 0, [&](int s) {
    dgp::DgpSpec spec;
    spec.family = dgp::DgpFamily::GarchCombo;
    spec.pi = 0.0;
    spec.n = 8000;
    spec.seed = 1000 + s;
    const ForecastSet fs = dgp::simulate(spec);
    mestim::EstimateOptions opt;
    opt.seed = stream_key(spec.seed, 1);
    const auto res =
        mestim::estimate(fs, kLink, kLink, mestim::EstimationMode::JointOrAux, opt);
    Eigen::VectorXd target(6);
    target << 0, 1, 0, 0, 1, 0;
    worst[s] = (res.theta_hat.stacked() - target).cwiseAbs().maxCoeff();
  });
  CHECK(median(worst) < 0.15);
}

TEST_CASE("strict-mode quantile block carries the tail-ratio transformation") {
  // With collinear VaR and ES forecasts the strict quantile equation stays
  // correctly specified after scaling the slopes by z/xi.
  const double scale = num::normal_quantile(0.025) / num::normal_es(0.025);
  const int seeds = 20;
  std::vector<double> diff2(seeds), diff3(seeds);
  parallel_for(seeds, 0, [&](int s) {
    dgp::DgpSpec spec;
    spec.family = dgp::DgpFamily::GarchCombo;
    spec.pi = 0.0;
    spec.n = 4000;
    spec.seed = 2000 + s;
    const ForecastSet fs = dgp::simulate(spec);
    mestim::EstimateOptions opt;
    opt.seed = stream_key(spec.seed, 2);
    const auto joint =
        mestim::estimate(fs, kLink, kLink, mestim::EstimationMode::JointOrAux, opt);
    const auto strict =
        mestim::estimate(fs, kLink, kLink, mestim::EstimationMode::Strict, opt);
    diff2[s] = std::abs(strict.theta_hat.beta[1] - scale * joint.theta_hat.beta[1]);
    diff3[s] = std::abs(strict.theta_hat.beta[2] - scale * joint.theta_hat.beta[2]);
  });
  CHECK(median(diff2) < 0.1);
  CHECK(median(diff3) < 0.1);
}

TEST_CASE("objective regression values on a fixed seed") {
  dgp::DgpSpec spec;
  spec.family = dgp::DgpFamily::GarchCombo;
  spec.pi = 0.0;
  spec.n = 4000;
  spec.seed = 20240817;
  const ForecastSet fs = dgp::simulate(spec);
  Theta null_theta{(Eigen::Vector3d() << 0, 1, 0).finished(),
                   (Eigen::Vector3d() << 0, 1, 0).finished()};
  Theta equal_weight{(Eigen::Vector3d() << 0, 0.5, 0.5).finished(),
                     (Eigen::Vector3d() << 0, 0.5, 0.5).finished()};
  const double at_null = mestim::objective(
      fs, kLink, kLink, mestim::EstimationMode::JointOrAux, null_theta);
  const double at_equal = mestim::objective(
      fs, kLink, kLink, mestim::EstimationMode::JointOrAux, equal_weight);
  // Frozen from the first run of this fixture; guards the loss plumbing.
  CHECK(at_null == doctest::Approx(1.1475991759898931).epsilon(1e-12));
  CHECK(at_equal == doctest::Approx(1.1518924917945741).epsilon(1e-12));
  CHECK(at_null < at_equal);
}
