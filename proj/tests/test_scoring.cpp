#include <doctest.h>

#include <cmath>

#include "esenc/links.hpp"
#include "esenc/rng.hpp"
#include "esenc/scoring.hpp"

using namespace esenc;

TEST_CASE("fz0 loss at hand-computed points") {
  // -(1/-3)(-3 - (-2)) + log 3
  CHECK(scoring::fz0_loss(1.0, -2.0, -3.0, 0.025) ==
        doctest::Approx(0.7652789553347765).epsilon(1e-14));
  // exact hit with e = q = y
  CHECK(scoring::fz0_loss(-1.0, -1.0, -1.0, 0.3) == doctest::Approx(0.0));
  // -(1/-2.5)(-0.5 + 40) + log 2.5
  CHECK(scoring::fz0_loss(-3.0, -2.0, -2.5, 0.025) ==
        doctest::Approx(16.716290731874155).epsilon(1e-14));
}

TEST_CASE("fz0 loss rejects non-negative ES") {
  CHECK_THROWS_AS(scoring::fz0_loss(0.0, -1.0, 0.0, 0.025), domain_error);
  CHECK_THROWS_AS(scoring::fz0_loss(0.0, -1.0, 0.5, 0.025), domain_error);
}

TEST_CASE("fz0 loss is zero-homogeneous up to log c") {
  CounterRng rng(31);
  for (int i = 0; i < 200; ++i) {
    const double y = 4.0 * rng.next_uniform() - 2.0;
    const double e = -0.5 - 3.0 * rng.next_uniform();
    const double q = e + 2.0 * rng.next_uniform();
    const double alpha = 0.01 + 0.2 * rng.next_uniform();
    for (double c : {0.1, 2.0, 10.0}) {
      const double lhs = scoring::fz0_loss(c * y, c * q, c * e, alpha) -
                         scoring::fz0_loss(y, q, e, alpha);
      CHECK(lhs == doctest::Approx(std::log(c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tick loss values and non-negativity") {
  CHECK(scoring::tick_loss(-2.0, -2.0, 0.13) == doctest::Approx(0.0));
  CHECK(scoring::tick_loss(-3.0, -2.0, 0.025) == doctest::Approx(0.975));
  CHECK(scoring::tick_loss(1.0, -2.0, 0.025) == doctest::Approx(0.075));
  CounterRng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double y = rng.next_normal();
    const double q = rng.next_normal();
    CHECK(scoring::tick_loss(y, q, 0.1) >= 0.0);
  }
}

TEST_CASE("psi at the hand-computed point") {
  Eigen::VectorXd gq(3), ge(3);
  gq << 1.0, -2.0, -1.0;
  ge << 1.0, -3.0, -4.0;
  const auto v = scoring::psi(1.0, -2.0, -3.0, gq, ge, 0.025);
  CHECK(v.psi_q[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(v.psi_q[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(v.psi_q[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(v.psi_e[0] == doctest::Approx(-1.0 / 9.0).epsilon(1e-14));
  CHECK(v.psi_e[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(v.psi_e[2] == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("psi at an exact hit") {
  Eigen::VectorXd gq(2), ge(2);
  gq << 0.5, -1.5;
  ge << 2.0, 0.25;
  const double alpha = 0.05;
  const auto v = scoring::psi(-2.0, -2.0, -2.0, gq, ge, alpha);
  CHECK(v.psi_e.norm() == doctest::Approx(0.0));
  const Eigen::VectorXd expect = -gq * (1.0 - alpha) / (alpha * -2.0);
  CHECK((v.psi_q - expect).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

namespace {

// Composed loss theta -> fz0(y, g^q(f, beta), g^e(f, eta)) for the
// finite-difference oracle.
double composed_loss(const links::LinkSpec& spec, double y, double qf1,
                     double qf2, double ef1, double ef2,
                     const Eigen::VectorXd& theta, double alpha) {
  const double gq = links::link_value(spec, qf1, qf2, theta.head(spec.k));
  const double ge = links::link_value(spec, ef1, ef2, theta.tail(spec.k));
  return scoring::fz0_loss(y, gq, ge, alpha);
}

}  // namespace

TEST_CASE("psi equals the finite-difference gradient away from the kink") {
  const auto spec = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  CounterRng rng(99);
  int tested = 0;
  while (tested < 500) {
    const double qf1 = -1.0 - 2.0 * rng.next_uniform();
    const double qf2 = -1.0 - 2.0 * rng.next_uniform();
    const double ef1 = qf1 - 1.0 - rng.next_uniform();
    const double ef2 = qf2 - 1.0 - rng.next_uniform();
    const double y = 4.0 * rng.next_uniform() - 3.0;
    Eigen::VectorXd theta(6);
    theta << 0.1 * rng.next_uniform() - 0.05, 1.0 + 0.2 * rng.next_uniform(),
        0.2 * rng.next_uniform(), 0.1 * rng.next_uniform() - 0.05,
        1.0 + 0.2 * rng.next_uniform(), 0.2 * rng.next_uniform();
    const double alpha = 0.025;
    const double gq = links::link_value(spec, qf1, qf2, theta.head(3));
    const double ge = links::link_value(spec, ef1, ef2, theta.tail(3));
    const double h = 1e-6 * std::max(1.0, theta.cwiseAbs().maxCoeff());
    if (!(ge < 0.0) || std::abs(y - gq) <= 10.0 * h) continue;
    ++tested;

    const auto v = scoring::psi(y, gq, ge, links::link_gradient(spec, qf1, qf2, theta.head(3)),
                                links::link_gradient(spec, ef1, ef2, theta.tail(3)), alpha);
    Eigen::VectorXd analytic(6);
    analytic << v.psi_q, v.psi_e;
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd up = theta, dn = theta;
      up[i] += h;
      dn[i] -= h;
      const double fd = (composed_loss(spec, y, qf1, qf2, ef1, ef2, up, alpha) -
                         composed_loss(spec, y, qf1, qf2, ef1, ef2, dn, alpha)) /
                        (2.0 * h);
      CHECK(analytic[i] ==
            doctest::Approx(fd).epsilon(1e-5).scale(std::max(1.0, std::abs(fd))));
    }
  }
}
