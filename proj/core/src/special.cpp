#include "esenc/special.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "esenc/rng.hpp"
#include "esenc/types.hpp"

namespace esenc {

double CounterRng::next_normal() { return num::normal_quantile(next_uniform()); }

}  // namespace esenc

namespace esenc::num {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double normal_pdf(double x) { return boost::math::pdf(kStdNormal, x); }

double normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double normal_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

double normal_es(double alpha) {
  const double z = normal_quantile(alpha);
  return -normal_pdf(z) / alpha;
}

double chi2_sf(double x, int df) {
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double student_t_pdf(double x, double nu) {
  boost::math::students_t_distribution<double> dist(nu);
  return boost::math::pdf(dist, x);
}

double student_t_cdf(double x, double nu) {
  boost::math::students_t_distribution<double> dist(nu);
  return boost::math::cdf(dist, x);
}

double student_t_quantile(double p, double nu) {
  boost::math::students_t_distribution<double> dist(nu);
  return boost::math::quantile(dist, p);
}

double student_t_es(double alpha, double nu) {
  if (nu <= 1.0) throw domain_error("student_t_es requires nu > 1");
  const double q = student_t_quantile(alpha, nu);
  return -student_t_pdf(q, nu) * (nu + q * q) / ((nu - 1.0) * alpha);
}

double digamma(double x) { return boost::math::digamma(x); }

double trigamma(double x) { return boost::math::trigamma(x); }

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

double mad(const double* data, long n) {
  if (n <= 0) throw length_mismatch("mad of an empty series");
  std::vector<double> work(data, data + n);
  const double med = median_inplace(work);
  for (double& w : work) w = std::abs(w - med);
  return median_inplace(work);
}

}  // namespace esenc::num
