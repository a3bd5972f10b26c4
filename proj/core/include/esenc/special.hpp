#pragma once

namespace esenc::num {

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

//! Lower-tail mean of the standard normal: E[Z | Z <= q_alpha] = -phi(q)/alpha.
double normal_es(double alpha);

//! Survival function of the chi-squared distribution, 1 - F_df(x).
double chi2_sf(double x, int df);

// Student-t with nu degrees of freedom, standard (unit scale) form.
double student_t_pdf(double x, double nu);
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

//! Lower-tail mean of the standard Student-t at level alpha:
//! E[T | T <= q] = -f(q) (nu + q^2) / ((nu - 1) alpha).
double student_t_es(double alpha, double nu);

double digamma(double x);
double trigamma(double x);

//! Median absolute deviation about the median, no consistency scaling.
double mad(const double* data, long n);

}  // namespace esenc::num
