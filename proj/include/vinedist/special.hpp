#pragma once

namespace vinedist::special {

double norm_pdf(double x);
double norm_cdf(double x);

// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
double norm_quantile(double p);

// Regularized incomplete beta function I_x(a, b) and its inverse in x.
double inc_beta(double a, double b, double x);
double inc_beta_inv(double a, double b, double p);

// Student t with real degrees of freedom nu > 0.
double t_pdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

// First Debye function D_1(x) = (1/x) * int_0^x t/(e^t - 1) dt, x > 0.
double debye1(double x);

}  // namespace vinedist::special
