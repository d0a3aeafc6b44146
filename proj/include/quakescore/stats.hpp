#pragma once

#include <cstddef>
#include <span>

namespace quakescore {
namespace stats {

// Standard normal CDF, evaluated through erfc so the tails keep full
// relative accuracy.
double normal_cdf(double z);

// Upper one-sided normal p-value, 1 - Phi(z), without cancellation.
double normal_sf(double z);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, absolute accuracy ~1e-14 over the ranges used here.
double regularized_incomplete_beta(double a, double b, double x);

// Student-t CDF with nu > 0 degrees of freedom.
double student_t_cdf(double t, double nu);

// Upper one-sided Student-t p-value, 1 - Psi_nu(t).
double student_t_sf(double t, double nu);

// Kolmogorov-Smirnov distance between a sample and the uniform law on
// [0, 1]. Input values need not be sorted.
double ks_uniform_statistic(std::span<const double> values);

// Asymptotic p-value for the one-sample KS test against Uniform(0,1),
// using Stephens' small-sample correction of the Kolmogorov limit law.
double ks_uniform_pvalue(double d, std::size_t n);

} // namespace stats
} // namespace quakescore
