#pragma once

#include <cstddef>

namespace extnet {

// Standard normal CDF.
double norm_cdf(double x);

// Standard normal quantile, Wichura's algorithm AS 241 (PPND16).
// Requires p in (0, 1).
double norm_quantile(double p);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (Lentz's method).
double reg_inc_beta(double a, double b, double x);

// Two-sided p-value of a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Two-sided p-value of a standard-normal (Wald) statistic.
double normal_two_sided_p(double z);

// Sample quantile with linear interpolation between order statistics
// (the "type 7" rule: h = (n-1)p, interpolate x[floor h], x[floor h + 1]).
// Sorts a copy of the input. Requires a nonempty input and p in [0, 1].
double quantile_type7(const double* values, std::size_t n, double p);

}  // namespace extnet
