#pragma once

namespace fga {

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double x, double a, double b);

// Snedecor F distribution with (d1, d2) degrees of freedom. All functions
// throw DomainError for non-positive degrees of freedom or NaN arguments.
double f_cdf(double x, double d1, double d2);

// 1 - f_cdf(x), evaluated without cancellation.
double f_sf(double x, double d1, double d2);

// Smallest x with f_cdf(x) >= prob; prob in [0, 1], 1 maps to +inf.
double f_quantile(double prob, double d1, double d2);

}  // namespace fga
