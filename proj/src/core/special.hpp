#pragma once

namespace paikit {

// Standard normal CDF and upper tail.
double normal_cdf(double x);
double normal_sf(double x);

// Inverse standard normal CDF (Wichura's PPND16), |error| < 1e-15 for
// p in (0, 1). Out-of-range p returns +/-infinity.
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Upper tail of the F distribution with (df1, df2) degrees of freedom.
double f_sf(double f, double df1, double df2);

}  // namespace paikit
