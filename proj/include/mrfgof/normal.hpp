#pragma once

namespace mrfgof {

// Standard normal CDF via erfc, accurate in both tails.
double normal_cdf(double x);

// Inverse of normal_cdf (Wichura's AS 241, about 1e-16 relative accuracy).
// Returns -inf / +inf at p = 0 / 1.
double normal_quantile(double p);

// Standard bivariate normal P(X1 <= h, X2 <= k) with correlation rho.
// Drezner-Wesolowsky / Genz Gauss-Legendre scheme, absolute error below 1e-14
// in practice. Throws ConfigError for |rho| >= 1.
double bvn_cdf(double h, double k, double rho);

}  // namespace mrfgof
