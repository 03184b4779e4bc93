#pragma once

#include <cstddef>

namespace mrfgof {

// P(D_n < d) for the one-sample Kolmogorov statistic with n observations
// (Marsaglia, Tsang & Wang 2003).
double kolmogorov_cdf(double d, std::size_t n);

inline double kolmogorov_pvalue(double d, std::size_t n) { return 1.0 - kolmogorov_cdf(d, n); }

}  // namespace mrfgof
