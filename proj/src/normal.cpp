#include "mrfgof/normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "mrfgof/errors.hpp"

namespace mrfgof {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("normal_quantile: p outside [0,1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0 ? -val : val;
}

namespace {

struct GaussLegendre {
  std::array<double, 10> x;
  std::array<double, 10> w;
  int n;
};

// Positive half of the 6-, 12- and 20-point rules.
constexpr GaussLegendre kRule6{{0.23861918608319693, 0.6612093864662645, 0.932469514203152},
                               {0.46791393457269137, 0.36076157304813894, 0.17132449237916975},
                               3};
constexpr GaussLegendre kRule12{{0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                                 0.7699026741943047, 0.9041172563704748, 0.9815606342467192},
                                {0.2491470458134027, 0.23349253653835464, 0.20316742672306565,
                                 0.1600783285433461, 0.10693932599531888, 0.04717533638651202},
                                6};
constexpr GaussLegendre kRule20{{0.07652652113349734, 0.2277858511416451, 0.37370608871541955,
                                 0.5108670019508271, 0.636053680726515, 0.7463319064601508,
                                 0.8391169718222188, 0.9122344282513258, 0.9639719272779138,
                                 0.9931285991850949},
                                {0.15275338713072578, 0.14917298647260366, 0.14209610931838187,
                                 0.13168863844917653, 0.11819453196151825, 0.10193011981724026,
                                 0.08327674157670467, 0.06267204833410944, 0.04060142980038622,
                                 0.017614007139153273},
                                10};

// Upper orthant P(X1 > h, X2 > k).
double bvn_upper(double h, double k, double r) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const GaussLegendre& gl = std::fabs(r) < 0.3 ? kRule6 : (std::fabs(r) < 0.75 ? kRule12 : kRule20);
  double hk = h * k;
  double bvn = 0.0;
  if (std::fabs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (int i = 0; i < gl.n; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double sn = std::sin(asr * (sgn * gl.x[i] + 1.0) / 2.0);
        bvn += gl.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return bvn * asr / (2.0 * two_pi) + normal_cdf(-h) * normal_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::fabs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < gl.n; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double xs = (a * (sgn * gl.x[i] + 1.0)) * (a * (sgn * gl.x[i] + 1.0));
        const double rs = std::sqrt(1.0 - xs);
        const double asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          bvn += a * gl.w[i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn = -bvn / two_pi;
  }
  if (r > 0.0) return bvn + normal_cdf(-std::max(h, k));
  return -bvn + std::max(0.0, normal_cdf(-h) - normal_cdf(-k));
}

}  // namespace

double bvn_cdf(double h, double k, double rho) {
  if (!(std::fabs(rho) < 1.0)) throw ConfigError("bvn_cdf: |rho| must be < 1");
  if (std::isnan(h) || std::isnan(k)) throw ConfigError("bvn_cdf: NaN limit");
  if (h == -std::numeric_limits<double>::infinity() || k == -std::numeric_limits<double>::infinity()) {
    return 0.0;
  }
  if (h == std::numeric_limits<double>::infinity()) return normal_cdf(k);
  if (k == std::numeric_limits<double>::infinity()) return normal_cdf(h);
  const double p = bvn_upper(-h, -k, rho);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace mrfgof
