#include "mrfgof/kolmogorov.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace mrfgof {

namespace {

struct ScaledMatrix {
  Eigen::MatrixXd mat;
  int exponent = 0;  // value = mat * 10^exponent
};

ScaledMatrix power(const ScaledMatrix& a, std::size_t n) {
  if (n == 1) return a;
  ScaledMatrix v = power(a, n / 2);
  ScaledMatrix out;
  out.mat = v.mat * v.mat;
  out.exponent = 2 * v.exponent;
  if (n % 2 == 1) {
    out.mat = a.mat * out.mat;
    out.exponent += a.exponent;
  }
  const Eigen::Index mid = out.mat.rows() / 2;
  if (out.mat(mid, mid) > 1e140) {
    out.mat *= 1e-140;
    out.exponent += 140;
  }
  return out;
}

}  // namespace

double kolmogorov_cdf(double d, std::size_t n) {
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n) * d;
  const double s = nd * d;
  if (s > 7.24 || (s > 3.76 && n > 99)) {
    const double nn = static_cast<double>(n);
    return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(nn) + 1.409 / nn) * s);
  }
  const int k = static_cast<int>(nd) + 1;
  const int m = 2 * k - 1;
  const double h = k - nd;

  ScaledMatrix hm;
  hm.mat.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) hm.mat(i, j) = (i - j + 1 < 0) ? 0.0 : 1.0;
  }
  for (int i = 0; i < m; ++i) {
    hm.mat(i, 0) -= std::pow(h, i + 1);
    hm.mat(m - 1, i) -= std::pow(h, m - i);
  }
  hm.mat(m - 1, 0) += (2 * h - 1 > 0) ? std::pow(2 * h - 1, m) : 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i - j + 1 > 0) {
        for (int g = 1; g <= i - j + 1; ++g) hm.mat(i, j) /= g;
      }
    }
  }
  ScaledMatrix q = power(hm, n);
  double p = q.mat(k - 1, k - 1);
  int e = q.exponent;
  for (std::size_t i = 1; i <= n; ++i) {
    p = p * static_cast<double>(i) / static_cast<double>(n);
    if (p < 1e-140) {
      p *= 1e140;
      e -= 140;
    }
  }
  return p * std::pow(10.0, e);
}

}  // namespace mrfgof
