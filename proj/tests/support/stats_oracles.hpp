#pragma once

// Test-only statistics oracles: definitional rank computation (counting, no
// sorting), plain two-pass Pearson, and a quadrature-based two-sided p-value
// for Student's t. Independent of the production stats module.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace testsupport {

// rank = (#smaller) + (#equal + 1) / 2, 1-based with average ties.
inline std::vector<double> ranks_by_counting(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    size_t smaller = 0, equal = 0;
    for (size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++smaller;
      else if (v[j] == v[i]) ++equal;
    }
    out[i] = static_cast<double>(smaller) + 0.5 * static_cast<double>(equal + 1);
  }
  return out;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman_oracle(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks_by_counting(x);
  const auto ry = ranks_by_counting(y);
  return pearson(rx, ry);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double eps,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 48);
}

/// Two-sided p-value for Student's t by numerical integration of the density
/// over the tail, with the rational substitution s = |t| + u/(1-u).
inline double t_two_sided_p_quadrature(double t_abs, int nu) {
  const double v = static_cast<double>(nu);
  const double log_c =
      std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) - 0.5 * std::log(v * M_PI);
  auto density = [&](double s) {
    return std::exp(log_c - 0.5 * (v + 1.0) * std::log1p(s * s / v));
  };
  auto integrand = [&](double u) {
    const double omu = 1.0 - u;
    const double s = t_abs + u / omu;
    return density(s) / (omu * omu);
  };
  const double tail = integrate(integrand, 0.0, 1.0 - 1e-12, 1e-14);
  return std::min(1.0, 2.0 * tail);
}

inline double spearman_p_oracle(double rho, int n) {
  if (std::fabs(rho) >= 1.0) return 0.0;
  const double nu = static_cast<double>(n - 2);
  const double t = std::fabs(rho) * std::sqrt(nu / (1.0 - rho * rho));
  return t_two_sided_p_quadrature(t, n - 2);
}

}  // namespace testsupport
