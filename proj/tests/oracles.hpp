#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's transforms or matrix-function kernels.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Naive O(N^2) sine analysis in 1-D: c_k = sqrt(2)/(N+1) sum_j g_j sin(k pi j/(N+1)).
inline std::vector<double> naive_dst_forward(const std::vector<double>& nodal) {
  const std::size_t n = nodal.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    double sum = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      sum += nodal[j - 1] * std::sin(std::numbers::pi * static_cast<double>(k * j) / (n + 1.0));
    }
    c[k - 1] = std::numbers::sqrt2 * sum / (n + 1.0);
  }
  return c;
}

/// Naive synthesis g_j = sum_k c_k sqrt(2) sin(k pi x_j).
inline std::vector<double> naive_dst_inverse(const std::vector<double>& coeffs) {
  const std::size_t n = coeffs.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      sum += coeffs[k - 1] * std::sin(std::numbers::pi * static_cast<double>(k * j) / (n + 1.0));
    }
    g[j - 1] = std::numbers::sqrt2 * sum;
  }
  return g;
}

/// phi_2 block coefficients from `terms` Taylor terms:
/// alpha = sum (-1)^n x^(2n)/(2n+2)!, gamma = sum (-1)^n x^(2n+1)/(2n+3)!.
struct Phi2Series {
  double alpha;
  double gamma;  // (x - sin x) / x^2
};
inline Phi2Series phi2_series(double x, int terms = 30) {
  long double alpha = 0.0L, gamma = 0.0L;
  long double a_term = 0.5L;            // x^0 / 2!
  long double g_term = x / 6.0L;        // x^1 / 3!
  for (int n = 0; n < terms; ++n) {
    alpha += a_term;
    gamma += g_term;
    a_term *= -static_cast<long double>(x) * x / ((2.0L * n + 3.0L) * (2.0L * n + 4.0L));
    g_term *= -static_cast<long double>(x) * x / ((2.0L * n + 4.0L) * (2.0L * n + 5.0L));
  }
  return {static_cast<double>(alpha), static_cast<double>(gamma)};
}

/// Exact single-mode flow of (u, v)' = (v, -sigma^2 u + g) written out by hand.
struct ModeState {
  double u;
  double v;
};
inline ModeState rotate(double t, double sigma, ModeState s) {
  const double c = std::cos(sigma * t);
  const double sn = std::sin(sigma * t);
  return {c * s.u + sn / sigma * s.v, -sigma * sn * s.u + c * s.v};
}

/// e^{tau J}(u0, v0) + int_0^tau e^{(tau-s)J}(0, g) ds with the integral done
/// by adaptive Gauss-Kronrod quadrature.
inline ModeState variation_of_constants(double tau, double sigma, ModeState s0, double g) {
  using boost::math::quadrature::gauss_kronrod;
  const ModeState free = rotate(tau, sigma, s0);
  auto iu = [&](double s) { return rotate(tau - s, sigma, {0.0, g}).u; };
  auto iv = [&](double s) { return rotate(tau - s, sigma, {0.0, g}).v; };
  const double du = gauss_kronrod<double, 61>::integrate(iu, 0.0, tau, 15, 1e-15);
  const double dv = gauss_kronrod<double, 61>::integrate(iv, 0.0, tau, 15, 1e-15);
  return {free.u + du, free.v + dv};
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> out(n);
  for (double& x : out) x = dist(rng);
  return out;
}

}  // namespace oracle
