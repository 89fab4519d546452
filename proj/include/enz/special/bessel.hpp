#pragma once

#include "enz/common.hpp"

namespace enz::special {

enum class BesselKind { J0, J1, Y0, Y1, H0, H1 };

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kSeriesLimit = 12.0;

// Ascending series for J0, J1 and the logarithmic series for Y0, Y1.
inline void series(double z, double& j0, double& j1, double& y0, double& y1) {
  const double q = 0.25 * z * z;
  double t0 = 1.0, t1 = 0.5 * z;  // m-th terms without sign
  double sj0 = t0, sj1 = t1;
  double harmonic = 0.0;
  double sy0 = 0.0;
  // Y1 tail: sum (-1)^m (psi(m+1) + psi(m+2)) (z/2)^(2m+1) / (m!(m+1)!)
  double sy1 = (-kEulerGamma + (1.0 - kEulerGamma)) * t1;
  for (int m = 1; m < 200; ++m) {
    t0 *= q / (double(m) * m);
    t1 *= q / (double(m) * (m + 1));
    double sign = (m % 2) ? -1.0 : 1.0;
    harmonic += 1.0 / m;
    sj0 += sign * t0;
    sj1 += sign * t1;
    sy0 += -sign * harmonic * t0;
    double psi1 = -kEulerGamma + harmonic;
    double psi2 = psi1 + 1.0 / (m + 1);
    sy1 += sign * (psi1 + psi2) * t1;
    if (t0 < 1e-18 && t1 < 1e-18 && m > 5) break;
  }
  j0 = sj0;
  j1 = sj1;
  const double lg = std::log(0.5 * z) + kEulerGamma;
  y0 = (2.0 / kPi) * (lg * j0 + sy0);
  y1 = -2.0 / (kPi * z) + (2.0 / kPi) * std::log(0.5 * z) * j1 - sy1 / kPi;
}

// Hankel asymptotic expansion for order n in {0, 1}, truncated at the
// smallest term.
inline void asymptotic(int n, double z, double& j, double& y) {
  const double mu = 4.0 * n * n;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double prev = 1e300;
  for (int k = 1; k < 60; ++k) {
    double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * z);
    if (std::abs(term) > prev) break;
    prev = std::abs(term);
    if (k % 2 == 1) {
      q += ((k / 2) % 2 ? -1.0 : 1.0) * term;
    } else {
      p += ((k / 2) % 2 ? -1.0 : 1.0) * term;
    }
  }
  const double chi = z - (0.5 * n + 0.25) * kPi;
  const double amp = std::sqrt(2.0 / (kPi * z));
  j = amp * (p * std::cos(chi) - q * std::sin(chi));
  y = amp * (p * std::sin(chi) + q * std::cos(chi));
}

inline void all(double z, double& j0, double& j1, double& y0, double& y1) {
  if (z <= kSeriesLimit) {
    series(z, j0, j1, y0, y1);
  } else {
    asymptotic(0, z, j0, y0);
    asymptotic(1, z, j1, y1);
  }
}

}  // namespace detail

// Bessel functions of the first and second kind and Hankel functions of the
// first kind, orders 0 and 1, for real 0 <= z <= 200 (z > 0 for Y and H).
inline Complex bessel(BesselKind kind, double z) {
  if (!std::isfinite(z) || z < 0.0 || z > 200.0) fail(ErrorCode::Domain, "bessel argument out of range");
  if (z == 0.0) {
    if (kind == BesselKind::J0) return 1.0;
    if (kind == BesselKind::J1) return 0.0;
    fail(ErrorCode::Domain, "second-kind functions are singular at zero");
  }
  double j0, j1, y0, y1;
  detail::all(z, j0, j1, y0, y1);
  switch (kind) {
    case BesselKind::J0: return j0;
    case BesselKind::J1: return j1;
    case BesselKind::Y0: return y0;
    case BesselKind::Y1: return y1;
    case BesselKind::H0: return {j0, y0};
    case BesselKind::H1: return {j1, y1};
  }
  return 0.0;
}

inline double j0(double z) { return bessel(BesselKind::J0, z).real(); }
inline double j1(double z) { return bessel(BesselKind::J1, z).real(); }
inline double y0(double z) { return bessel(BesselKind::Y0, z).real(); }
inline double y1(double z) { return bessel(BesselKind::Y1, z).real(); }
inline Complex h0(double z) { return bessel(BesselKind::H0, z); }
inline Complex h1(double z) { return bessel(BesselKind::H1, z); }

// Bisection for a sign change of f on [lo, hi].
template <class F>
double bisect(F f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) fail(ErrorCode::Domain, "no sign change in bracket");
  while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// n-th positive zero of J0 (n >= 1) or J1 (order = 1).
inline double bessel_zero(int order, int n) {
  auto f = [order](double z) { return order == 0 ? j0(z) : j1(z); };
  double step = 0.05, z = 1e-3;
  int found = 0;
  double prev = f(z);
  while (z < 199.0) {
    double next = f(z + step);
    if (prev * next < 0.0 && ++found == n) return bisect(f, z, z + step);
    prev = next;
    z += step;
  }
  fail(ErrorCode::Domain, "zero not found");
}

}  // namespace enz::special
