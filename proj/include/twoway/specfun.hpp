#pragma once

// Scalar special functions used by the outage and error-rate expressions.
//
// Accuracy targets: K1 and e^z K1 to ~1e-13 relative, the incomplete gamma
// to ~1e-12 for the half-integer orders used downstream. Out-of-domain
// arguments throw DomainError instead of producing NaN.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twoway/errors.hpp"

namespace twoway::specfun {

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr int kMaxIter = 10000;

inline void require_finite(double v, const char* fn) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(fn) + ": argument must be finite");
  }
}

// K1 by its ascending series; valid for 0 < z <= 2.
//   K1(z) = 1/z + ln(z/2) I1(z) - (z/4) sum_k [psi(k+1)+psi(k+2)] (z^2/4)^k / (k!(k+1)!)
inline double k1_series(double z) {
  const double q = 0.25 * z * z;
  double term = 1.0;  // (z^2/4)^k / (k! (k+1)!)
  double psi_k1 = -std::numbers::egamma;      // psi(k+1)
  double psi_k2 = 1.0 - std::numbers::egamma;  // psi(k+2)
  double i1_sum = 0.0;
  double psi_sum = 0.0;
  for (int k = 0; k < kMaxIter; ++k) {
    i1_sum += term;
    const double dpsi = (psi_k1 + psi_k2) * term;
    psi_sum += dpsi;
    if (term < kEps * i1_sum && std::abs(dpsi) < kEps * std::abs(psi_sum)) break;
    term *= q / ((k + 1.0) * (k + 2.0));
    psi_k1 += 1.0 / (k + 1.0);
    psi_k2 += 1.0 / (k + 2.0);
  }
  const double i1 = 0.5 * z * i1_sum;
  return 1.0 / z + std::log(0.5 * z) * i1 - 0.25 * z * psi_sum;
}

// e^z K1(z) for z > 2 by Steed's continued fraction (Temme's CF2), which
// yields the exponentially scaled K0 and K1 directly.
inline double k1_scaled_cf(double z) {
  const double a1 = 0.25;  // 1/4 - nu^2 for nu = 0
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h *= a1;
  const double k0_scaled = std::sqrt(std::numbers::pi / (2.0 * z)) / s;
  return k0_scaled * (z + 0.5 - h) / z;
}

inline void require_positive(double z, const char* fn) {
  require_finite(z, fn);
  if (!(z > 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be positive");
  }
}

}  // namespace detail

/// Modified Bessel function of the second kind, order one. Underflows to 0
/// for z beyond ~705.
inline double bessel_k1(double z) {
  detail::require_positive(z, "bessel_k1");
  if (z <= 2.0) return detail::k1_series(z);
  return detail::k1_scaled_cf(z) * std::exp(-z);
}

/// e^z K1(z); finite for every positive z.
inline double bessel_k1_scaled(double z) {
  detail::require_positive(z, "bessel_k1_scaled");
  if (z <= 2.0) return std::exp(z) * detail::k1_series(z);
  return detail::k1_scaled_cf(z);
}

inline double erfc(double x) {
  detail::require_finite(x, "erfc");
  return std::erfc(x);
}

inline double erf(double x) {
  detail::require_finite(x, "erf");
  return std::erf(x);
}

/// Lower incomplete gamma function gamma(p, x) = int_0^x t^(p-1) e^-t dt.
/// Series below x = p + 1, otherwise Gamma(p) minus the upper function from
/// a Lentz continued fraction.
inline double lower_incomplete_gamma(double p, double x) {
  detail::require_finite(p, "lower_incomplete_gamma");
  detail::require_finite(x, "lower_incomplete_gamma");
  if (!(p > 0.0)) throw DomainError("lower_incomplete_gamma: p must be positive");
  if (x < 0.0) throw DomainError("lower_incomplete_gamma: x must be nonnegative");
  if (x == 0.0) return 0.0;

  const double log_prefactor = p * std::log(x) - x;
  if (x < p + 1.0) {
    double ap = p;
    double del = 1.0 / p;
    double sum = del;
    for (int n = 0; n < detail::kMaxIter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * detail::kEps) break;
    }
    return sum * std::exp(log_prefactor);
  }

  constexpr double tiny = 1e-300;
  double b = x + 1.0 - p;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < detail::kMaxIter; ++i) {
    const double an = -i * (i - p);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < detail::kEps) break;
  }
  const double upper = std::exp(log_prefactor) * h;
  return std::tgamma(p) - upper;
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double gaussian_q(double x) {
  detail::require_finite(x, "gaussian_q");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

}  // namespace twoway::specfun
