#pragma once

// Outage probability and symbol error rate: exact closed form, high-power
// limits, numerical SER integration, and inversion for design targets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "twoway/errors.hpp"
#include "twoway/model.hpp"
#include "twoway/quadrature.hpp"
#include "twoway/specfun.hpp"

namespace twoway {

/// SER family alpha * Q(sqrt(2 beta SNDR)).
struct Modulation {
  double alpha = 1.0;
  double beta = 1.0;
  std::string name = "custom";

  static Modulation bpsk() { return {1.0, 1.0, "bpsk"}; }

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
      throw DomainError("modulation constants alpha and beta must be positive");
    }
  }
};

struct OutageQuery {
  double x = 0.0;  // linear SNDR threshold
  Direction dir = Direction::to_t1();
};

struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::size_t max_subdivisions = 200;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions == 0) {
      throw DomainError("quadrature tolerances must be positive");
    }
  }
};

namespace detail {

// 1 - P_out in log form. The closed form is
//   1 - P_out = exp(-E) * 2 sqrt(num/den) * K1(2 sqrt(num den))
// and since 2 sqrt(num/den) = z / den with z = 2 sqrt(num den), this is
//   exp(-E - log(den) + log(z e^z K1(z)) - z),
// which stays finite where exp(-E) and K1 both underflow.
inline double log_non_outage(const SystemConfig& cfg, Direction dir, double x) {
  const auto k = derived_constants(cfg, dir);
  const double omega_own = dir.own(cfg.omega1, cfg.omega2);
  const double omega_partner = dir.other(cfg.omega1, cfg.omega2);
  const double p_own = dir.own(cfg.p1, cfg.p2);
  const double p_partner = dir.other(cfg.p1, cfg.p2);
  const double n_own = dir.own(cfg.n1, cfg.n2);
  const double power_ratio = p_own / p_partner;
  const double omega_prod = cfg.omega1 * cfg.omega2;

  const double d = 1.0 - k.c * x;
  const double exponent = x / d * (k.a / omega_partner + k.b / omega_own) +
                          x * (1.0 + k.c * x) / (d * d) * k.b / omega_partner * power_ratio;
  const double num = (x + x * x) / (d * d) * n_own * cfg.n3 / (omega_prod * p_partner * cfg.p3) +
                     x * x / (d * d * d) * k.b * k.b * p_own / (omega_prod * p_partner);
  const double den_excess = k.c * x / d * power_ratio * omega_own / omega_partner;
  const double z = 2.0 * std::sqrt(num * (1.0 + den_excess));
  // Overflow only happens as x -> 1/c, where the non-outage probability is 0.
  if (!std::isfinite(z)) return -std::numeric_limits<double>::infinity();

  // z K1(z) -> 1 as z -> 0.
  const double log_zk1 = z > 0.0 ? std::log(z * specfun::bessel_k1_scaled(z)) - z : 0.0;
  return -exponent - std::log1p(den_excess) + log_zk1;
}

}  // namespace detail

/// Exact outage probability P(SNDR_i <= x) under Rayleigh fading.
/// Requires the matched relay gain; mismatched configurations must be
/// estimated with mc_outage.
inline double outage_probability(const SystemConfig& cfg, const OutageQuery& query) {
  cfg.validate();
  if (!cfg.gain_matched()) {
    throw UnsupportedOperation(
        "no closed-form outage probability under relay gain mismatch; use the Monte-Carlo "
        "estimator");
  }
  const double x = query.x;
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("outage threshold must be >= 0");
  const double c = cfg.c();
  if (c > 0.0 && x >= 1.0 / c) return 1.0;
  if (x == 0.0) return 0.0;
  const double p = -std::expm1(detail::log_non_outage(cfg, query.dir, x));
  return std::clamp(p, 0.0, 1.0);
}

/// High-power outage limit at T_i given the receiver's and partner's average
/// channel gains.
inline double outage_asymptotic(double omega_own, double omega_partner, double c, double x) {
  if (!(omega_own > 0.0) || !(omega_partner > 0.0)) {
    throw DomainError("average channel gains must be positive");
  }
  if (!(c >= 0.0) || !(x >= 0.0)) throw DomainError("c and x must be nonnegative");
  if (c == 0.0) return 0.0;
  const double cx = c * x;
  if (cx >= 1.0) return 1.0;
  return omega_own * cx / (omega_partner + cx * (omega_own - omega_partner));
}

namespace detail {

// (alpha sqrt(beta) / (2 sqrt(pi))) int_0^inf e^{-beta x} x^{-1/2} F(x) dx for
// a CDF F equal to 1 on [1/c, inf). The finite part uses x = u^2, so the
// integrand becomes 2 e^{-beta u^2} F(u^2) with no endpoint singularity; the
// tail is (alpha/2) erfc(sqrt(beta/c)).
template <class Cdf>
double ser_from_cdf(Cdf&& cdf, double c, const Modulation& mod, const QuadratureSpec& quad) {
  mod.validate();
  quad.validate();
  const double u_trunc = std::sqrt(std::max(50.0 / mod.beta, 50.0));
  const double u_max = c > 0.0 ? std::min(std::sqrt(1.0 / c), u_trunc) : u_trunc;
  const auto integrand = [&](double u) {
    return 2.0 * std::exp(-mod.beta * u * u) * cdf(u * u);
  };
  const auto res = quadrature::integrate(integrand, 0.0, u_max, quad.rel_tol, quad.abs_tol,
                                         quad.max_subdivisions);
  const double scale = mod.alpha * std::sqrt(mod.beta) / (2.0 * std::sqrt(std::numbers::pi));
  double total = scale * res.value;
  if (c > 0.0) total += 0.5 * mod.alpha * specfun::erfc(std::sqrt(mod.beta / c));
  return total;
}

}  // namespace detail

/// Average SER at T_i by integrating the exact outage CDF.
inline double ser(const SystemConfig& cfg, Direction dir, const Modulation& mod,
                  const QuadratureSpec& quad = {}) {
  cfg.validate();
  if (!cfg.gain_matched()) {
    throw UnsupportedOperation(
        "SER integration needs the exact outage CDF, which assumes a matched relay gain");
  }
  return detail::ser_from_cdf(
      [&](double x) { return outage_probability(cfg, {x, dir}); }, cfg.c(), mod, quad);
}

/// High-power SER floor, valid for equal average channel gains.
inline double ser_asymptotic(const Modulation& mod, double c) {
  mod.validate();
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("ser_asymptotic requires c > 0 (ideal hardware has no error floor)");
  }
  const double ratio = mod.beta / c;
  return mod.alpha * c / (2.0 * mod.beta * std::sqrt(std::numbers::pi)) *
             specfun::lower_incomplete_gamma(1.5, ratio) +
         0.5 * mod.alpha * specfun::erfc(std::sqrt(ratio));
}

/// High-power SER floor for unequal channel gains, obtained by integrating
/// the high-power outage CDF numerically. Not a closed form.
inline double ser_asymptotic_by_quadrature(double omega_own, double omega_partner, double c,
                                           const Modulation& mod,
                                           const QuadratureSpec& quad = {}) {
  if (!(c > 0.0)) throw DomainError("ser floor requires c > 0");
  return detail::ser_from_cdf(
      [&](double x) { return outage_asymptotic(omega_own, omega_partner, c, x); }, c, mod, quad);
}

/// Largest c whose high-power outage at threshold x stays at or below target.
inline double invert_impairment_for_op(double target_op, double x, double omega_own,
                                       double omega_partner) {
  if (!(target_op > 0.0 && target_op < 1.0)) {
    throw InfeasibleTarget("outage target must lie strictly between 0 and 1");
  }
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("threshold x must be positive");
  if (!(omega_own > 0.0) || !(omega_partner > 0.0)) {
    throw DomainError("average channel gains must be positive");
  }
  const double denom = x * (omega_own - target_op * (omega_own - omega_partner));
  if (!(denom > 0.0)) {
    throw InfeasibleTarget("outage target cannot be met by any finite impairment level");
  }
  const double c = target_op * omega_partner / denom;
  const double check = outage_asymptotic(omega_own, omega_partner, c, x);
  if (std::abs(check - target_op) > 1e-9 * target_op) {
    throw NumericalError("outage inversion failed forward check", std::abs(check - target_op));
  }
  return c;
}

/// c such that the high-power SER floor equals target_ser. The floor is
/// strictly increasing in c and tends to alpha/2, so bisection on a
/// doubling bracket is enough.
inline double invert_impairment_for_ser(double target_ser, const Modulation& mod) {
  mod.validate();
  if (!(target_ser > 0.0 && target_ser < 0.5 * mod.alpha)) {
    throw InfeasibleTarget("SER target must lie strictly between 0 and alpha/2");
  }
  double lo = 0.0;
  double hi = 1e-3;
  while (ser_asymptotic(mod, hi) < target_ser) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw InfeasibleTarget("SER target not reachable");
  }
  // Tighten the lower end so the relative width test is meaningful.
  if (lo == 0.0) {
    lo = hi;
    while (lo > 0.0 && ser_asymptotic(mod, lo) >= target_ser) lo *= 0.5;
    if (!(lo > 0.0)) throw InfeasibleTarget("SER target below the smallest representable floor");
  }
  for (int iter = 0; iter < 400 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (ser_asymptotic(mod, mid) < target_ser) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace twoway
