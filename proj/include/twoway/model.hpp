#pragma once

// System parameterization and instantaneous SNDR of two-way amplify-and-
// forward relaying with a hardware-impaired relay.
//
// Terminals T1 and T2 exchange symbols through relay R. Impairments live
// only at the relay: kappa_t distorts its transmitter, kappa_r its receiver.
// All powers and noise variances are linear (watts).

#include <cmath>
#include <optional>
#include <string>

#include "twoway/errors.hpp"

namespace twoway {

struct ImpairmentPair {
  double kappa_t = 0.0;
  double kappa_r = 0.0;

  /// Single-link equivalent level sqrt(kappa_t^2 + kappa_r^2).
  double aggregate() const { return std::hypot(kappa_t, kappa_r); }

  /// c = kappa_t^2 + kappa_r^2 + kappa_t^2 kappa_r^2, the impairment severity
  /// governing every high-power result.
  double c() const {
    const double t2 = kappa_t * kappa_t;
    const double r2 = kappa_r * kappa_r;
    return t2 + r2 + t2 * r2;
  }

  void validate() const {
    if (!(kappa_t >= 0.0) || !(kappa_r >= 0.0) || !std::isfinite(kappa_t) ||
        !std::isfinite(kappa_r)) {
      throw DomainError("impairment levels must be finite and nonnegative");
    }
  }

  friend bool operator==(const ImpairmentPair&, const ImpairmentPair&) = default;
};

/// Receiving terminal T_i; partner() is the node whose symbol T_i detects.
class Direction {
 public:
  constexpr explicit Direction(int receiver) : receiver_(receiver) {
    if (receiver != 1 && receiver != 2) {
      throw DomainError("direction must be 1 or 2, got " + std::to_string(receiver));
    }
  }

  static constexpr Direction to_t1() { return Direction(1); }
  static constexpr Direction to_t2() { return Direction(2); }

  constexpr int receiver() const { return receiver_; }
  constexpr int partner() const { return 2 / receiver_; }

  /// Pick the receiver's or partner's value from a (T1, T2) pair.
  constexpr double own(double v1, double v2) const { return receiver_ == 1 ? v1 : v2; }
  constexpr double other(double v1, double v2) const { return receiver_ == 1 ? v2 : v1; }

  friend constexpr bool operator==(Direction, Direction) = default;

 private:
  int receiver_;
};

struct SystemConfig {
  double p1 = 1.0;
  double p2 = 1.0;
  double p3 = 1.0;
  double n1 = 1.0;
  double n2 = 1.0;
  double n3 = 1.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  ImpairmentPair relay;
  // The relay's own belief about kappa_r, used only inside its gain.
  std::optional<double> assumed_kappa_r;

  void validate() const {
    const auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be finite and positive");
      }
    };
    positive(p1, "p1");
    positive(p2, "p2");
    positive(p3, "p3");
    positive(n1, "n1");
    positive(n2, "n2");
    positive(n3, "n3");
    positive(omega1, "omega1");
    positive(omega2, "omega2");
    relay.validate();
    if (assumed_kappa_r && (!(*assumed_kappa_r >= 0.0) || !std::isfinite(*assumed_kappa_r))) {
      throw DomainError("assumed kappa_r must be finite and nonnegative");
    }
  }

  double gain_kappa_r() const { return assumed_kappa_r.value_or(relay.kappa_r); }
  bool gain_matched() const { return gain_kappa_r() == relay.kappa_r; }
  double c() const { return relay.c(); }

  /// Copy with the three transmit powers replaced.
  SystemConfig with_powers(double p1_new, double p2_new, double p3_new) const {
    SystemConfig out = *this;
    out.p1 = p1_new;
    out.p2 = p2_new;
    out.p3 = p3_new;
    return out;
  }
};

/// Per-direction constants of the closed-form SNDR.
struct DerivedConstants {
  double a = 0.0;  // (N3 / P_r)(1 + kappa_t^2)
  double b = 0.0;  // (N_i / P3)(1 + kappa_r^2)
  double c = 0.0;
};

/// P1 = P2 = tau * P3, all growing without bound.
struct HighPowerRegime {
  double tau = 1.0;
};

inline DerivedConstants derived_constants(const SystemConfig& cfg, Direction dir) {
  cfg.validate();
  const double kt2 = cfg.relay.kappa_t * cfg.relay.kappa_t;
  const double kr2 = cfg.relay.kappa_r * cfg.relay.kappa_r;
  const double p_partner = dir.other(cfg.p1, cfg.p2);
  const double n_own = dir.own(cfg.n1, cfg.n2);
  return {cfg.n3 / p_partner * (1.0 + kt2), n_own / cfg.p3 * (1.0 + kr2), cfg.relay.c()};
}

/// Variable relaying gain. Uses the relay's assumed kappa_r.
inline double relaying_gain(const SystemConfig& cfg, double rho1, double rho2) {
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) throw DomainError("channel gains must be nonnegative");
  const double kr = cfg.gain_kappa_r();
  const double received = (rho1 * cfg.p1 + rho2 * cfg.p2) * (1.0 + kr * kr) + cfg.n3;
  return std::sqrt(cfg.p3 / received);
}

/// SNDR at T_i for an arbitrary relay gain (the expression before the gain is
/// substituted). Honors the true impairment levels regardless of the gain.
inline double sndr_from_gain(const SystemConfig& cfg, Direction dir, double rho1, double rho2,
                             double gain) {
  const double kt2 = cfg.relay.kappa_t * cfg.relay.kappa_t;
  const double kr2 = cfg.relay.kappa_r * cfg.relay.kappa_r;
  const double rho_own = dir.own(rho1, rho2);
  const double signal = rho1 * rho2 * dir.other(cfg.p1, cfg.p2);
  const double relay_noise = rho_own * (cfg.n3 + kr2 * (rho1 * cfg.p1 + rho2 * cfg.p2));
  const double second_hop = (rho_own * kt2 * cfg.p3 + dir.own(cfg.n1, cfg.n2)) / (gain * gain);
  return signal / (relay_noise + second_hop);
}

/// Closed-form SNDR at T_i with the matched variable gain substituted.
/// Throws UnsupportedOperation under gain mismatch.
inline double sndr_closed_form(const SystemConfig& cfg, Direction dir, double rho1, double rho2) {
  if (!cfg.gain_matched()) {
    throw UnsupportedOperation("closed-form SNDR assumes the relay knows its true kappa_r");
  }
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) throw DomainError("channel gains must be nonnegative");
  const auto k = derived_constants(cfg, dir);
  const double rho_own = dir.own(rho1, rho2);
  const double rho_partner = dir.other(rho1, rho2);
  const double p_own = dir.own(cfg.p1, cfg.p2);
  const double p_partner = dir.other(cfg.p1, cfg.p2);
  const double power_ratio = p_own / p_partner;
  const double denominator = rho_own * rho_own * power_ratio * k.c + rho1 * rho2 * k.c +
                             rho_partner * k.b + rho_own * (k.a + power_ratio * k.b) +
                             dir.own(cfg.n1, cfg.n2) * cfg.n3 / (p_partner * cfg.p3);
  return rho1 * rho2 / denominator;
}

/// Instantaneous SNDR at T_i. Mismatched gains go through sndr_from_gain.
inline double sndr(const SystemConfig& cfg, Direction dir, double rho1, double rho2) {
  if (cfg.gain_matched()) return sndr_closed_form(cfg, dir, rho1, rho2);
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) throw DomainError("channel gains must be nonnegative");
  return sndr_from_gain(cfg, dir, rho1, rho2, relaying_gain(cfg, rho1, rho2));
}

/// High-power limit of the SNDR: rho_partner / ((rho1 + rho2) c).
inline double sndr_asymptotic(Direction dir, double rho1, double rho2, double c) {
  if (!(c > 0.0)) throw DomainError("asymptotic SNDR requires c > 0 (unbounded for ideal hardware)");
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0) || !(rho1 + rho2 > 0.0)) {
    throw DomainError("asymptotic SNDR requires nonnegative gains with positive sum");
  }
  return dir.other(rho1, rho2) / ((rho1 + rho2) * c);
}

/// Power-independent upper bound 1/c on the SNDR.
inline double sndr_ceiling(double c) {
  if (!(c > 0.0)) throw DomainError("no SNDR ceiling for ideal hardware (c = 0)");
  return 1.0 / c;
}

inline double relaying_gain_asymptotic(HighPowerRegime regime, double rho1, double rho2,
                                       double kappa_r) {
  if (!(regime.tau > 0.0)) throw DomainError("tau must be positive");
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0) || !(rho1 + rho2 > 0.0)) {
    throw DomainError("asymptotic gain requires nonnegative gains with positive sum");
  }
  return std::sqrt(1.0 / (regime.tau * (rho1 + rho2) * (1.0 + kappa_r * kappa_r)));
}

/// Split of a total EVM budget kappa_t + kappa_r = kappa_tot minimizing c.
inline ImpairmentPair optimal_split(double kappa_tot) {
  if (!(kappa_tot > 0.0) || !std::isfinite(kappa_tot)) {
    throw DomainError("total impairment budget must be positive");
  }
  return {0.5 * kappa_tot, 0.5 * kappa_tot};
}

/// Common level kappa with kappa_t = kappa_r = kappa producing the given c,
/// i.e. the root of 2 kappa^2 + kappa^4 = c.
inline double equal_split_kappa(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("c must be finite and nonnegative");
  // sqrt(1 + c) - 1 without cancellation for small c.
  const double kappa_sq = c / (std::sqrt(1.0 + c) + 1.0);
  return std::sqrt(kappa_sq);
}

}  // namespace twoway
