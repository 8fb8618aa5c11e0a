#pragma once

// Monte-Carlo estimators that serve as an independent check on the closed
// forms. Work is split into a fixed number of chunks; chunk k draws from
// RandomStream(seed, k) and keeps private tallies that are merged in chunk
// order, so results depend only on (seed, n_samples, n_chunks) and never on
// how many threads execute the chunks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "twoway/analytic.hpp"
#include "twoway/errors.hpp"
#include "twoway/model.hpp"
#include "twoway/parallel.hpp"
#include "twoway/philox.hpp"
#include "twoway/specfun.hpp"

namespace twoway {

inline constexpr std::uint64_t kDefaultSeed = 20130601;

struct McConfig {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t n_chunks = 64;  // capped at n_samples
  double confidence = 0.95;
  unsigned lanes = 0;  // threads; 0 = all hardware threads. Never affects results.

  void validate() const {
    if (n_samples < 1) throw DomainError("n_samples must be at least 1");
    if (n_chunks < 1) throw DomainError("n_chunks must be at least 1");
    if (!(confidence > 0.0 && confidence < 1.0)) {
      throw DomainError("confidence must lie in (0, 1)");
    }
  }

  std::uint64_t effective_chunks() const { return std::min(n_chunks, n_samples); }
};

struct McEstimate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Two-sided standard-normal quantile z with P(|Z| <= z) = confidence.
inline double normal_quantile_two_sided(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - confidence);
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (specfun::gaussian_q(mid) > tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Wilson score interval for `successes` out of `n` at critical value z.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n,
                                                 double z) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Exact endpoints at p = 0 or 1; the formula can miss them by rounding.
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes == n ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

/// Proportion estimate with a Wilson interval.
inline McEstimate proportion_estimate(std::uint64_t successes, const McConfig& mc) {
  McEstimate est;
  est.n_samples = mc.n_samples;
  est.seed = mc.seed;
  const double n = static_cast<double>(mc.n_samples);
  est.mean = static_cast<double>(successes) / n;
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / n);
  std::tie(est.ci_low, est.ci_high) =
      wilson_interval(successes, mc.n_samples, normal_quantile_two_sided(mc.confidence));
  return est;
}

namespace detail {

inline std::uint64_t chunk_size(const McConfig& mc, std::uint64_t chunk) {
  const std::uint64_t chunks = mc.effective_chunks();
  return mc.n_samples / chunks + (chunk < mc.n_samples % chunks ? 1 : 0);
}

// Runs body(stream, n) per chunk and returns the per-chunk tallies in order.
template <class Tally, class Body>
std::vector<Tally> run_chunks(const McConfig& mc, Body&& body) {
  mc.validate();
  const std::uint64_t chunks = mc.effective_chunks();
  std::vector<Tally> tallies(chunks);
  parallel_for(chunks, mc.lanes, [&](std::size_t k) {
    RandomStream stream(mc.seed, k);
    tallies[k] = body(stream, chunk_size(mc, k));
  });
  return tallies;
}

template <class Predicate>
McEstimate estimate_proportion(const McConfig& mc, Predicate&& event) {
  const auto tallies = run_chunks<std::uint64_t>(mc, [&](RandomStream& stream, std::uint64_t n) {
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < n; ++s) hits += event(stream) ? 1 : 0;
    return hits;
  });
  std::uint64_t total = 0;
  for (auto t : tallies) total += t;
  return proportion_estimate(total, mc);
}

struct MomentTally {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace detail

/// Independent exponential channel gains |h1|^2, |h2|^2 with means omega1, omega2.
inline std::pair<double, double> sample_channel_gains(RandomStream& stream, double omega1,
                                                      double omega2) {
  const double rho1 = stream.exponential(omega1);
  const double rho2 = stream.exponential(omega2);
  return {rho1, rho2};
}

/// P(SNDR_i <= x); ties count as outage. Honors relay gain mismatch.
inline McEstimate mc_outage(const SystemConfig& cfg, const OutageQuery& query, const McConfig& mc) {
  cfg.validate();
  if (!(query.x >= 0.0)) throw DomainError("outage threshold must be >= 0");
  return detail::estimate_proportion(mc, [&](RandomStream& stream) {
    const auto [rho1, rho2] = sample_channel_gains(stream, cfg.omega1, cfg.omega2);
    return sndr(cfg, query.dir, rho1, rho2) <= query.x;
  });
}

/// P(rho_partner / ((rho1 + rho2) c) <= x), the high-power outage, by direct
/// sampling.
inline McEstimate mc_outage_asymptotic(double omega1, double omega2, Direction dir, double c,
                                       double x, const McConfig& mc) {
  if (!(c > 0.0)) throw DomainError("mc_outage_asymptotic requires c > 0");
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw DomainError("average gains must be positive");
  return detail::estimate_proportion(mc, [&](RandomStream& stream) {
    const auto [rho1, rho2] = sample_channel_gains(stream, omega1, omega2);
    if (!(rho1 + rho2 > 0.0)) return true;  // zero received power: SNDR 0
    return sndr_asymptotic(dir, rho1, rho2, c) <= x;
  });
}

/// E[alpha Q(sqrt(2 beta SNDR_i))] over the fading, with a normal-theory
/// interval from the sample standard error.
inline McEstimate mc_ser_expectation(const SystemConfig& cfg, Direction dir, const Modulation& mod,
                                     const McConfig& mc) {
  cfg.validate();
  mod.validate();
  const auto tallies =
      detail::run_chunks<detail::MomentTally>(mc, [&](RandomStream& stream, std::uint64_t n) {
        detail::MomentTally t;
        for (std::uint64_t s = 0; s < n; ++s) {
          const auto [rho1, rho2] = sample_channel_gains(stream, cfg.omega1, cfg.omega2);
          const double v =
              mod.alpha * specfun::gaussian_q(std::sqrt(2.0 * mod.beta * sndr(cfg, dir, rho1, rho2)));
          t.sum += v;
          t.sum_sq += v * v;
        }
        return t;
      });
  detail::MomentTally total;
  for (const auto& t : tallies) {
    total.sum += t.sum;
    total.sum_sq += t.sum_sq;
  }
  const double n = static_cast<double>(mc.n_samples);
  McEstimate est;
  est.n_samples = mc.n_samples;
  est.seed = mc.seed;
  est.mean = total.sum / n;
  const double var = n > 1.0 ? std::max(0.0, (total.sum_sq - n * est.mean * est.mean) / (n - 1.0))
                             : 0.0;
  est.std_error = std::sqrt(var / n);
  const double z = normal_quantile_two_sided(mc.confidence);
  const double upper = 0.5 * mod.alpha;  // alpha Q(t) <= alpha/2 for t >= 0
  est.ci_low = std::clamp(est.mean - z * est.std_error, 0.0, upper);
  est.ci_high = std::clamp(est.mean + z * est.std_error, 0.0, upper);
  return est;
}

/// One pass of the relay signal chain for fixed channels h1, h2.
struct SignalRealization {
  std::complex<double> h1, h2;
  std::complex<double> s1, s2;
  std::complex<double> eta_3r, eta_3t;
  std::complex<double> nu1, nu2, nu3;
  std::complex<double> y3;  // relay input
  double gain = 0.0;
  std::complex<double> y;  // at the receiving terminal, own echo removed
};

/// Draws BPSK symbols (+-sqrt(P)), distortion and thermal noise, and pushes
/// them through the two slots: the relay amplifies y3 with its (possibly
/// mismatched) variable gain, and the receiver subtracts G h_i^2 s_i.
inline SignalRealization simulate_realization(RandomStream& stream, const SystemConfig& cfg,
                                              Direction dir, std::complex<double> h1,
                                              std::complex<double> h2) {
  SignalRealization r;
  r.h1 = h1;
  r.h2 = h2;
  const double rho1 = std::norm(h1);
  const double rho2 = std::norm(h2);
  r.s1 = (stream.coin() ? 1.0 : -1.0) * std::sqrt(cfg.p1);
  r.s2 = (stream.coin() ? 1.0 : -1.0) * std::sqrt(cfg.p2);
  const double kt = cfg.relay.kappa_t;
  const double kr = cfg.relay.kappa_r;
  r.eta_3r = stream.complex_normal(kr * kr * (rho1 * cfg.p1 + rho2 * cfg.p2));
  r.nu3 = stream.complex_normal(cfg.n3);
  r.y3 = h1 * r.s1 + h2 * r.s2 + r.eta_3r + r.nu3;
  r.gain = relaying_gain(cfg, rho1, rho2);
  r.eta_3t = stream.complex_normal(kt * kt * cfg.p3);
  r.nu1 = stream.complex_normal(cfg.n1);
  r.nu2 = stream.complex_normal(cfg.n2);
  const auto h_own = dir.receiver() == 1 ? h1 : h2;
  const auto s_own = dir.receiver() == 1 ? r.s1 : r.s2;
  const auto nu_own = dir.receiver() == 1 ? r.nu1 : r.nu2;
  const auto received = h_own * (r.gain * r.y3 + r.eta_3t) + nu_own;
  r.y = received - r.gain * h_own * h_own * s_own;
  return r;
}

/// BPSK symbol error rate from the simulated signal chain with coherent
/// detection on the known composite coefficient G h1 h2.
inline McEstimate mc_ser_signal_level(const SystemConfig& cfg, Direction dir, const McConfig& mc) {
  cfg.validate();
  const double sd1 = std::sqrt(cfg.omega1);
  const double sd2 = std::sqrt(cfg.omega2);
  return detail::estimate_proportion(mc, [&](RandomStream& stream) {
    const auto h1 = stream.complex_normal(1.0) * sd1;
    const auto h2 = stream.complex_normal(1.0) * sd2;
    const auto r = simulate_realization(stream, cfg, dir, h1, h2);
    const auto coefficient = r.gain * h1 * h2;
    const double statistic = std::real(std::conj(coefficient) * r.y);
    const double sent = std::real(dir.receiver() == 1 ? r.s2 : r.s1);
    return (statistic >= 0.0) != (sent > 0.0);
  });
}

}  // namespace twoway
