#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "twoway/errors.hpp"

namespace twoway::quadrature {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t subdivisions = 0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod21(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = kWgk[10] * fc;
  double gauss = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G10/K21) integration over a finite
/// interval. The segment with the largest error estimate is bisected until
/// the summed estimate is below max(abs_tol, rel_tol * |I|). Throws
/// NumericalError when max_subdivisions is exhausted.
template <class F>
Result integrate(F&& f, double lo, double hi, double rel_tol, double abs_tol,
                 std::size_t max_subdivisions) {
  if (!(hi > lo)) {
    if (hi == lo) return {};
    throw DomainError("integrate: interval must satisfy lo <= hi");
  }
  std::vector<detail::Segment> heap;
  heap.reserve(max_subdivisions + 1);
  heap.push_back(detail::gauss_kronrod21(f, lo, hi));
  double total = heap.front().value;
  double error = heap.front().error;
  std::size_t subdivisions = 1;

  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (subdivisions >= max_subdivisions) {
      throw NumericalError("integrate: no convergence after " +
                               std::to_string(subdivisions) + " subdivisions",
                           error);
    }
    std::pop_heap(heap.begin(), heap.end());
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    heap.push_back(detail::gauss_kronrod21(f, worst.lo, mid));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(detail::gauss_kronrod21(f, mid, worst.hi));
    std::push_heap(heap.begin(), heap.end());
    ++subdivisions;

    // Re-sum rather than update incrementally so rounding does not drift.
    total = 0.0;
    error = 0.0;
    for (const auto& seg : heap) {
      total += seg.value;
      error += seg.error;
    }
  }
  return {total, error, subdivisions};
}

}  // namespace twoway::quadrature
