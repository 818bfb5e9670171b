#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/math/special_functions/erf.hpp>

#include "pxda/numeric.hpp"

namespace pxda {

using Rng = std::mt19937_64;

/// Version of the per-step draw order. Bump whenever a sampler consumes the
/// RNG differently, since matched-seed comparisons and stored traces depend on it.
///
/// Order in version 1:
///   da_step        : y | x, then x | y
///   sandwich_step  : y | x, rule step on y, then x | y
///   qr_ystep       : g ~ r, then g' from the inner density
///   haar_ystep     : g from the inner density
///   joint_xg_step  : w | x, g from the inner density at g_prev^{-1} w, then x | g y
inline constexpr int kDrawOrderVersion = 1;

/// Independent stream `stream` derived from a user seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  // (0,1): never returns 0, so logs and quantiles stay finite.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double exponential(double rate, Rng& rng) { return -std::log(uniform01(rng)) / rate; }

/// Gamma(shape, rate) with the rate parameterization used throughout (mean shape/rate).
inline double gamma_rate(double shape, double rate, Rng& rng) {
  return std::gamma_distribution<double>(shape, 1.0)(rng) / rate;
}

/// Standard normal conditioned on Z > a.
/// Inverse-CDF on the upper tail mass for a <= 5; beyond that, exponential-proposal
/// rejection with the optimal rate (a + sqrt(a^2 + 4)) / 2, which stays exact in the far tail.
inline double std_normal_above(double a, Rng& rng) {
  if (a > 5.0) {
    const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
      const double z = a + exponential(alpha, rng);
      const double d = z - alpha;
      if (uniform01(rng) <= std::exp(-0.5 * d * d)) return z;
    }
  }
  const double tail = 0.5 * std::erfc(a / std::numbers::sqrt2);
  const double p = uniform01(rng) * tail;
  // Upper-tail quantile: Phi^c(z) = p  <=>  z = sqrt(2) erfc^{-1}(2p)
  const double z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return std::max(z, a);
}

/// N(mean, 1) truncated to (0, inf).
inline double normal_truncated_positive(double mean, Rng& rng) {
  return mean + std_normal_above(-mean, rng);
}

/// N(mean, 1) truncated to (-inf, 0].
inline double normal_truncated_nonpositive(double mean, Rng& rng) {
  return -normal_truncated_positive(-mean, rng);
}

/// Mean of N(mean, 1) truncated to (0, inf): mean + phi(mean)/Phi(mean).
inline double truncated_positive_mean(double mean) {
  return mean + std::exp(normal_log_pdf(mean) - log_normal_cdf(mean));
}

}  // namespace pxda
