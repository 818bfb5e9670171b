#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxda {

/// Raised when a computation leaves the domain where it is defined (non-finite j, overflow in a weight).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Base class for numerical failures; the CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_log_pdf(double z) {
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// log Phi(z), accurate far into the lower tail where erfc underflows.
inline double log_normal_cdf(double z) {
  if (z > -30.0) return std::log(normal_cdf(z));
  // Mills ratio asymptotic series: Phi(z) ~ phi(z)/|z| * (1 - 1/z^2 + 3/z^4 - 15/z^6)
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return normal_log_pdf(z) - std::log(-z) + std::log(series);
}

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int min_levels = 6;
  int max_levels = 22;
};

/// Trapezoid rule with successive interval halving and Richardson extrapolation (Romberg).
/// Converged once successive diagonal estimates differ by less than max(abs_tol, rel_tol*|I|).
/// Kinks are fine as long as they fall on the initial nodes (the endpoints).
template <class F>
double romberg(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (!(b > a)) return 0.0;
  std::vector<double> prev;
  std::vector<double> cur;
  double h = b - a;
  double trap = 0.5 * h * (f(a) + f(b));
  prev.push_back(trap);
  long intervals = 1;
  for (int level = 1; level <= opts.max_levels; ++level) {
    h *= 0.5;
    double mid_sum = 0.0;
    for (long i = 0; i < intervals; ++i) mid_sum += f(a + (2 * i + 1) * h);
    intervals *= 2;
    cur.assign(static_cast<std::size_t>(level) + 1, 0.0);
    cur[0] = 0.5 * prev[0] + h * mid_sum;
    double factor = 1.0;
    for (int k = 1; k <= level; ++k) {
      factor *= 4.0;
      cur[k] = cur[k - 1] + (cur[k - 1] - prev[k - 1]) / (factor - 1.0);
    }
    if (!std::isfinite(cur[level])) throw QuadratureError("romberg: non-finite integrand");
    const double diff = std::abs(cur[level] - prev[level - 1]);
    if (level >= opts.min_levels && diff <= std::max(opts.abs_tol, opts.rel_tol * std::abs(cur[level]))) {
      return cur[level];
    }
    prev.swap(cur);
  }
  throw QuadratureError("romberg: no convergence after " + std::to_string(opts.max_levels) +
                        " refinements on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
}

/// Walks outward from `start` in steps of `step` until the integrand is negligible
/// (|f| * step below tail_tol and non-increasing). Returns the stopping abscissa.
template <class F>
double find_tail(F&& f, double start, double step, double tail_tol = 1e-14, int max_steps = 4000) {
  double t = start;
  double prev = std::abs(f(t));
  for (int i = 0; i < max_steps; ++i) {
    const double next_t = t + step;
    const double val = std::abs(f(next_t));
    if (!std::isfinite(val)) throw QuadratureError("find_tail: non-finite integrand");
    t = next_t;
    if (val * std::abs(step) < tail_tol && val <= prev) return t;
    prev = val;
  }
  throw QuadratureError("find_tail: integrand does not decay");
}

/// Integral over the real line: truncates where the integrand is negligible on both sides
/// and integrates each piece between consecutive breakpoints with Romberg.
template <class F>
double integrate_line(F&& f, std::vector<double> breakpoints = {0.0}, double step = 1.0,
                      const QuadratureOptions& opts = {}) {
  if (breakpoints.empty()) breakpoints.push_back(0.0);
  std::sort(breakpoints.begin(), breakpoints.end());
  const double lo = find_tail(f, breakpoints.front(), -step, opts.abs_tol * 1e-2);
  const double hi = find_tail(f, breakpoints.back(), step, opts.abs_tol * 1e-2);
  std::vector<double> edges;
  edges.push_back(lo);
  edges.insert(edges.end(), breakpoints.begin(), breakpoints.end());
  edges.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) total += romberg(f, edges[i], edges[i + 1], opts);
  return total;
}

/// 64-bit FNV-1a; used for config fingerprints embedded in reports.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace pxda
