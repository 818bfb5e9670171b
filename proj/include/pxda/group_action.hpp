#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <vector>

#include "pxda/numeric.hpp"
#include "pxda/random.hpp"

namespace pxda {

/// Raised when a group-coordinate density cannot be normalized, i.e. the point lies in
/// the null set where m(y) or m_r(y) is infinite.
class NullSetError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Element of the multiplicative group (0, inf).
struct Scale {
  double value = 1.0;
  friend bool operator==(Scale, Scale) = default;
};

/// Element of the one-point group {e}.
struct Unit {
  friend bool operator==(Unit, Unit) = default;
};

/// A group acting on the left of the augmentation space, together with the j-function,
/// the right modular function, a left-Haar density on the group's coordinate chart, and
/// the reference-measure operations (integration, sampling) the kernels need.
template <class G, class Point>
concept GroupAction = requires(const G& grp, typename G::Element g, const Point& y, Rng& rng,
                               std::function<double(typename G::Element)> fn) {
  { grp.identity() } -> std::same_as<typename G::Element>;
  { grp.compose(g, g) } -> std::same_as<typename G::Element>;
  { grp.inverse(g) } -> std::same_as<typename G::Element>;
  { grp.act(g, y) } -> std::convertible_to<Point>;
  { grp.log_j(g, y) } -> std::convertible_to<double>;
  { grp.delta(g) } -> std::convertible_to<double>;
  { grp.haar_log_density(g) } -> std::convertible_to<double>;
  { grp.integrate(fn) } -> std::convertible_to<double>;
  { grp.sample(fn, rng) } -> std::same_as<typename G::Element>;
  { grp.dim_y() } -> std::convertible_to<int>;
};

namespace detail {

inline double point_size(double) { return 1.0; }
template <class V>
double point_size(const V& v) {
  return static_cast<double>(v.size());
}

}  // namespace detail

/// (0, inf) under multiplication acting on R^n by scalar multiplication.
/// j(g, y) = g^n, unimodular, left-Haar measure dg/g.
/// Coordinate reference measure is Lebesgue dg; numerical work happens in t = log g.
class MultiplicativeGroup {
public:
  using Element = Scale;

  explicit MultiplicativeGroup(int dim_y) : dim_y_(dim_y) {
    if (dim_y < 1) throw std::invalid_argument("MultiplicativeGroup: dim_y must be positive");
  }

  int dim_y() const { return dim_y_; }
  Scale identity() const { return {1.0}; }
  Scale compose(Scale a, Scale b) const { return {a.value * b.value}; }
  Scale inverse(Scale g) const { return {1.0 / g.value}; }

  double act(Scale g, double y) const { return g.value * y; }
  template <class V>
  V act(Scale g, const V& y) const {
    return V(g.value * y);
  }

  template <class P>
  double log_j(Scale g, const P&) const {
    return dim_y_ * std::log(g.value);
  }
  template <class P>
  double j(Scale g, const P& y) const {
    return std::exp(log_j(g, y));
  }

  double delta(Scale) const { return 1.0; }
  double haar_log_density(Scale g) const { return -std::log(g.value); }

  /// Integral of f over (0, inf) with respect to dg.
  template <class F>
  double integrate(F&& f, const QuadratureOptions& opts = {}) const {
    auto in_log = [&](double t) {
      const double g = std::exp(t);
      const double v = f(Scale{g}) * g;
      return std::isfinite(v) ? v : 0.0;
    };
    // Start the tail search from the integrand's largest value on a coarse scan.
    double best_t = 0.0;
    double best = -1.0;
    for (double t = -40.0; t <= 40.0; t += 0.5) {
      const double v = std::abs(in_log(t));
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    if (best <= 0.0) return 0.0;
    return integrate_line(in_log, {best_t}, 0.25, opts);
  }

  /// Draws g with density proportional to exp(log_density(g)) with respect to dg.
  /// Adaptive-grid inverse CDF in t = log g: a coarse scan locates the mass, the support is
  /// bracketed where the log density falls 40 below its peak, and the bracket is split into
  /// 4096 cells (2^-12 resolution) with log-linear interpolation inside each cell.
  template <class LogF>
  Scale sample(LogF&& log_density, Rng& rng) const {
    auto ell = [&](double t) {
      const double v = log_density(Scale{std::exp(t)}) + t;
      return std::isnan(v) ? -kInf : v;
    };
    constexpr double kScanLo = -60.0;
    constexpr double kScanHi = 60.0;
    constexpr double kScanStep = 0.25;
    constexpr double kDrop = 40.0;
    std::vector<double> ts;
    std::vector<double> vals;
    for (double t = kScanLo; t <= kScanHi + 1e-12; t += kScanStep) {
      ts.push_back(t);
      vals.push_back(ell(t));
    }
    const auto peak_it = std::max_element(vals.begin(), vals.end());
    const double peak = *peak_it;
    if (!std::isfinite(peak)) {
      throw NullSetError("MultiplicativeGroup::sample: density vanishes or overflows on the scan");
    }
    if (vals.front() > peak - kDrop || vals.back() > peak - kDrop) {
      throw NullSetError("MultiplicativeGroup::sample: density is not normalizable");
    }
    const auto peak_idx = static_cast<std::size_t>(peak_it - vals.begin());
    std::size_t lo = peak_idx;
    while (lo > 0 && vals[lo] > peak - kDrop) --lo;
    std::size_t hi = peak_idx;
    while (hi + 1 < vals.size() && vals[hi] > peak - kDrop) ++hi;
    const double t_lo = ts[lo];
    const double t_hi = ts[hi];

    constexpr int kCells = 4096;
    const double width = (t_hi - t_lo) / kCells;
    std::vector<double> node(kCells + 1);
    for (int i = 0; i <= kCells; ++i) node[i] = ell(t_lo + i * width) - peak;
    std::vector<double> cum(kCells + 1, 0.0);
    auto cell_mass = [&](int i) {
      const double a = node[i];
      const double b = node[i + 1];
      if (a == -kInf && b == -kInf) return 0.0;
      if (std::abs(b - a) < 1e-10) return width * std::exp(0.5 * (a + b));
      return width * (std::exp(b) - std::exp(a)) / (b - a);
    };
    for (int i = 0; i < kCells; ++i) cum[i + 1] = cum[i] + cell_mass(i);
    const double total = cum[kCells];
    if (!(total > 0.0) || !std::isfinite(total)) throw NullSetError("MultiplicativeGroup::sample: zero mass");

    const double u = uniform01(rng) * total;
    const auto cell = std::clamp<std::ptrdiff_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin() - 1, 0,
                                                 kCells - 1);
    const double a = node[cell];
    const double b = node[cell + 1];
    const double v = std::clamp((u - cum[cell]) / std::max(cum[cell + 1] - cum[cell], 1e-300), 0.0, 1.0);
    double frac;
    const double slope = b - a;
    if (!std::isfinite(slope) || std::abs(slope) < 1e-10) {
      frac = v;
    } else {
      // Inverse CDF of a density proportional to exp(slope * s) on s in [0, 1].
      frac = std::log1p(v * std::expm1(slope)) / slope;
      if (!std::isfinite(frac)) frac = slope > 0 ? 1.0 + std::log(v) / slope : std::log1p(-v) / slope;
      frac = std::clamp(frac, 0.0, 1.0);
    }
    return Scale{std::exp(t_lo + (static_cast<double>(cell) + frac) * width)};
  }

private:
  int dim_y_;
};

/// The one-point group acting trivially; counting measure as Haar measure.
class TrivialGroup {
public:
  using Element = Unit;

  explicit TrivialGroup(int dim_y = 1) : dim_y_(dim_y) {}

  int dim_y() const { return dim_y_; }
  Unit identity() const { return {}; }
  Unit compose(Unit, Unit) const { return {}; }
  Unit inverse(Unit) const { return {}; }
  template <class P>
  P act(Unit, const P& y) const {
    return y;
  }
  template <class P>
  double log_j(Unit, const P&) const {
    return 0.0;
  }
  template <class P>
  double j(Unit, const P&) const {
    return 1.0;
  }
  double delta(Unit) const { return 1.0; }
  double haar_log_density(Unit) const { return 0.0; }

  template <class F>
  double integrate(F&& f, const QuadratureOptions& = {}) const {
    return f(Unit{});
  }
  template <class LogF>
  Unit sample(LogF&& log_density, Rng&) const {
    if (!std::isfinite(log_density(Unit{}))) throw NullSetError("TrivialGroup::sample: zero mass");
    return {};
  }

private:
  int dim_y_;
};

/// j(g, y), checked to be finite and positive.
template <class G, class P>
double j_eval(const G& action, typename G::Element g, const P& y) {
  const double v = std::exp(action.log_j(g, y));
  if (!std::isfinite(v) || !(v > 0.0)) throw DomainError("j_eval: j(g, y) is not a finite positive number");
  return v;
}

/// |int h(g y) j(g, y) dy - int h(y) dy| for a one-dimensional Y = R with Lebesgue measure.
/// Both integrals are truncated where the integrand is negligible and refined until
/// successive estimates agree to opts.abs_tol; a kink at the origin is handled as a breakpoint.
template <class G, class H>
double check_relative_invariance(const G& action, H&& h, typename G::Element g, const QuadratureOptions& opts = {}) {
  auto moved = [&](double y) { return h(action.act(g, y)) * j_eval(action, g, y); };
  auto plain = [&](double y) { return h(y); };
  const double lhs = integrate_line(moved, {0.0}, 0.5, opts);
  const double rhs = integrate_line(plain, {0.0}, 0.5, opts);
  return std::abs(lhs - rhs);
}

}  // namespace pxda
