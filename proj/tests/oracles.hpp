#pragma once

// Independent reference computations for the tests. Nothing here calls the library's
// quadrature, grids or spectral code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace oracle {

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Composite Simpson on [a, b] with an even number of intervals.
template <class F>
double simpson(F&& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double laplace_cdf(double y) { return y < 0.0 ? 0.5 * std::exp(y) : 1.0 - 0.5 * std::exp(-y); }
inline double exp1_cdf(double y) { return y <= 0.0 ? 0.0 : -std::expm1(-y); }

/// E[Z | Z > 0] for Z ~ N(mean, 1): mean + phi(a) / (1 - Phi(a)), a = -mean (Mills ratio).
inline double truncated_normal_mean_above(double mean) {
  const double a = -mean;
  return mean + phi(a) / (0.5 * std::erfc(a / std::numbers::sqrt2));
}

/// sup_y |F_n(y) - F(y)|.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Sup-norm distance between a histogram density estimate on [lo, hi] and the density
/// averaged over each bin (Simpson on the bin). Draws outside count toward the total.
template <class F>
double histogram_sup_error(const std::vector<double>& draws, F&& density, double lo, double hi, int bins) {
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  const double w = (hi - lo) / bins;
  for (double d : draws) {
    if (d < lo || d >= hi) continue;
    counts[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>((d - lo) / w)))] += 1.0;
  }
  double err = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double a = lo + b * w;
    const double expected = simpson(density, a, a + w, 20) / w;
    err = std::max(err, std::abs(counts[static_cast<std::size_t>(b)] / (draws.size() * w) - expected));
  }
  return err;
}

/// Laplace toy q_r(y'|y) for r = Exp(1), transcribed independently.
inline double qr_laplace_exp(double yp, double y) {
  if (yp * y <= 0.0) return 0.0;
  const double s = std::abs(yp + y);
  return std::exp(-std::abs(yp)) * std::abs(yp) * std::abs(y) / s * (2.0 / (s * s) + 2.0 / s + 1.0);
}

/// Closed-form DA transition density of the Laplace toy: mixture of the two truncated pieces
/// pushed through N(y, 1).
inline double laplace_da_density(double xn, double x) {
  const double lp = -x + std::log(Phi(x - 1.0));
  const double ln = x + std::log(Phi(-x - 1.0));
  const double m = std::max(lp, ln);
  const double wp = std::exp(lp - m) / (std::exp(lp - m) + std::exp(ln - m));
  const double mp = x - 1.0, mn = x + 1.0;
  const double pos = std::exp(-(xn - mp) * (xn - mp) / 4.0) / std::sqrt(4.0 * std::numbers::pi) *
                     Phi((xn + mp) / std::numbers::sqrt2) / Phi(mp);
  const double neg = std::exp(-(xn - mn) * (xn - mn) / 4.0) / std::sqrt(4.0 * std::numbers::pi) *
                     Phi(-(xn + mn) / std::numbers::sqrt2) / Phi(-mn);
  return wp * pos + (1.0 - wp) * neg;
}

/// Laplace toy x-marginal, closed form.
inline double laplace_fx(double x) {
  return 0.5 * std::exp(0.5) * (std::exp(-x) * Phi(x - 1.0) + std::exp(x) * Phi(-x - 1.0));
}

/// Var + 2 sum_{k=1}^{K} Cov_k via repeated application of the transition matrix.
inline double autocovariance_sum(const Eigen::MatrixXd& k, const Eigen::VectorXd& w, const Eigen::VectorXd& h,
                                 int lags) {
  const Eigen::VectorXd hc = h.array() - w.dot(h);
  double v = hc.dot(w.asDiagonal() * hc);
  Eigen::VectorXd ph = hc;
  for (int t = 1; t <= lags; ++t) {
    ph = k * ph;
    v += 2.0 * hc.dot(w.asDiagonal() * ph);
  }
  return v;
}

/// CDF of X = Y + N(0,1), Y Laplace: Phi(x) + e^{1/2}/2 [e^x Phi(-x-1) - e^{-x} Phi(x-1)].
inline double laplace_fx_cdf(double x) {
  return Phi(x) + 0.5 * std::exp(0.5) * (std::exp(x) * Phi(-x - 1.0) - std::exp(-x) * Phi(x - 1.0));
}

/// Normalized posterior CDF on a table from an unnormalized log density (trapezoid on a fine grid).
struct TabulatedCdf {
  std::vector<double> x;
  std::vector<double> c;

  template <class LogDensity>
  TabulatedCdf(LogDensity&& logd, double lo, double hi, int cells) {
    x.resize(static_cast<std::size_t>(cells) + 1);
    c.assign(x.size(), 0.0);
    std::vector<double> f(x.size());
    for (int i = 0; i <= cells; ++i) {
      x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / cells;
      f[static_cast<std::size_t>(i)] = std::exp(logd(x[static_cast<std::size_t>(i)]));
    }
    for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    for (auto& v : c) v /= c.back();
  }

  double operator()(double t) const {
    if (t <= x.front()) return 0.0;
    if (t >= x.back()) return 1.0;
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double u = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return c[i - 1] + u * (c[i] - c[i - 1]);
  }
};

}  // namespace oracle
