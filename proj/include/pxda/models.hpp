#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SVD>

#include "pxda/numeric.hpp"
#include "pxda/random.hpp"

namespace pxda {

/// Log-density of f(g u) j(g, u) in the scale g for the multiplicative group, in the form
///   power * log g - linear * g - quadratic * g^2 + const.
/// Products of such factors stay in the family, which gives exact gamma draws whenever
/// exactly one of `linear`, `quadratic` is non-zero.
struct ScaleLaw {
  double power = 0.0;
  double linear = 0.0;
  double quadratic = 0.0;

  friend ScaleLaw operator+(const ScaleLaw& a, const ScaleLaw& b) {
    return {a.power + b.power, a.linear + b.linear, a.quadratic + b.quadratic};
  }

  double log_density(double g) const { return power * std::log(g) - linear * g - quadratic * g * g; }

  bool normalizable() const {
    return power > -1.0 && linear >= 0.0 && quadratic >= 0.0 && (linear > 0.0 || quadratic > 0.0);
  }
  bool gamma_conjugate() const { return normalizable() && (linear == 0.0 || quadratic == 0.0); }

  /// Exact draw; requires gamma_conjugate().
  double sample(Rng& rng) const {
    if (quadratic == 0.0) return gamma_rate(power + 1.0, linear, rng);
    return std::sqrt(gamma_rate(0.5 * (power + 1.0), quadratic, rng));
  }
};

/// A joint density f(x, y) with exact samplers for both conditionals and the
/// unnormalized y-marginal.
template <class M>
concept AugmentedModel = requires(const M& m, const typename M::XPoint& x, const typename M::YPoint& y, Rng& rng) {
  typename M::XPoint;
  typename M::YPoint;
  { m.log_joint(x, y) } -> std::convertible_to<double>;
  { m.sample_y_given_x(x, rng) } -> std::convertible_to<typename M::YPoint>;
  { m.sample_x_given_y(y, rng) } -> std::convertible_to<typename M::XPoint>;
  { m.log_fy_unnorm(y) } -> std::convertible_to<double>;
  { m.dim_x() } -> std::convertible_to<int>;
  { m.dim_y() } -> std::convertible_to<int>;
};

/// Model can draw exactly from f_Y (used when a point falls in the null set N).
template <class M>
concept ExactMarginalSampler = requires(const M& m, Rng& rng) {
  { m.sample_fy(rng) } -> std::convertible_to<typename M::YPoint>;
};

/// Model exposes the normalized f_Y.
template <class M>
concept NormalizedMarginal = requires(const M& m, const typename M::YPoint& y) {
  { m.log_fy(y) } -> std::convertible_to<double>;
};

/// Model describes f_Y(g y) j(g, y) under scalar multiplication as a ScaleLaw.
template <class M>
concept ScaleConjugate = requires(const M& m, const typename M::YPoint& y) {
  { m.scale_law(y) } -> std::same_as<ScaleLaw>;
};

/// f_Y(y) = exp(-|y|)/2 on the real line with f_{X|Y}(x|y) = N(y, 1).
///
/// f_{Y|X}(y|x) is proportional to exp(-|y| - (x - y)^2 / 2); completing the square on each
/// half-line gives a two-component mixture
///   y > 0 : N(x - 1, 1) truncated to (0, inf),   mass exp(-x) Phi(x - 1)
///   y <= 0: N(x + 1, 1) truncated to (-inf, 0],  mass exp(x)  Phi(-x - 1)
/// (common factor exp(1/2) dropped).
class LaplaceToyModel {
public:
  using XPoint = double;
  using YPoint = double;

  int dim_x() const { return 1; }
  int dim_y() const { return 1; }

  double log_fy(double y) const { return -std::abs(y) - std::log(2.0); }
  double log_fy_unnorm(double y) const { return -std::abs(y); }
  double log_x_given_y(double x, double y) const { return normal_log_pdf(x - y); }
  double log_joint(double x, double y) const { return log_fy(y) + log_x_given_y(x, y); }

  /// Closed-form x-marginal, the Laplace-normal convolution.
  double fx(double x) const {
    const double lp = -x + log_normal_cdf(x - 1.0);
    const double ln = x + log_normal_cdf(-x - 1.0);
    return 0.5 * std::exp(0.5 + log_add_exp(lp, ln));
  }

  /// P(Y > 0 | X = x).
  double positive_weight(double x) const {
    const double lp = -x + log_normal_cdf(x - 1.0);
    const double ln = x + log_normal_cdf(-x - 1.0);
    return std::exp(lp - log_add_exp(lp, ln));
  }

  double sample_y_given_x(double x, Rng& rng) const {
    if (uniform01(rng) < positive_weight(x)) return normal_truncated_positive(x - 1.0, rng);
    return normal_truncated_nonpositive(x + 1.0, rng);
  }

  double sample_x_given_y(double y, Rng& rng) const { return y + std_normal(rng); }

  /// Laplace inverse CDF.
  double sample_fy(Rng& rng) const {
    const double u = uniform01(rng);
    return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
  }

  /// f_Y(g y) * g = exp(-g|y|) g / 2.
  ScaleLaw scale_law(double y) const { return {1.0, std::abs(y), 0.0}; }

  /// Q_r transition density for r = Exp(1) (closed form from the group construction).
  static double qr_exp_density(double y_next, double y) {
    if (!(y > 0.0 && y_next > 0.0) && !(y < 0.0 && y_next < 0.0)) return 0.0;
    const double a = std::abs(y_next);
    const double b = std::abs(y);
    const double s = a + b;
    return std::exp(-a) * a * b / s * (2.0 / (s * s) + 2.0 / s + 1.0);
  }

  /// Haar Q transition density: f_Y restricted to the orbit (sign class) of y, normalized.
  static double haar_density(double y_next, double y) {
    if ((y > 0.0 && y_next > 0.0) || (y < 0.0 && y_next < 0.0)) return std::exp(-std::abs(y_next));
    return 0.0;
  }

  /// m_r(y) for r = Exp(1): int e^{-g|y|}/2 * g e^{-g} dg = (1 + |y|)^{-2} / 2 (integrates to 1 over y).
  static double m_r_exp(double y) { return 0.5 / ((1.0 + std::abs(y)) * (1.0 + std::abs(y))); }
  /// m(y) under left-Haar measure: (2|y|)^{-1}.
  static double m_haar(double y) { return 1.0 / (2.0 * std::abs(y)); }
};

class RankDeficientError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Albert-Chib latent-variable probit model under a flat prior on beta.
/// X = beta in R^p, Y = latent utilities in R^n with y_i > 0 iff v_i = 1.
/// Integrating beta out gives f_Y(y) proportional to exp(-y'My/2) on the orthant, M = I - Z(Z'Z)^{-1}Z'.
class ProbitModel {
public:
  using XPoint = Eigen::VectorXd;
  using YPoint = Eigen::VectorXd;

  ProbitModel(Eigen::MatrixXd design, Eigen::VectorXi response) : z_(std::move(design)), v_(std::move(response)) {
    if (z_.rows() != v_.size()) throw std::invalid_argument("probit: design rows must match response length");
    if (z_.rows() == 0 || z_.cols() == 0) throw std::invalid_argument("probit: empty design");
    for (Eigen::Index i = 0; i < v_.size(); ++i) {
      if (v_[i] != 0 && v_[i] != 1) throw std::invalid_argument("probit: responses must be 0 or 1");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z_);
    const auto& sv = svd.singularValues();
    if (z_.rows() < z_.cols() || sv(sv.size() - 1) < 1e-10 * sv(0)) {
      throw RankDeficientError("probit: design matrix is rank deficient");
    }
    const Eigen::MatrixXd ztz = z_.transpose() * z_;
    ztz_inv_ = ztz.llt().solve(Eigen::MatrixXd::Identity(ztz.rows(), ztz.cols()));
    ztz_inv_ = 0.5 * (ztz_inv_ + ztz_inv_.transpose());
    Eigen::LLT<Eigen::MatrixXd> chol(ztz_inv_);
    if (chol.info() != Eigen::Success) throw NumericalError("probit: covariance factorization failed");
    cov_factor_ = chol.matrixL();
    hat_ = ztz_inv_ * z_.transpose();
    m_ = Eigen::MatrixXd::Identity(z_.rows(), z_.rows()) - z_ * hat_;
    m_ = 0.5 * (m_ + m_.transpose());
  }

  int dim_x() const { return static_cast<int>(z_.cols()); }
  int dim_y() const { return static_cast<int>(z_.rows()); }
  const Eigen::MatrixXd& design() const { return z_; }
  const Eigen::VectorXi& response() const { return v_; }
  const Eigen::MatrixXd& ztz_inverse() const { return ztz_inv_; }
  const Eigen::MatrixXd& projection_complement() const { return m_; }

  bool in_support(const Eigen::VectorXd& y) const {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (v_[i] == 1 ? !(y[i] > 0.0) : !(y[i] <= 0.0)) return false;
    }
    return true;
  }

  double log_joint(const Eigen::VectorXd& beta, const Eigen::VectorXd& y) const {
    if (!in_support(y)) return -kInf;
    return -0.5 * (y - z_ * beta).squaredNorm();
  }

  double log_fy_unnorm(const Eigen::VectorXd& y) const {
    if (!in_support(y)) return -kInf;
    return -0.5 * y.dot(m_ * y);
  }

  /// log pi(beta | v) up to a constant.
  double log_posterior(const Eigen::VectorXd& beta) const {
    const Eigen::VectorXd eta = z_ * beta;
    double s = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) s += log_normal_cdf(v_[i] == 1 ? eta[i] : -eta[i]);
    return s;
  }

  Eigen::VectorXd beta_mean(const Eigen::VectorXd& y) const { return hat_ * y; }

  /// beta | y ~ N((Z'Z)^{-1} Z'y, (Z'Z)^{-1}).
  Eigen::VectorXd sample_x_given_y(const Eigen::VectorXd& y, Rng& rng) const {
    Eigen::VectorXd z(dim_x());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = std_normal(rng);
    return hat_ * y + cov_factor_ * z;
  }

  /// Independent y_i ~ N(z_i'beta, 1) truncated to (0, inf) when v_i = 1, to (-inf, 0] otherwise.
  Eigen::VectorXd sample_y_given_x(const Eigen::VectorXd& beta, Rng& rng) const {
    const Eigen::VectorXd eta = z_ * beta;
    Eigen::VectorXd y(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      y[i] = v_[i] == 1 ? normal_truncated_positive(eta[i], rng) : normal_truncated_nonpositive(eta[i], rng);
    }
    return y;
  }

  /// f_Y(g y) g^n = exp(-g^2 y'My/2) g^n.
  ScaleLaw scale_law(const Eigen::VectorXd& y) const {
    return {static_cast<double>(dim_y()), 0.0, 0.5 * y.dot(m_ * y)};
  }

private:
  Eigen::MatrixXd z_;
  Eigen::VectorXi v_;
  Eigen::MatrixXd ztz_inv_;
  Eigen::MatrixXd cov_factor_;
  Eigen::MatrixXd hat_;
  Eigen::MatrixXd m_;
};

inline ProbitModel probit_build(Eigen::MatrixXd design, Eigen::VectorXi response) {
  return ProbitModel(std::move(design), std::move(response));
}

}  // namespace pxda
