#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "pxda/group_action.hpp"
#include "pxda/kernels.hpp"
#include "pxda/models.hpp"
#include "pxda/numeric.hpp"
#include "pxda/random.hpp"
#include "pxda/spectra.hpp"

namespace pxda {

/// f_{Y|X}(y|x) for the Laplace toy, normalized.
inline double laplace_y_given_x_density(double y, double x) {
  const double lp = -x + log_normal_cdf(x - 1.0);
  const double ln = x + log_normal_cdf(-x - 1.0);
  const double log_z = 0.5 + 0.5 * std::log(2.0 * std::numbers::pi) + log_add_exp(lp, ln);
  return std::exp(-std::abs(y) + normal_log_pdf(x - y) + 0.5 * std::log(2.0 * std::numbers::pi) - log_z);
}

/// DA transition density p(x | x_prev) = int f_{X|Y}(x|y) f_{Y|X}(y|x_prev) dy by quadrature.
inline double laplace_da_density(double x, double x_prev, const QuadratureOptions& opts = {1e-13, 1e-11, 5, 22}) {
  auto integrand = [&](double y) { return normal_pdf(x - y) * laplace_y_given_x_density(y, x_prev); };
  return integrate_line(integrand, {0.0, x_prev - 1.0, x_prev + 1.0, x}, 1.0, opts);
}

/// Discretized p, p_r (r = Exp(1)) and p* for the Laplace toy, all built on one discrete joint.
struct LaplaceToyFamily {
  GridSpec x_spec;
  GridSpec y_spec;
  Grid x_grid;
  Grid y_grid;
  DiscreteJoint joint;
  DiscretizedKernel q_r;     // on Y
  DiscretizedKernel q_haar;  // on Y
  DiscretizedKernel p;
  DiscretizedKernel p_r;
  DiscretizedKernel p_star;
};

inline LaplaceToyFamily laplace_toy_family(const GridSpec& x_spec = default_x_grid(),
                                           const GridSpec& y_spec = default_y_grid()) {
  const LaplaceToyModel model;
  LaplaceToyFamily fam;
  fam.x_spec = x_spec;
  fam.y_spec = y_spec;
  fam.x_grid = make_grid(x_spec);
  fam.y_grid = make_grid(y_spec);
  fam.joint = discretize_joint([&](double y) { return model.log_fy(y); },
                               [&](double x, double y) { return model.log_x_given_y(x, y); }, fam.x_grid, fam.y_grid);
  auto fy = [&](double y) { return std::exp(model.log_fy(y)); };
  fam.q_r = discretize(&LaplaceToyModel::qr_exp_density, fy, fam.y_grid, Normalization::reversible, "q_r");
  fam.q_haar = discretize(&LaplaceToyModel::haar_density, fy, fam.y_grid, Normalization::rows, "q");
  fam.p = da_kernel(fam.joint, "p");
  fam.p_r = sandwich_kernel(fam.joint, fam.q_r.matrix, "p_r");
  fam.p_star = sandwich_kernel(fam.joint, fam.q_haar.matrix, "p_star");
  return fam;
}

/// Grid for beta in a one-covariate probit model: centered at the posterior mode, extending
/// until the log posterior has dropped by `drop` on both sides.
inline GridSpec probit_beta_grid(const ProbitModel& model, int panels = 25, int nodes_per_panel = 8,
                                 double drop = 40.0) {
  if (model.dim_x() != 1) throw std::invalid_argument("probit spectra need exactly one covariate");
  auto lp = [&](double b) { return model.log_posterior(Eigen::VectorXd::Constant(1, b)); };
  double mode = 0.0;
  double best = -kInf;
  for (double b = -50.0; b <= 50.0; b += 0.01) {
    const double v = lp(b);
    if (v > best) {
      best = v;
      mode = b;
    }
  }
  double reach = 0.5;
  while (lp(mode - reach) > best - drop || lp(mode + reach) > best - drop) {
    reach *= 1.25;
    if (reach > 1e3) throw NumericalError("probit posterior does not decay; it may be improper");
  }
  GridSpec s;
  s.center = mode;
  s.half_width = reach;
  s.panels = panels;
  s.nodes_per_panel = nodes_per_panel;
  return s;
}

struct ProbitFamilyOptions {
  int latent_draws = 2000;
  std::uint64_t seed = 1;
  double pxda_a = 1.0;
  double pxda_b = 0.5;
  int panels = 25;
  int nodes_per_panel = 8;
};

struct ProbitFamily {
  GridSpec spec;
  Grid grid;
  DiscretizedKernel p;
  DiscretizedKernel p_r;
  DiscretizedKernel p_star;
};

/// Discretized DA, PX-DA and Haar PX-DA kernels for a probit model with p = 1. The latent
/// integral has no closed form, so each row is the Rao-Blackwellized average of the normal
/// density of beta | y' over `latent_draws` Monte Carlo draws of y' (common random numbers
/// across rows and kernels). Rows are made reversible w.r.t. the exact posterior on the grid.
inline ProbitFamily probit_family(const ProbitModel& model, const ProbitFamilyOptions& opt = {}) {
  ProbitFamily fam;
  fam.spec = probit_beta_grid(model, opt.panels, opt.nodes_per_panel);
  fam.grid = make_grid(fam.spec);
  const Eigen::Index n = fam.grid.size();
  const MultiplicativeGroup action(model.dim_y());
  const QrRule<GammaSquaredScale> qr{GammaSquaredScale(opt.pxda_a, opt.pxda_b)};
  const HaarRule haar{};
  const double sd = std::sqrt(model.ztz_inverse()(0, 0));
  const Eigen::RowVectorXd hat = model.ztz_inverse()(0, 0) * model.design().col(0).transpose();

  // Exact posterior weights; log scale first to avoid underflow.
  Eigen::VectorXd lw(n);
  for (Eigen::Index i = 0; i < n; ++i) lw[i] = model.log_posterior(Eigen::VectorXd::Constant(1, fam.grid.nodes[i]));
  Eigen::VectorXd w = (lw.array() - lw.maxCoeff()).exp().matrix().cwiseProduct(fam.grid.weights);
  w /= w.sum();

  Eigen::MatrixXd raw_da = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd raw_px = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd raw_haar = Eigen::MatrixXd::Zero(n, n);
  auto accumulate = [&](Eigen::MatrixXd& raw, Eigen::Index i, double mean) {
    for (Eigen::Index j = 0; j < n; ++j) raw(i, j) += normal_pdf((fam.grid.nodes[j] - mean) / sd) / sd;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng rng = make_stream(opt.seed, 0);
    const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, fam.grid.nodes[i]);
    for (int k = 0; k < opt.latent_draws; ++k) {
      const Eigen::VectorXd y = model.sample_y_given_x(beta, rng);
      accumulate(raw_da, i, hat.dot(y));
      accumulate(raw_px, i, hat.dot(qr.step(model, action, y, rng)));
      accumulate(raw_haar, i, hat.dot(haar.step(model, action, y, rng)));
    }
  }
  auto finish = [&](Eigen::MatrixXd raw, const char* id) {
    raw = raw * fam.grid.weights.asDiagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = raw.row(i).sum();
      if (!(s > 0.0)) throw NumericalError("probit_family: empty row");
      raw.row(i) /= s;
    }
    DiscretizedKernel k;
    k.id = id;
    k.grid = fam.grid.nodes;
    k.weights = w;
    k.matrix = reversible_from_raw(raw, w);
    return k;
  };
  fam.p = finish(raw_da, "p");
  fam.p_r = finish(raw_px, "p_r");
  fam.p_star = finish(raw_haar, "p_star");
  return fam;
}

}  // namespace pxda
