#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <json.hpp>

#include "pxda/numeric.hpp"

namespace pxda {

/// Raised by exact_asymptotic_variance when the mean-zero part of the kernel has eigenvalue 1.
class ReducibleChainError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// Quadrature grid on a subset of the line: nodes (cell centers) and their weights.
struct Grid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int k) {
  if (k < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

/// Composite rule over consecutive panel edges; nodes_per_panel == 1 gives midpoint cells.
inline Grid panel_grid(const std::vector<double>& edges, int nodes_per_panel) {
  if (edges.size() < 2) throw std::invalid_argument("panel_grid: need at least one panel");
  const auto [t, w] = gauss_legendre(nodes_per_panel);
  const Eigen::Index k = t.size();
  Grid g;
  const auto panels = static_cast<Eigen::Index>(edges.size() - 1);
  g.nodes.resize(panels * k);
  g.weights.resize(panels * k);
  for (Eigen::Index p = 0; p < panels; ++p) {
    const double a = edges[static_cast<std::size_t>(p)];
    const double b = edges[static_cast<std::size_t>(p) + 1];
    if (!(b > a)) throw std::invalid_argument("panel_grid: edges must increase");
    for (Eigen::Index i = 0; i < k; ++i) {
      g.nodes[p * k + i] = 0.5 * (a + b) + 0.5 * (b - a) * t[i];
      g.weights[p * k + i] = 0.5 * (b - a) * w[i];
    }
  }
  return g;
}

/// Grid description. Panels are laid out symmetrically about `center`:
///   uniform: `panels` equal panels on each side of the center over half-width L;
///   graded : on each side, `graded_levels` geometric panels ratio^levels..ratio^1 toward the
///            center (in units of 1), then `panels` equal panels from 1 out to L.
struct GridSpec {
  enum class Kind { uniform, graded };
  Kind kind = Kind::uniform;
  double center = 0.0;
  double half_width = 25.0;
  int panels = 25;
  int nodes_per_panel = 8;
  int graded_levels = 0;
  double graded_ratio = 0.5;

  /// Twice the panels (and, for graded grids, twice the geometric levels).
  GridSpec doubled() const {
    GridSpec d = *this;
    d.panels *= 2;
    d.graded_levels *= 2;
    if (kind == Kind::graded) d.graded_ratio = std::sqrt(graded_ratio);
    return d;
  }

  nlohmann::json to_json() const {
    return {{"kind", kind == Kind::uniform ? "uniform" : "graded"},
            {"center", center},
            {"half_width", half_width},
            {"panels_per_side", panels},
            {"nodes_per_panel", nodes_per_panel},
            {"graded_levels", graded_levels},
            {"graded_ratio", graded_ratio}};
  }
};

/// Default X grid: 25 panels per side on [-25, 25], 8 Gauss nodes each (400 nodes).
inline GridSpec default_x_grid() { return GridSpec{}; }

/// Default Y grid for the Laplace toy: graded toward the kink and the q_r spike at 0.
inline GridSpec default_y_grid() {
  GridSpec s;
  s.kind = GridSpec::Kind::graded;
  s.panels = 24;
  s.graded_levels = 20;
  return s;
}

inline Grid make_grid(const GridSpec& spec) {
  if (spec.panels < 1 || spec.nodes_per_panel < 1 || !(spec.half_width > 0.0)) {
    throw std::invalid_argument("make_grid: invalid grid specification");
  }
  std::vector<double> side;  // distances from the center, increasing, starting at 0
  side.push_back(0.0);
  double start = 0.0;
  if (spec.kind == GridSpec::Kind::graded) {
    if (!(spec.half_width > 1.0) || !(spec.graded_ratio > 0.0 && spec.graded_ratio < 1.0)) {
      throw std::invalid_argument("make_grid: graded grids need half_width > 1 and ratio in (0, 1)");
    }
    for (int i = spec.graded_levels; i >= 1; --i) side.push_back(std::pow(spec.graded_ratio, i));
    if (side.back() != 1.0) side.push_back(1.0);
    start = 1.0;
  }
  const double step = (spec.half_width - start) / spec.panels;
  for (int i = 1; i <= spec.panels; ++i) side.push_back(start + i * step);
  side.back() = spec.half_width;
  std::vector<double> edges;
  for (auto it = side.rbegin(); it != side.rend(); ++it) edges.push_back(spec.center - *it);
  for (std::size_t i = 1; i < side.size(); ++i) edges.push_back(spec.center + side[i]);
  return panel_grid(edges, spec.nodes_per_panel);
}

/// Midpoint cells of equal width on [lo, hi].
inline Grid midpoint_grid(double lo, double hi, int cells) {
  std::vector<double> edges(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / cells;
  return panel_grid(edges, 1);
}

// ---------------------------------------------------------------------------
// Discretized kernels
// ---------------------------------------------------------------------------

struct DiscretizedKernel {
  std::string id;
  Eigen::VectorXd grid;     // cell centers
  Eigen::VectorXd weights;  // stationary probabilities, sum 1
  Eigen::MatrixXd matrix;   // row-stochastic

  Eigen::Index size() const { return grid.size(); }
};

enum class Normalization {
  rows,       // divide each row by its sum
  reversible  // symmetrize the flux, scale pairwise so no row exceeds 1, put the deficit on the diagonal
};

/// Stationary probabilities f(center_i) * weight_i, normalized.
template <class F>
Eigen::VectorXd discretize_density(F&& density, const Grid& grid) {
  Eigen::VectorXd w(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) w[i] = density(grid.nodes[i]) * grid.weights[i];
  const double s = w.sum();
  if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("discretize_density: zero or non-finite mass");
  return w / s;
}

/// Exactly reversible stochastic matrix from a nonnegative matrix whose flux w_i raw_ij is
/// symmetric up to discretization error.
inline Eigen::MatrixXd reversible_from_raw(const Eigen::MatrixXd& raw, const Eigen::VectorXd& w) {
  const Eigen::Index n = raw.rows();
  Eigen::MatrixXd flux = w.asDiagonal() * raw;
  flux = 0.5 * (flux + flux.transpose()).eval();
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rs = flux.row(i).sum() / w[i];
    if (!std::isfinite(rs)) throw NumericalError("discretize: non-finite row");
    c[i] = rs > 1.0 ? 1.0 / rs : 1.0;
  }
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = flux(i, j) * std::min(c[i], c[j]) / w[i];
  }
  for (Eigen::Index i = 0; i < n; ++i) k(i, i) += std::max(0.0, 1.0 - k.row(i).sum());
  return k;
}

/// matrix[i][j] proportional to p(center_j | center_i) * weight_j; weights from `stationary`.
template <class Density, class Stationary>
DiscretizedKernel discretize(Density&& density, Stationary&& stationary, const Grid& grid,
                             Normalization norm = Normalization::rows, std::string id = {}) {
  const Eigen::Index n = grid.size();
  DiscretizedKernel k;
  k.id = std::move(id);
  k.grid = grid.nodes;
  k.weights = discretize_density(stationary, grid);
  Eigen::MatrixXd raw(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) raw(i, j) = density(grid.nodes[j], grid.nodes[i]) * grid.weights[j];
    const double s = raw.row(i).sum();
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw NumericalError("discretize: row " + std::to_string(i) + " has zero or non-finite normalizer");
    }
    if (norm == Normalization::rows) raw.row(i) /= s;
  }
  k.matrix = norm == Normalization::rows ? raw : reversible_from_raw(raw, k.weights);
  return k;
}

inline double stationarity_residual(const DiscretizedKernel& k) {
  return (k.weights.transpose() * k.matrix - k.weights.transpose()).cwiseAbs().maxCoeff();
}

inline double row_sum_residual(const DiscretizedKernel& k) {
  return (k.matrix.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

/// max_ij |w_i K_ij - w_j K_ji|.
inline double detailed_balance_residual(const DiscretizedKernel& k) {
  const Eigen::MatrixXd flux = k.weights.asDiagonal() * k.matrix;
  return (flux - flux.transpose()).cwiseAbs().maxCoeff();
}

namespace detail {

inline Eigen::VectorXd sqrt_weights(const Eigen::VectorXd& w, const char* who) {
  if ((w.array() <= 0.0).any()) throw NumericalError(std::string(who) + ": weights contain zeros");
  return w.cwiseSqrt();
}

/// D^{1/2} K D^{-1/2} with the stationary direction projected out.
inline Eigen::MatrixXd deflated_similarity(const DiscretizedKernel& k, const char* who) {
  const Eigen::VectorXd s = sqrt_weights(k.weights, who);
  Eigen::MatrixXd m = s.asDiagonal() * k.matrix * s.cwiseInverse().asDiagonal();
  m -= s * s.transpose();
  return m;
}

inline double top_singular_value(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

inline Eigen::VectorXd centered(const DiscretizedKernel& k, const Eigen::VectorXd& h) {
  if (h.size() != k.size()) throw std::invalid_argument("test function length must match the grid");
  return h.array() - k.weights.dot(h);
}

}  // namespace detail

/// Norm on the mean-zero subspace: largest singular value of D^{1/2} K D^{-1/2} - s s', s = sqrt(w).
/// For reversible K this is the largest absolute eigenvalue on that subspace; otherwise it is the
/// singular-value surrogate.
inline double operator_norm(const DiscretizedKernel& k) {
  return detail::top_singular_value(detail::deflated_similarity(k, "operator_norm"));
}

/// <K h, h>_w for h centered under the weights (lag-one stationary covariance).
inline double lag_covariance(const DiscretizedKernel& k, const Eigen::VectorXd& h) {
  const Eigen::VectorXd hc = detail::centered(k, h);
  return hc.dot(k.weights.asDiagonal() * (k.matrix * hc));
}

inline double stationary_variance(const DiscretizedKernel& k, const Eigen::VectorXd& h) {
  const Eigen::VectorXd hc = detail::centered(k, h);
  return hc.dot(k.weights.asDiagonal() * hc);
}

/// <h, (I + K)(I - K)^{-1} h> on the mean-zero subspace, for K reversible w.r.t. its weights.
inline double exact_asymptotic_variance(const DiscretizedKernel& k, const Eigen::VectorXd& h,
                                        double balance_tol = 1e-8) {
  const double db = detailed_balance_residual(k);
  if (!(db < balance_tol)) {
    throw std::invalid_argument("exact_asymptotic_variance: kernel is not reversible (residual " + std::to_string(db) +
                                ")");
  }
  Eigen::MatrixXd m = detail::deflated_similarity(k, "exact_asymptotic_variance");
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd s = k.weights.cwiseSqrt();
  const Eigen::VectorXd u = s.cwiseProduct(detail::centered(k, h));
  const Eigen::VectorXd c = es.eigenvectors().transpose() * u;
  // The deflated stationary direction sits at eigenvalue 0 and carries no weight of u.
  double v = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam > 1.0 - 1e-10) {
      throw ReducibleChainError(
          "exact_asymptotic_variance: eigenvalue 1 on the mean-zero subspace (reducible chain); analyse each "
          "communicating block separately");
    }
    v += (1.0 + lam) / (1.0 - lam) * c[i] * c[i];
  }
  return v;
}

/// Closed communicating classes of the support graph (i ~ j when K_ij or K_ji exceeds tol).
inline std::vector<std::vector<Eigen::Index>> communicating_blocks(const DiscretizedKernel& k, double tol = 0.0) {
  const Eigen::Index n = k.size();
  std::vector<Eigen::Index> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Eigen::Index>> blocks;
  for (Eigen::Index start = 0; start < n; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    const auto id = static_cast<Eigen::Index>(blocks.size());
    blocks.emplace_back();
    std::vector<Eigen::Index> stack{start};
    label[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      blocks.back().push_back(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (label[static_cast<std::size_t>(j)] < 0 && (k.matrix(i, j) > tol || k.matrix(j, i) > tol)) {
          label[static_cast<std::size_t>(j)] = id;
          stack.push_back(j);
        }
      }
    }
    std::sort(blocks.back().begin(), blocks.back().end());
  }
  return blocks;
}

/// The kernel restricted to `cells` (rows renormalized, weights renormalized).
inline DiscretizedKernel restrict_to_block(const DiscretizedKernel& k, const std::vector<Eigen::Index>& cells) {
  const auto m = static_cast<Eigen::Index>(cells.size());
  DiscretizedKernel b;
  b.id = k.id;
  b.grid.resize(m);
  b.weights.resize(m);
  b.matrix.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const Eigen::Index i = cells[static_cast<std::size_t>(a)];
    b.grid[a] = k.grid[i];
    b.weights[a] = k.weights[i];
    for (Eigen::Index c = 0; c < m; ++c) b.matrix(a, c) = k.matrix(i, cells[static_cast<std::size_t>(c)]);
    const double s = b.matrix.row(a).sum();
    if (!(s > 0.0)) throw NumericalError("restrict_to_block: empty row");
    b.matrix.row(a) /= s;
  }
  b.weights /= b.weights.sum();
  return b;
}

/// Asymptotic variance of h within each communicating block.
inline std::vector<double> per_block_asymptotic_variance(const DiscretizedKernel& k, const Eigen::VectorXd& h) {
  std::vector<double> out;
  for (const auto& cells : communicating_blocks(k)) {
    const DiscretizedKernel b = restrict_to_block(k, cells);
    Eigen::VectorXd hb(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t a = 0; a < cells.size(); ++a) hb[static_cast<Eigen::Index>(a)] = h[cells[a]];
    out.push_back(exact_asymptotic_variance(b, hb));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discrete joints and DA-type kernels
// ---------------------------------------------------------------------------

/// Joint probabilities J(j, k) on a Y grid (rows) times an X grid (columns).
struct DiscreteJoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd joint;

  Eigen::VectorXd px() const { return joint.colwise().sum().transpose(); }
  Eigen::VectorXd py() const { return joint.rowwise().sum(); }

  /// f_{X|Y}: row j is the law of X given y_j.
  Eigen::MatrixXd x_given_y() const {
    const Eigen::VectorXd p = py();
    if ((p.array() <= 0.0).any()) throw NumericalError("DiscreteJoint: zero y-marginal cell");
    return p.cwiseInverse().asDiagonal() * joint;
  }
  /// f_{Y|X}: row k is the law of Y given x_k.
  Eigen::MatrixXd y_given_x() const {
    const Eigen::VectorXd p = px();
    if ((p.array() <= 0.0).any()) throw NumericalError("DiscreteJoint: zero x-marginal cell");
    return p.cwiseInverse().asDiagonal() * joint.transpose();
  }
};

/// J(j, k) = f_Y-probability of y_j times the row-normalized f_{X|Y}(x_k | y_j) weight_k.
template <class LogFy, class LogXGivenY>
DiscreteJoint discretize_joint(LogFy&& log_fy, LogXGivenY&& log_x_given_y, const Grid& xg, const Grid& yg) {
  DiscreteJoint d;
  d.x = xg.nodes;
  d.y = yg.nodes;
  const Eigen::VectorXd fy = discretize_density([&](double y) { return std::exp(log_fy(y)); }, yg);
  d.joint.resize(yg.size(), xg.size());
  for (Eigen::Index j = 0; j < yg.size(); ++j) {
    for (Eigen::Index k = 0; k < xg.size(); ++k) d.joint(j, k) = std::exp(log_x_given_y(xg.nodes[k], yg.nodes[j])) * xg.weights[k];
    const double s = d.joint.row(j).sum();
    if (!(s > 0.0)) throw NumericalError("discretize_joint: X grid misses the conditional at y = " + std::to_string(yg.nodes[j]));
    d.joint.row(j) *= fy[j] / s;
  }
  return d;
}

/// Sandwich kernel sum_{y, y'} f(y|x') R(y, y') f(x|y'); R = identity gives the DA kernel.
inline DiscretizedKernel sandwich_kernel(const DiscreteJoint& d, const Eigen::MatrixXd& r, std::string id) {
  DiscretizedKernel k;
  k.id = std::move(id);
  k.grid = d.x;
  k.weights = d.px();
  k.matrix = d.y_given_x() * (r * d.x_given_y());
  return k;
}

inline DiscretizedKernel da_kernel(const DiscreteJoint& d, std::string id = "da") {
  DiscretizedKernel k;
  k.id = std::move(id);
  k.grid = d.x;
  k.weights = d.px();
  k.matrix = d.y_given_x() * d.x_given_y();
  return k;
}

/// The DA representation of a sandwich kernel with R = R_half^2:
/// f*(x, y) = f_Y(y) sum_{y'} f(x|y') R_half(y, y').
inline DiscreteJoint half_step_joint(const DiscreteJoint& d, const Eigen::MatrixXd& r_half) {
  DiscreteJoint s = d;
  s.joint = d.py().asDiagonal() * (r_half * d.x_given_y());
  return s;
}

/// Squared maximal correlation: the second singular value of Dx^{-1/2} J Dy^{-1/2}, squared.
/// `joint` is indexed (x, y).
inline double maximal_correlation_sq(const Eigen::MatrixXd& joint) {
  if ((joint.array() < 0.0).any()) throw std::invalid_argument("maximal_correlation_sq: negative joint entry");
  const Eigen::VectorXd px = joint.rowwise().sum();
  const Eigen::VectorXd py = joint.colwise().sum().transpose();
  if ((px.array() <= 0.0).any() || (py.array() <= 0.0).any()) {
    throw NumericalError("maximal_correlation_sq: zero marginal cell");
  }
  const Eigen::VectorXd sx = px.cwiseSqrt();
  const Eigen::VectorXd sy = py.cwiseSqrt();
  Eigen::MatrixXd m = sx.cwiseInverse().asDiagonal() * joint * sy.cwiseInverse().asDiagonal();
  // The top singular pair is (sx, sy) with value 1; deflate it explicitly.
  m -= sx * sy.transpose();
  const double g = std::min(1.0, detail::top_singular_value(m));
  return g * g;
}

inline double maximal_correlation_sq(const DiscreteJoint& d) { return maximal_correlation_sq(Eigen::MatrixXd(d.joint.transpose())); }

// ---------------------------------------------------------------------------
// Ordering certificates
// ---------------------------------------------------------------------------

struct TestFunction {
  std::string name;
  std::function<double(double)> h;
};

inline std::vector<TestFunction> default_test_functions() {
  return {{"x", [](double x) { return x; }},
          {"x^2", [](double x) { return x * x; }},
          {"sign(x)", [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }},
          {"exp(-|x|)", [](double x) { return std::exp(-std::abs(x)); }}};
}

struct OrderingCheck {
  std::string quantity;  // "norm" or "variance:<h>"
  std::string better;
  std::string worse;
  double better_value = 0.0;
  double worse_value = 0.0;
  bool pass = false;
};

struct OrderingCertificate {
  std::vector<std::string> kernel_ids;
  std::vector<double> norms;
  std::vector<bool> reversible;
  std::vector<std::string> function_names;
  std::vector<std::vector<double>> variances;  // [function][kernel]
  std::vector<OrderingCheck> checks;
  double slack = 1e-6;
  nlohmann::json grid = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const OrderingCheck& c) { return c.pass; });
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kernels"] = kernel_ids;
    nlohmann::json norms_j = nlohmann::json::object();
    for (std::size_t i = 0; i < kernel_ids.size(); ++i) {
      norms_j[kernel_ids[i]] = {{"value", norms[i]},
                                {"label", reversible[i] ? "operator norm (reversible)"
                                                        : "deflated largest singular value (non-reversible)"}};
    }
    j["norms"] = norms_j;
    nlohmann::json var_j = nlohmann::json::object();
    for (std::size_t f = 0; f < function_names.size(); ++f) {
      nlohmann::json row = nlohmann::json::object();
      for (std::size_t i = 0; i < kernel_ids.size(); ++i) row[kernel_ids[i]] = variances[f][i];
      var_j[function_names[f]] = row;
    }
    j["variances"] = var_j;
    nlohmann::json checks_j = nlohmann::json::array();
    for (const auto& c : checks) {
      checks_j.push_back({{"quantity", c.quantity},
                          {"claim", c.better + " <= " + c.worse},
                          {"lhs", c.better_value},
                          {"rhs", c.worse_value},
                          {"pass", c.pass}});
    }
    j["checks"] = checks_j;
    j["slack"] = slack;
    j["all_pass"] = all_pass();
    j["grid"] = grid;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
  }
};

/// Norms and variances for kernels listed from worst to best; certifies each adjacent pair
/// (norm and every test function) with the given slack. Failures are recorded, not thrown.
inline OrderingCertificate certify_orderings(const std::vector<DiscretizedKernel>& kernels,
                                             const std::vector<TestFunction>& functions, double slack = 1e-6) {
  OrderingCertificate cert;
  cert.slack = slack;
  if (kernels.empty()) return cert;
  for (const auto& k : kernels) {
    if (k.size() != kernels.front().size() || (k.weights - kernels.front().weights).cwiseAbs().maxCoeff() > 1e-9) {
      throw std::invalid_argument("certify_orderings: kernels must share grid and weights");
    }
  }
  std::vector<Eigen::VectorXd> hs;
  for (const auto& f : functions) {
    cert.function_names.push_back(f.name);
    hs.push_back(kernels.front().grid.unaryExpr(f.h));
  }
  cert.variances.assign(functions.size(), {});
  for (const auto& k : kernels) {
    cert.kernel_ids.push_back(k.id);
    cert.norms.push_back(operator_norm(k));
    const bool rev = detailed_balance_residual(k) < 1e-8;
    cert.reversible.push_back(rev);
    for (std::size_t f = 0; f < functions.size(); ++f) {
      cert.variances[f].push_back(rev ? exact_asymptotic_variance(k, hs[f]) : kNaN);
    }
  }
  for (std::size_t i = 1; i < kernels.size(); ++i) {
    const auto& worse = cert.kernel_ids[i - 1];
    const auto& better = cert.kernel_ids[i];
    cert.checks.push_back({"norm", better, worse, cert.norms[i], cert.norms[i - 1], cert.norms[i] <= cert.norms[i - 1] + slack});
    for (std::size_t f = 0; f < functions.size(); ++f) {
      const double b = cert.variances[f][i];
      const double w = cert.variances[f][i - 1];
      cert.checks.push_back({"variance:" + functions[f].name, better, worse, b, w, b <= w + slack});
    }
  }
  return cert;
}

}  // namespace pxda
