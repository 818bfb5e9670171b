#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pxda/diagnostics.hpp"
#include "pxda/families.hpp"
#include "pxda/kernels.hpp"
#include "pxda/spectra.hpp"

namespace pxda {

inline constexpr const char* kVersion = "0.1.0";

/// Bad configuration or command-line input (exit code 1).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed probit data (exit code 1).
class DataError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Probit data files: one row per observation, p covariates then the 0/1 response,
// comma separated. Blank lines and lines starting with '#' are skipped.
// ---------------------------------------------------------------------------

struct ProbitData {
  Eigen::MatrixXd design;
  Eigen::VectorXi response;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

inline bool parse_long(const std::string& text, long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtol(t.c_str(), &end, 10);
  return end == t.c_str() + t.size();
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace detail

inline ProbitData read_probit_data(std::istream& is, const std::string& what = "probit data") {
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(t);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      double v = 0.0;
      if (!detail::parse_double(cell, v)) {
        throw DataError(what + ":" + std::to_string(lineno) + ": not a number: '" + detail::trim(cell) + "'");
      }
      row.push_back(v);
    }
    if (row.size() < 2) throw DataError(what + ":" + std::to_string(lineno) + ": need at least one covariate and a response");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(what + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) + " columns");
    }
    if (row.back() != 0.0 && row.back() != 1.0) {
      throw DataError(what + ":" + std::to_string(lineno) + ": response must be 0 or 1");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(what + ": no observations");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size() - 1);
  ProbitData d;
  d.design.resize(n, p);
  d.response.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) d.design(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    d.response[i] = static_cast<int>(rows[static_cast<std::size_t>(i)].back());
  }
  return d;
}

inline ProbitData read_probit_data(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open probit data file '" + path + "'");
  return read_probit_data(is, path);
}

inline void write_probit_data(std::ostream& os, const ProbitData& d) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < d.design.rows(); ++i) {
    for (Eigen::Index k = 0; k < d.design.cols(); ++k) os << d.design(i, k) << ",";
    os << d.response[i] << "\n";
  }
}

/// Covariates iid N(0, 1), true beta = (1, -1, 0, ...), v_i ~ Bernoulli(Phi(z_i' beta)).
/// Row i consumes p normals then one uniform from stream 0 of `seed`.
inline ProbitData make_synthetic_probit(long n, long p, std::uint64_t seed) {
  if (p < 1 || n <= p) throw ConfigError("gen-data: need n > p >= 1");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta[0] = 1.0;
  if (p > 1) beta[1] = -1.0;
  Rng rng = make_stream(seed, 0);
  ProbitData d;
  d.design.resize(n, p);
  d.response.resize(n);
  for (long i = 0; i < n; ++i) {
    for (long k = 0; k < p; ++k) d.design(i, k) = std_normal(rng);
    const double prob = normal_cdf(d.design.row(i).dot(beta));
    d.response[i] = uniform01(rng) < prob ? 1 : 0;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct KernelSpec {
  enum class Kind { da = 0, pxda = 1, haar_pxda = 2, joint_xg = 3 };
  Kind kind = Kind::da;
  double a = 1.0;
  double b = 0.5;
  bool explicit_params = false;

  std::string id() const {
    switch (kind) {
      case Kind::da: return "da";
      case Kind::pxda: return "pxda_a" + detail::format_number(a) + "_b" + detail::format_number(b);
      case Kind::haar_pxda: return "haar_pxda";
      case Kind::joint_xg: return "joint_xg";
    }
    return "?";
  }
};

/// Flat `key = value` settings. Every key has a default; see `config_help()`.
struct ExperimentConfig {
  std::string model = "laplace_toy";
  std::string data;
  std::string kernels_text = "da, pxda, haar_pxda";
  std::vector<KernelSpec> kernels;
  long iterations = 100000;
  long burn_in = -1;  // -1: 10% of iterations
  long thin = 1;
  std::uint64_t seed = 42;
  double pxda_a = 1.0;
  double pxda_b = 0.5;
  std::string output_dir = "pxda_out";
  double x_half_width = 25.0;
  int x_panels = 25;
  int x_nodes_per_panel = 8;
  int y_panels = 24;
  int y_graded_levels = 20;
  double y_graded_ratio = 0.5;
  int grid_refine = 0;
  int spectra_latent_draws = 2000;

  long effective_burn_in() const { return burn_in < 0 ? iterations / 10 : burn_in; }

  /// Applies one `key=value` assignment.
  void set(const std::string& key_in, const std::string& value_in) {
    const std::string key = detail::trim(key_in);
    const std::string value = detail::trim(value_in);
    auto as_long = [&](long lo) {
      long v = 0;
      if (!detail::parse_long(value, v)) throw ConfigError("config: '" + key + "' must be an integer, got '" + value + "'");
      if (v < lo) throw ConfigError("config: '" + key + "' must be >= " + std::to_string(lo));
      return v;
    };
    auto as_double = [&] {
      double v = 0.0;
      if (!detail::parse_double(value, v)) throw ConfigError("config: '" + key + "' must be a number, got '" + value + "'");
      return v;
    };
    if (key == "model") {
      if (value != "laplace_toy" && value != "probit") throw ConfigError("config: model must be laplace_toy or probit");
      model = value;
    } else if (key == "data") {
      data = value;
    } else if (key == "kernels") {
      kernels_text = value;
    } else if (key == "iterations") {
      iterations = as_long(1);
    } else if (key == "burn_in") {
      burn_in = as_long(0);
    } else if (key == "thin") {
      thin = as_long(1);
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(as_long(0));
    } else if (key == "pxda_a") {
      pxda_a = as_double();
    } else if (key == "pxda_b") {
      pxda_b = as_double();
    } else if (key == "output_dir") {
      output_dir = value;
    } else if (key == "x_half_width") {
      x_half_width = as_double();
    } else if (key == "x_panels") {
      x_panels = static_cast<int>(as_long(1));
    } else if (key == "x_nodes_per_panel") {
      x_nodes_per_panel = static_cast<int>(as_long(1));
    } else if (key == "y_panels") {
      y_panels = static_cast<int>(as_long(1));
    } else if (key == "y_graded_levels") {
      y_graded_levels = static_cast<int>(as_long(0));
    } else if (key == "y_graded_ratio") {
      y_graded_ratio = as_double();
    } else if (key == "grid_refine") {
      grid_refine = static_cast<int>(as_long(0));
    } else if (key == "spectra_latent_draws") {
      spectra_latent_draws = static_cast<int>(as_long(1));
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + assignment + "'");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
  }

  /// Parses the kernel list and checks the invariants; call after all assignments.
  void finalize() {
    kernels = parse_kernels(kernels_text);
    if (kernels.empty()) throw ConfigError("config: kernels is empty");
    if (!(pxda_a > 0.0) || !(pxda_b > 0.0)) throw ConfigError("config: pxda_a and pxda_b must be positive");
    if (model == "probit" && data.empty()) throw ConfigError("config: model = probit needs a data file");
    if (effective_burn_in() >= iterations) throw ConfigError("config: need iterations > burn_in");
    if ((iterations - effective_burn_in()) / thin < 100) {
      throw ConfigError("config: fewer than 100 kept iterates after burn-in; batch means needs at least 100");
    }
    if (!(x_half_width > 0.0) || !(y_graded_ratio > 0.0 && y_graded_ratio < 1.0)) {
      throw ConfigError("config: grid half width must be positive and the graded ratio in (0, 1)");
    }
    for (const auto& k : kernels) {
      if (model == "laplace_toy" && k.kind == KernelSpec::Kind::pxda && k.explicit_params) {
        throw ConfigError("config: the laplace_toy pxda kernel uses r = Exp(1); pxda(a,b) applies to probit only");
      }
    }
  }

  std::vector<KernelSpec> parse_kernels(const std::string& text) const {
    std::vector<KernelSpec> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = pos;
      int depth = 0;
      while (end < text.size() && (text[end] != ',' || depth > 0)) {
        if (text[end] == '(') ++depth;
        if (text[end] == ')') --depth;
        ++end;
      }
      const std::string item = detail::trim(text.substr(pos, end - pos));
      pos = end + 1;
      if (item.empty()) continue;
      KernelSpec k;
      k.a = pxda_a;
      k.b = pxda_b;
      if (item == "da") {
        k.kind = KernelSpec::Kind::da;
      } else if (item == "haar_pxda") {
        k.kind = KernelSpec::Kind::haar_pxda;
      } else if (item == "joint_xg") {
        k.kind = KernelSpec::Kind::joint_xg;
      } else if (item == "pxda") {
        k.kind = KernelSpec::Kind::pxda;
      } else if (item.rfind("pxda(", 0) == 0 && item.back() == ')') {
        k.kind = KernelSpec::Kind::pxda;
        k.explicit_params = true;
        const std::string inner = item.substr(5, item.size() - 6);
        const auto comma = inner.find(',');
        if (comma == std::string::npos || !detail::parse_double(inner.substr(0, comma), k.a) ||
            !detail::parse_double(inner.substr(comma + 1), k.b) || !(k.a > 0.0) || !(k.b > 0.0)) {
          throw ConfigError("config: pxda parameters must be pxda(a,b) with a, b > 0, got '" + item + "'");
        }
      } else {
        throw ConfigError("config: unknown kernel '" + item + "' (da, pxda, pxda(a,b), haar_pxda, joint_xg)");
      }
      out.push_back(k);
    }
    return out;
  }

  /// Resolved settings in a fixed key order; the config hash is taken over this.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["model"] = model;
    j["data"] = data;
    j["kernels"] = nlohmann::ordered_json::array();
    for (const auto& k : kernels) j["kernels"].push_back(k.id());
    j["iterations"] = iterations;
    j["burn_in"] = effective_burn_in();
    j["thin"] = thin;
    j["seed"] = seed;
    j["pxda_a"] = pxda_a;
    j["pxda_b"] = pxda_b;
    j["x_half_width"] = x_half_width;
    j["x_panels"] = x_panels;
    j["x_nodes_per_panel"] = x_nodes_per_panel;
    j["y_panels"] = y_panels;
    j["y_graded_levels"] = y_graded_levels;
    j["y_graded_ratio"] = y_graded_ratio;
    j["grid_refine"] = grid_refine;
    j["spectra_latent_draws"] = spectra_latent_draws;
    return j;
  }

  std::string hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json().dump())));
    return buf;
  }
};

/// Reads `key = value` lines ('#' starts a comment), then applies `overrides` in order.
inline ExperimentConfig load_config(std::istream& is, const std::vector<std::string>& overrides = {},
                                    const std::string& what = "config") {
  ExperimentConfig c;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    try {
      c.set(t);
    } catch (const ConfigError& e) {
      throw ConfigError(what + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& o : overrides) c.set(o);
  c.finalize();
  return c;
}

inline ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  if (path.empty()) {
    std::istringstream empty;
    return load_config(empty, overrides);
  }
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  return load_config(is, overrides, path);
}

inline std::string config_help() {
  return "Config file: one 'key = value' per line, '#' comments. Keys and defaults:\n"
         "  model = laplace_toy          laplace_toy | probit\n"
         "  data =                       probit data file (p covariates then 0/1 response per row)\n"
         "  kernels = da, pxda, haar_pxda   any of da, pxda, pxda(a,b), haar_pxda, joint_xg\n"
         "  iterations = 100000\n"
         "  burn_in = 10% of iterations\n"
         "  thin = 1\n"
         "  seed = 42                    kernel k uses stream (seed, k): da 0, pxda 1, haar_pxda 2, joint_xg 3\n"
         "  pxda_a = 1, pxda_b = 0.5     probit PX-DA r-measure: g^2 ~ Gamma(a/2, rate b)\n"
         "                               (laplace_toy PX-DA always uses r = Exp(1))\n"
         "  output_dir = pxda_out\n"
         "  x_half_width = 25, x_panels = 25, x_nodes_per_panel = 8    spectral X grid\n"
         "  y_panels = 24, y_graded_levels = 20, y_graded_ratio = 0.5  spectral Y grid (laplace_toy)\n"
         "  grid_refine = 0              number of grid doublings for spectra\n"
         "  spectra_latent_draws = 2000  Monte Carlo latent draws per probit grid row\n"
         "Probit spectra: the X grid is centered at the posterior mode; x_half_width is replaced by the\n"
         "distance where the log posterior has dropped by 40.\n";
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunResult {
  std::vector<Trace> traces;
  nlohmann::ordered_json summary;
  std::string comparison_text;
};

namespace detail {

inline std::uint64_t stream_index(const std::vector<KernelSpec>& ks, std::size_t i) {
  long earlier = 0;
  for (std::size_t j = 0; j < i; ++j)
    if (ks[j].kind == ks[i].kind) ++earlier;
  return static_cast<std::uint64_t>(static_cast<int>(ks[i].kind) + 4 * earlier);
}

template <class M, class G, class X, class RMeasure>
std::vector<X> run_chain(const M& model, const G& action, const KernelSpec& k, const RMeasure& r, X x0, long iterations,
                         long thin, Rng rng) {
  switch (k.kind) {
    case KernelSpec::Kind::da:
      return simulate(std::move(x0), iterations, thin, [&](const X& x) { return da_step(model, x, rng); });
    case KernelSpec::Kind::pxda: {
      const QrRule<RMeasure> rule{r};
      return simulate(std::move(x0), iterations, thin, [&](const X& x) { return sandwich_step(model, action, rule, x, rng); });
    }
    case KernelSpec::Kind::haar_pxda:
      return simulate(std::move(x0), iterations, thin,
                      [&](const X& x) { return sandwich_step(model, action, HaarRule{}, x, rng); });
    case KernelSpec::Kind::joint_xg: {
      JointState<X, typename G::Element> s{std::move(x0), action.identity()};
      std::vector<X> out;
      out.reserve(static_cast<std::size_t>(iterations / thin));
      for (long it = 1; it <= iterations; ++it) {
        s = joint_xg_step(model, action, s, rng);
        if (it % thin == 0) out.push_back(s.x);
      }
      return out;
    }
  }
  return {};
}

inline std::vector<Eigen::VectorXd> as_vectors(const std::vector<double>& xs) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(Eigen::VectorXd::Constant(1, x));
  return out;
}
inline std::vector<Eigen::VectorXd> as_vectors(std::vector<Eigen::VectorXd> xs) { return xs; }

}  // namespace detail

/// Runs every configured kernel as an independent chain (in parallel) and builds the summary.
/// Writes nothing; see `write_run_outputs`.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  const long burn_rows = cfg.effective_burn_in() / cfg.thin;
  std::vector<std::string> names;
  std::vector<std::future<std::vector<Eigen::VectorXd>>> jobs;

  if (cfg.model == "laplace_toy") {
    names = {"x"};
    for (std::size_t i = 0; i < cfg.kernels.size(); ++i) {
      const KernelSpec k = cfg.kernels[i];
      const Rng rng = make_stream(cfg.seed, detail::stream_index(cfg.kernels, i));
      jobs.push_back(std::async(std::launch::async, [k, rng, &cfg] {
        const LaplaceToyModel model;
        const MultiplicativeGroup action(1);
        return detail::as_vectors(
            detail::run_chain(model, action, k, ExponentialScale{1.0}, 0.0, cfg.iterations, cfg.thin, rng));
      }));
    }
  } else {
    const auto data = read_probit_data(cfg.data);
    const auto model = std::make_shared<const ProbitModel>(data.design, data.response);
    for (int k = 0; k < model->dim_x(); ++k) names.push_back("beta" + std::to_string(k + 1));
    for (std::size_t i = 0; i < cfg.kernels.size(); ++i) {
      const KernelSpec k = cfg.kernels[i];
      const Rng rng = make_stream(cfg.seed, detail::stream_index(cfg.kernels, i));
      jobs.push_back(std::async(std::launch::async, [k, rng, model, &cfg] {
        const MultiplicativeGroup action(model->dim_y());
        return detail::run_chain(*model, action, k, GammaSquaredScale(k.a, k.b), Eigen::VectorXd::Zero(model->dim_x()).eval(),
                                 cfg.iterations, cfg.thin, rng);
      }));
    }
  }

  RunResult res;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    res.traces.push_back(make_trace(jobs[i].get(), names, cfg.kernels[i].id(), cfg.seed, burn_rows, cfg.thin));
  }

  auto& s = res.summary;
  s["version"] = kVersion;
  s["config_hash"] = cfg.hash();
  s["config"] = cfg.to_json();
  s["kernels"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.traces.size(); ++i) {
    const auto& t = res.traces[i];
    nlohmann::ordered_json kj;
    kj["id"] = t.kernel_id;
    kj["stream"] = detail::stream_index(cfg.kernels, i);
    kj["trace_file"] = "trace_" + t.kernel_id + ".csv";
    kj["kept"] = t.kept();
    kj["coordinates"] = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto series = t.coordinate(static_cast<int>(c));
      const auto v = batch_means_variance(series);
      const auto r1 = lag1_autocorrelation(series);
      kj["coordinates"].push_back({{"name", names[c]},
                                   {"posterior_mean", v.mean},
                                   {"mean_se", v.standard_error_of_mean},
                                   {"batch_means_variance", v.point},
                                   {"variance_jackknife_se", v.jackknife_se},
                                   {"lag1_autocorrelation", r1.value},
                                   {"lag1_jackknife_se", r1.jackknife_se}});
    }
    s["kernels"].push_back(kj);
  }
  s["comparisons"] = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "pxda " << kVersion << "  config " << cfg.hash() << "\n";
  if (res.traces.size() >= 2) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto table = compare_traces(res.traces, [c](const Eigen::VectorXd& v) { return v[static_cast<Eigen::Index>(c)]; },
                                        names[c]);
      s["comparisons"].push_back(nlohmann::ordered_json::parse(table.to_json().dump()));
      text << "\n" << table.to_text();
    }
  }
  s["note"] = "Geometric ergodicity is not verified; standard errors assume a Markov chain CLT.";
  res.comparison_text = text.str();
  return res;
}

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << content;
}

/// trace_<kernel>.csv per kernel, summary.json and comparison.txt under output_dir.
inline void write_run_outputs(const ExperimentConfig& cfg, const RunResult& res) {
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  for (const auto& t : res.traces) write_trace_csv(t, (dir / ("trace_" + t.kernel_id + ".csv")).string());
  write_text(dir / "summary.json", res.summary.dump(2) + "\n");
  write_text(dir / "comparison.txt", res.comparison_text);
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

/// Discretizes the configured kernels (da -> p, pxda -> p_r, haar_pxda -> p*) and certifies
/// the orderings worst to best. joint_xg has no 1-D discretization and is listed as skipped.
inline nlohmann::json spectra_certificate(const ExperimentConfig& cfg) {
  bool want[3] = {false, false, false};
  std::vector<std::string> skipped;
  for (const auto& k : cfg.kernels) {
    if (k.kind == KernelSpec::Kind::joint_xg) {
      skipped.push_back(k.id());
    } else {
      want[static_cast<int>(k.kind)] = true;
    }
  }
  std::vector<DiscretizedKernel> ks;
  nlohmann::json grid;
  nlohmann::json extra;
  if (cfg.model == "laplace_toy") {
    GridSpec xs = default_x_grid();
    xs.half_width = cfg.x_half_width;
    xs.panels = cfg.x_panels;
    xs.nodes_per_panel = cfg.x_nodes_per_panel;
    GridSpec ys = default_y_grid();
    ys.panels = cfg.y_panels;
    ys.graded_levels = cfg.y_graded_levels;
    ys.graded_ratio = cfg.y_graded_ratio;
    for (int i = 0; i < cfg.grid_refine; ++i) {
      xs = xs.doubled();
      ys = ys.doubled();
    }
    auto fam = laplace_toy_family(xs, ys);
    if (want[0]) ks.push_back(fam.p);
    if (want[1]) ks.push_back(fam.p_r);
    if (want[2]) ks.push_back(fam.p_star);
    grid = {{"x", xs.to_json()}, {"y", ys.to_json()}, {"x_nodes", fam.x_grid.size()}, {"y_nodes", fam.y_grid.size()}};
    extra["pxda_r"] = "Exp(1)";
    extra["gamma_sq_xy"] = maximal_correlation_sq(fam.joint);
  } else {
    const auto data = read_probit_data(cfg.data);
    const ProbitModel model(data.design, data.response);
    if (model.dim_x() != 1) throw ConfigError("spectra: probit needs exactly one covariate (p = 1)");
    ProbitFamilyOptions opt;
    opt.latent_draws = cfg.spectra_latent_draws;
    opt.seed = cfg.seed;
    opt.pxda_a = cfg.pxda_a;
    opt.pxda_b = cfg.pxda_b;
    opt.panels = cfg.x_panels << cfg.grid_refine;
    opt.nodes_per_panel = cfg.x_nodes_per_panel;
    for (const auto& k : cfg.kernels)
      if (k.kind == KernelSpec::Kind::pxda) {
        opt.pxda_a = k.a;
        opt.pxda_b = k.b;
      }
    auto fam = probit_family(model, opt);
    if (want[0]) ks.push_back(fam.p);
    if (want[1]) ks.push_back(fam.p_r);
    if (want[2]) ks.push_back(fam.p_star);
    grid = {{"beta", fam.spec.to_json()}, {"nodes", fam.grid.size()}};
    extra["pxda_r"] = "g^2 ~ Gamma(" + detail::format_number(opt.pxda_a / 2) + ", rate " + detail::format_number(opt.pxda_b) + ")";
    extra["latent_draws"] = opt.latent_draws;
    extra["latent_integration"] = "Monte Carlo with common random numbers; rows reversibilized against the exact posterior";
  }
  auto cert = certify_orderings(ks, default_test_functions());
  cert.grid = grid;
  cert.extra = extra;
  auto j = cert.to_json();
  j["model"] = cfg.model;
  j["skipped_kernels"] = skipped;
  j["version"] = kVersion;
  j["config_hash"] = cfg.hash();
  return j;
}

}  // namespace pxda
