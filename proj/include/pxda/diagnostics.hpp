#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace pxda {

/// Recorded chain output. Row r of `values` is the state at iteration `iterations[r]`;
/// the first `burn_in` rows are discarded by every estimator.
struct Trace {
  std::vector<std::string> coordinates;
  Eigen::MatrixXd values;
  std::vector<long> iterations;
  std::uint64_t seed = 0;
  std::string kernel_id;
  long burn_in = 0;
  long thin = 1;

  long length() const { return static_cast<long>(values.rows()); }
  long kept() const { return length() - burn_in; }

  void validate() const {
    if (values.rows() == 0) throw std::invalid_argument("trace '" + kernel_id + "' is empty");
    if (burn_in < 0 || burn_in >= length()) throw std::invalid_argument("trace '" + kernel_id + "': burn_in must be < length");
    if (thin < 1) throw std::invalid_argument("trace '" + kernel_id + "': thin must be >= 1");
    if (static_cast<Eigen::Index>(coordinates.size()) != values.cols()) {
      throw std::invalid_argument("trace '" + kernel_id + "': coordinate names do not match columns");
    }
    if (!iterations.empty() && static_cast<long>(iterations.size()) != length()) {
      throw std::invalid_argument("trace '" + kernel_id + "': iteration index has the wrong length");
    }
  }

  /// h evaluated on every post-burn-in row.
  std::vector<double> series(const std::function<double(const Eigen::VectorXd&)>& h) const {
    validate();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(kept()));
    for (long r = burn_in; r < length(); ++r) out.push_back(h(values.row(r).transpose()));
    return out;
  }

  std::vector<double> coordinate(int c) const {
    return series([c](const Eigen::VectorXd& v) { return v[c]; });
  }
};

/// Scalar trace from a sequence of chain states.
inline Trace make_trace(const std::vector<double>& xs, std::string kernel_id, std::uint64_t seed, long burn_in,
                        long thin = 1, std::string name = "x") {
  Trace t;
  t.coordinates = {std::move(name)};
  t.values = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  t.iterations.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) t.iterations[i] = static_cast<long>((i + 1) * thin);
  t.seed = seed;
  t.kernel_id = std::move(kernel_id);
  t.burn_in = burn_in;
  t.thin = thin;
  return t;
}

inline Trace make_trace(const std::vector<Eigen::VectorXd>& states, std::vector<std::string> names, std::string kernel_id,
                        std::uint64_t seed, long burn_in, long thin = 1) {
  Trace t;
  t.coordinates = std::move(names);
  const auto d = static_cast<Eigen::Index>(t.coordinates.size());
  t.values.resize(static_cast<Eigen::Index>(states.size()), d);
  t.iterations.resize(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    t.values.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
    t.iterations[i] = static_cast<long>((i + 1) * thin);
  }
  t.seed = seed;
  t.kernel_id = std::move(kernel_id);
  t.burn_in = burn_in;
  t.thin = thin;
  return t;
}

struct VarianceEstimate {
  double point = 0.0;
  long batches = 0;
  long batch_size = 0;
  double standard_error_of_mean = 0.0;
  double jackknife_se = 0.0;  // standard error of `point` itself, delete-one-batch jackknife
  double mean = 0.0;
};

namespace detail {

inline double sample_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (n - 1.0);
}

inline double jackknife_se(const std::vector<double>& leave_one_out) {
  const double b = static_cast<double>(leave_one_out.size());
  double m = 0.0;
  for (double x : leave_one_out) m += x;
  m /= b;
  double s = 0.0;
  for (double x : leave_one_out) s += (x - m) * (x - m);
  return std::sqrt((b - 1.0) / b * s);
}

}  // namespace detail

/// Batch means with floor(sqrt(n)) batches (remainder tail discarded):
/// point = batch_size * sample variance of the batch means.
inline VarianceEstimate batch_means_variance(const std::vector<double>& series) {
  const long n = static_cast<long>(series.size());
  if (n < 100) throw std::invalid_argument("batch_means_variance: need at least 100 post-burn-in values");
  const long batches = static_cast<long>(std::floor(std::sqrt(static_cast<double>(n))));
  if (batches < 10) throw std::invalid_argument("batch_means_variance: fewer than 10 batches");
  const long size = n / batches;
  std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
  for (long b = 0; b < batches; ++b) {
    double s = 0.0;
    for (long i = b * size; i < (b + 1) * size; ++i) s += series[static_cast<std::size_t>(i)];
    means[static_cast<std::size_t>(b)] = s / size;
  }
  VarianceEstimate est;
  est.batches = batches;
  est.batch_size = size;
  double total = 0.0;
  for (double m : means) total += m;
  est.mean = total / batches;
  est.point = size * detail::sample_variance(means);
  est.standard_error_of_mean = std::sqrt(est.point / static_cast<double>(batches * size));
  std::vector<double> loo(static_cast<std::size_t>(batches));
  for (long b = 0; b < batches; ++b) {
    std::vector<double> rest;
    rest.reserve(static_cast<std::size_t>(batches - 1));
    for (long c = 0; c < batches; ++c)
      if (c != b) rest.push_back(means[static_cast<std::size_t>(c)]);
    loo[static_cast<std::size_t>(b)] = size * detail::sample_variance(rest);
  }
  est.jackknife_se = detail::jackknife_se(loo);
  return est;
}

inline VarianceEstimate batch_means_variance(const Trace& trace, const std::function<double(const Eigen::VectorXd&)>& h) {
  return batch_means_variance(trace.series(h));
}

/// Biased (divide-by-n) autocovariances at lags 0..max_lag of the centered series.
inline std::vector<double> autocovariance(const std::vector<double>& series, long max_lag) {
  const long n = static_cast<long>(series.size());
  if (max_lag < 0 || max_lag * 10 >= n) throw std::invalid_argument("autocovariance: max_lag must be < n / 10");
  double m = 0.0;
  for (double x : series) m += x;
  m /= static_cast<double>(n);
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (long k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (long t = 0; t + k < n; ++t) s += (series[static_cast<std::size_t>(t)] - m) * (series[static_cast<std::size_t>(t + k)] - m);
    out[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
  }
  return out;
}

inline std::vector<double> autocovariance(const Trace& trace, const std::function<double(const Eigen::VectorXd&)>& h,
                                          long max_lag) {
  return autocovariance(trace.series(h), max_lag);
}

struct Autocorrelation {
  double value = 0.0;
  double jackknife_se = 0.0;
};

/// Lag-1 autocorrelation with a delete-one-batch jackknife standard error (same batches as batch means).
inline Autocorrelation lag1_autocorrelation(const std::vector<double>& series) {
  const long n = static_cast<long>(series.size());
  if (n < 100) throw std::invalid_argument("lag1_autocorrelation: need at least 100 values");
  double m = 0.0;
  for (double x : series) m += x;
  m /= static_cast<double>(n);
  const long batches = static_cast<long>(std::floor(std::sqrt(static_cast<double>(n))));
  const long size = n / batches;
  std::vector<double> c0(static_cast<std::size_t>(batches), 0.0);
  std::vector<double> c1(static_cast<std::size_t>(batches), 0.0);
  for (long t = 0; t < batches * size; ++t) {
    const auto b = static_cast<std::size_t>(t / size);
    const double d = series[static_cast<std::size_t>(t)] - m;
    c0[b] += d * d;
    if (t + 1 < n) c1[b] += d * (series[static_cast<std::size_t>(t + 1)] - m);
  }
  double s0 = 0.0, s1 = 0.0;
  for (long b = 0; b < batches; ++b) {
    s0 += c0[static_cast<std::size_t>(b)];
    s1 += c1[static_cast<std::size_t>(b)];
  }
  Autocorrelation out;
  if (!(s0 > 0.0)) return out;
  out.value = s1 / s0;
  std::vector<double> loo(static_cast<std::size_t>(batches));
  for (long b = 0; b < batches; ++b) {
    loo[static_cast<std::size_t>(b)] = (s1 - c1[static_cast<std::size_t>(b)]) / (s0 - c0[static_cast<std::size_t>(b)]);
  }
  out.jackknife_se = detail::jackknife_se(loo);
  return out;
}

struct ComparisonRow {
  std::string kernel_id;
  long kept = 0;
  VarianceEstimate variance;
  Autocorrelation lag1;
};

struct OrderingFlag {
  std::string quantity;  // "variance" or "lag1"
  std::string lower;
  std::string higher;
  double difference = 0.0;
  double combined_se = 0.0;
  bool significant = false;  // |difference| > 3 combined standard errors
};

struct ComparisonTable {
  std::string function_name;
  std::vector<ComparisonRow> rows;
  std::vector<OrderingFlag> flags;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["function"] = function_name;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"kernel", r.kernel_id},
                           {"kept", r.kept},
                           {"mean", r.variance.mean},
                           {"mean_se", r.variance.standard_error_of_mean},
                           {"batch_means_variance", r.variance.point},
                           {"variance_jackknife_se", r.variance.jackknife_se},
                           {"batches", r.variance.batches},
                           {"batch_size", r.variance.batch_size},
                           {"lag1_autocorrelation", r.lag1.value},
                           {"lag1_jackknife_se", r.lag1.jackknife_se}});
    }
    j["orderings"] = nlohmann::json::array();
    for (const auto& f : flags) {
      j["orderings"].push_back({{"quantity", f.quantity},
                                {"lower", f.lower},
                                {"higher", f.higher},
                                {"difference", f.difference},
                                {"combined_se", f.combined_se},
                                {"significant_at_3se", f.significant}});
    }
    j["note"] =
        "Batch-means standard errors assume a Markov chain CLT; geometric ergodicity of these chains is not verified. "
        "Orderings not flagged significant are within noise and support no conclusion.";
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "function: " << function_name << "\n";
    os << std::left << std::setw(14) << "kernel" << std::right << std::setw(10) << "kept" << std::setw(14) << "mean"
       << std::setw(12) << "mean_se" << std::setw(14) << "bm_var" << std::setw(12) << "var_se" << std::setw(10)
       << "lag1" << std::setw(10) << "lag1_se" << "\n";
    os << std::setprecision(5);
    for (const auto& r : rows) {
      os << std::left << std::setw(14) << r.kernel_id << std::right << std::setw(10) << r.kept << std::setw(14)
         << r.variance.mean << std::setw(12) << r.variance.standard_error_of_mean << std::setw(14) << r.variance.point
         << std::setw(12) << r.variance.jackknife_se << std::setw(10) << r.lag1.value << std::setw(10)
         << r.lag1.jackknife_se << "\n";
    }
    for (const auto& f : flags) {
      os << f.quantity << ": " << f.lower << " < " << f.higher << "  diff " << f.difference << "  3se "
         << 3.0 * f.combined_se << (f.significant ? "  significant" : "  within noise") << "\n";
    }
    os << "note: geometric ergodicity is not verified; batch-means errors assume a CLT\n";
    return os.str();
  }
};

/// Per-kernel batch-means variance and lag-1 autocorrelation of h with jackknife standard errors,
/// plus every pairwise ordering, flagged only when it clears 3 combined standard errors.
inline ComparisonTable compare_traces(const std::vector<Trace>& traces,
                                      const std::function<double(const Eigen::VectorXd&)>& h,
                                      std::string function_name = "h") {
  if (traces.size() < 2) throw std::invalid_argument("compare_traces: need at least two traces");
  ComparisonTable table;
  table.function_name = std::move(function_name);
  for (const auto& t : traces) {
    const auto s = t.series(h);
    table.rows.push_back({t.kernel_id, t.kept(), batch_means_variance(s), lag1_autocorrelation(s)});
  }
  for (std::size_t a = 0; a < table.rows.size(); ++a) {
    for (std::size_t b = a + 1; b < table.rows.size(); ++b) {
      const auto& ra = table.rows[a];
      const auto& rb = table.rows[b];
      auto flag = [&](const char* what, double va, double sa, double vb, double sb) {
        OrderingFlag f;
        f.quantity = what;
        const bool a_lower = va <= vb;
        f.lower = a_lower ? ra.kernel_id : rb.kernel_id;
        f.higher = a_lower ? rb.kernel_id : ra.kernel_id;
        f.difference = std::abs(va - vb);
        f.combined_se = std::sqrt(sa * sa + sb * sb);
        f.significant = f.difference > 3.0 * f.combined_se;
        table.flags.push_back(f);
      };
      flag("variance", ra.variance.point, ra.variance.jackknife_se, rb.variance.point, rb.variance.jackknife_se);
      flag("lag1", ra.lag1.value, ra.lag1.jackknife_se, rb.lag1.value, rb.lag1.jackknife_se);
    }
  }
  return table;
}

/// sup |F_n - F| against a continuous CDF.
inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// sup |F_n - G_m| between two samples.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Header `iter,<coordinates>`, one row per post-burn-in kept iterate; doubles at round-trip precision.
inline void write_trace_csv(const Trace& trace, std::ostream& os) {
  trace.validate();
  os << "iter";
  for (const auto& c : trace.coordinates) os << "," << c;
  os << "\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (long r = trace.burn_in; r < trace.length(); ++r) {
    os << (trace.iterations.empty() ? (r + 1) * trace.thin : trace.iterations[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < trace.values.cols(); ++c) os << "," << trace.values(r, c);
    os << "\n";
  }
}

inline void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace_csv(trace, os);
}

/// Reads a file written by write_trace_csv; the result has burn_in = 0.
inline Trace read_trace_csv(std::istream& is, std::string kernel_id = {}) {
  Trace t;
  t.kernel_id = std::move(kernel_id);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trace csv: missing header");
  std::stringstream hs(line);
  std::string cell;
  std::getline(hs, cell, ',');
  if (cell != "iter") throw std::runtime_error("trace csv: header must start with 'iter'");
  while (std::getline(hs, cell, ',')) t.coordinates.push_back(cell);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::getline(ls, cell, ',');
    t.iterations.push_back(std::stol(cell));
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.coordinates.size()) throw std::runtime_error("trace csv: ragged row");
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.coordinates.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  if (t.iterations.size() >= 2) t.thin = t.iterations[1] - t.iterations[0];
  return t;
}

}  // namespace pxda
