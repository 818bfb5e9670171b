#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pxda/diagnostics.hpp"
#include "pxda/kernels.hpp"
#include "pxda/spectra.hpp"

using namespace pxda;

namespace {

const LaplaceToyModel kToy;
const MultiplicativeGroup kLine(1);

std::vector<double> iid_normal(long n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = std_normal(rng);
  return xs;
}

std::vector<double> ar1(long n, double phi, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  std::vector<double> xs(static_cast<std::size_t>(n));
  double x = std_normal(rng) / std::sqrt(1.0 - phi * phi);
  for (auto& v : xs) {
    x = phi * x + std_normal(rng);
    v = x;
  }
  return xs;
}

double exact_fx_draw(Rng& rng) { return kToy.sample_x_given_y(kToy.sample_fy(rng), rng); }

}  // namespace

TEST(BatchMeans, IidNormalGivesUnitVariance) {
  const auto est = batch_means_variance(iid_normal(1000000, 1));
  EXPECT_GE(est.point, 0.95);
  EXPECT_LE(est.point, 1.05);
  EXPECT_EQ(est.batches, 1000);
  EXPECT_EQ(est.batch_size, 1000);
  EXPECT_NEAR(est.standard_error_of_mean, 1e-3, 1e-4);
}

TEST(BatchMeans, Ar1MatchesClosedForm) {
  const double phi = 0.5;
  const double oracle = (1.0 + phi) / (1.0 - phi) / (1.0 - phi * phi);
  const auto est = batch_means_variance(ar1(1000000, phi, 2));
  EXPECT_NEAR(est.point, oracle, 0.1 * oracle);
  EXPECT_GT(est.jackknife_se, 0.0);
  EXPECT_LT(est.jackknife_se, 0.1 * oracle);
}

// With floor(sqrt(n)) batches the estimate has relative sd about sqrt(2 / sqrt(n)); check the
// replicate average instead of one draw.
TEST(BatchMeans, ReplicateAverageIsUnbiased) {
  const int reps = 40;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double v = batch_means_variance(ar1(100000, 0.5, 1000 + r)).point;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / (reps - 1));
  EXPECT_NEAR(mean, 4.0, 3.0 * se + 0.05);
}

TEST(BatchMeans, ConstantSeriesIsZero) {
  const auto est = batch_means_variance(std::vector<double>(5000, 2.5));
  EXPECT_EQ(est.point, 0.0);
  EXPECT_EQ(est.jackknife_se, 0.0);
}

TEST(BatchMeans, RemainderTailIsDiscarded) {
  std::vector<double> xs = iid_normal(130, 5);  // 11 batches of 11, last 9 values unused
  const auto a = batch_means_variance(xs);
  EXPECT_EQ(a.batches, 11);
  EXPECT_EQ(a.batch_size, 11);
  xs[125] = 1e6;
  EXPECT_DOUBLE_EQ(batch_means_variance(xs).point, a.point);
}

TEST(BatchMeans, ShortSeriesThrows) {
  EXPECT_THROW(batch_means_variance(std::vector<double>(99, 0.0)), std::invalid_argument);
  const Trace t = make_trace(std::vector<double>(150, 0.0), "da", 1, 60);
  EXPECT_THROW(batch_means_variance(t, [](const Eigen::VectorXd& v) { return v[0]; }), std::invalid_argument);
}

TEST(TraceType, ValidatesInvariants) {
  EXPECT_THROW(make_trace(std::vector<double>{}, "da", 1, 0).validate(), std::invalid_argument);
  EXPECT_THROW(make_trace(std::vector<double>(10, 0.0), "da", 1, 10).validate(), std::invalid_argument);
  EXPECT_NO_THROW(make_trace(std::vector<double>(10, 0.0), "da", 1, 9).validate());
  const auto t = make_trace(std::vector<double>{1, 2, 3, 4}, "da", 1, 1, 5);
  EXPECT_EQ(t.coordinate(0), (std::vector<double>{2, 3, 4}));
  EXPECT_EQ(t.iterations.back(), 20);
}

TEST(Autocovariance, IidLagsNearZero) {
  const long n = 200000;
  const auto ac = autocovariance(iid_normal(n, 8), 10);
  EXPECT_NEAR(ac[0], 1.0, 0.02);
  for (std::size_t k = 1; k < ac.size(); ++k) EXPECT_LT(std::abs(ac[k]), 4.0 / std::sqrt(double(n))) << k;
}

TEST(Autocovariance, AlternatingSeries) {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i % 2 ? 1.0 : -1.0;
  const auto ac = autocovariance(xs, 2);
  EXPECT_NEAR(ac[0], 1.0, 1e-12);
  EXPECT_NEAR(ac[1], -1.0, 2e-3);
  EXPECT_NEAR(ac[2], 1.0, 3e-3);
  EXPECT_NEAR(lag1_autocorrelation(xs).value, -1.0, 2e-3);
}

TEST(Autocovariance, MaxLagPrecondition) {
  EXPECT_THROW(autocovariance(std::vector<double>(100, 0.0), 10), std::invalid_argument);
  EXPECT_NO_THROW(autocovariance(std::vector<double>(100, 0.0), 9));
}

TEST(Autocovariance, DaLagOneIsVarianceOfConditionalMean) {
  // Var[E(X | Y)] by nested Simpson quadrature.
  auto cond_mean = [](double y) {
    return oracle::simpson([y](double x) { return x * oracle::phi(x - y); }, y - 12.0, y + 12.0, 400);
  };
  auto fy = [](double y) { return 0.5 * std::exp(-std::abs(y)); };
  const double m1 = oracle::simpson([&](double y) { return cond_mean(y) * fy(y); }, -45.0, 0.0, 3000) +
                    oracle::simpson([&](double y) { return cond_mean(y) * fy(y); }, 0.0, 45.0, 3000);
  const double m2 = oracle::simpson([&](double y) { return cond_mean(y) * cond_mean(y) * fy(y); }, -45.0, 0.0, 3000) +
                    oracle::simpson([&](double y) { return cond_mean(y) * cond_mean(y) * fy(y); }, 0.0, 45.0, 3000);
  const double oracle_value = m2 - m1 * m1;

  Rng rng = make_stream(21, 0);
  const long n = 400000;
  const auto xs = simulate(exact_fx_draw(rng), n, 1, [&](double x) { return da_step(kToy, x, rng); });
  const double lag1 = autocovariance(xs, 1)[1];

  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= double(n);
  std::vector<double> prod(xs.size() - 1);
  for (std::size_t t = 0; t + 1 < xs.size(); ++t) prod[t] = (xs[t] - mean) * (xs[t + 1] - mean);
  const double se = std::sqrt(batch_means_variance(prod).point / double(prod.size()));
  EXPECT_LT(std::abs(lag1 - oracle_value), 4.0 * se) << lag1 << " vs " << oracle_value << " se " << se;
}

TEST(BatchMeans, TwoStateChainMatchesExactVariance) {
  const double a = 0.3, b = 0.2;
  DiscretizedKernel k;
  k.id = "two_state";
  k.grid = Eigen::Vector2d(0.0, 1.0);
  k.weights = Eigen::Vector2d(b / (a + b), a / (a + b));
  k.matrix.resize(2, 2);
  k.matrix << 1.0 - a, a, b, 1.0 - b;
  const Eigen::VectorXd h = Eigen::Vector2d(0.0, 1.0);
  const double exact = exact_asymptotic_variance(k, h);
  const double closed = k.weights[0] * k.weights[1] * (2.0 - a - b) / (a + b);
  EXPECT_NEAR(exact, closed, 1e-12);

  Rng rng = make_stream(99, 0);
  int s = uniform01(rng) < k.weights[1] ? 1 : 0;
  std::vector<double> xs(1000000);
  for (auto& v : xs) {
    const double u = uniform01(rng);
    s = s == 0 ? (u < a ? 1 : 0) : (u < b ? 0 : 1);
    v = h[s];
  }
  EXPECT_NEAR(batch_means_variance(xs).point, exact, 0.1 * exact);
}

TEST(Lag1, Ar1AutocorrelationWithJackknife) {
  const auto r = lag1_autocorrelation(ar1(400000, 0.5, 17));
  EXPECT_NEAR(r.value, 0.5, 4.0 * r.jackknife_se + 1e-3);
  EXPECT_GT(r.jackknife_se, 1e-4);
  EXPECT_LT(r.jackknife_se, 1e-2);
}

TEST(CompareTraces, SameKernelAndSeedGiveIdenticalRows) {
  auto run = [] {
    Rng rng = make_stream(5, 0);
    return simulate(0.0, 20000, 1, [&](double x) { return da_step(kToy, x, rng); });
  };
  const auto t1 = make_trace(run(), "da", 5, 2000);
  const auto t2 = make_trace(run(), "da", 5, 2000);
  const auto h = [](const Eigen::VectorXd& v) { return v[0]; };
  const auto table = compare_traces({t1, t2}, h, "x");
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].variance.point, table.rows[1].variance.point);
  EXPECT_EQ(table.rows[0].lag1.value, table.rows[1].lag1.value);
  for (const auto& f : table.flags) EXPECT_FALSE(f.significant);
  EXPECT_EQ(table.to_text(), compare_traces({t1, t2}, h, "x").to_text());
  EXPECT_NE(table.to_json().dump().find("geometric ergodicity"), std::string::npos);
}

TEST(CompareTraces, IidReferenceIsTheFloor) {
  const long n = 200000;
  Rng r0 = make_stream(31, 0), r1 = make_stream(31, 1), r2 = make_stream(31, 2);
  std::vector<double> iid(static_cast<std::size_t>(n));
  for (auto& x : iid) x = exact_fx_draw(r0);
  const auto da = simulate(exact_fx_draw(r1), n, 1, [&](double x) { return da_step(kToy, x, r1); });
  const auto haar =
      simulate(exact_fx_draw(r2), n, 1, [&](double x) { return sandwich_step(kToy, kLine, HaarRule{}, x, r2); });
  const auto h = [](const Eigen::VectorXd& v) { return v[0]; };
  const auto table =
      compare_traces({make_trace(da, "da", 31, 0), make_trace(haar, "haar_pxda", 31, 0), make_trace(iid, "iid", 31, 0)},
                     h, "x");
  // Var_pi(X) = Var(Y) + 1 = 3 for the i.i.d. chain.
  const auto& iid_row = table.rows[2];
  EXPECT_NEAR(iid_row.variance.point, 3.0, 4.0 * iid_row.variance.jackknife_se);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& r = table.rows[i];
    const double se = std::hypot(r.variance.jackknife_se, iid_row.variance.jackknife_se);
    EXPECT_LE(iid_row.variance.point, r.variance.point + 3.0 * se) << r.kernel_id;
  }
  // DA versus Haar on x is a large gap (about 16.4 vs 6.2) and should be flagged.
  bool flagged = false;
  for (const auto& f : table.flags)
    if (f.quantity == "variance" && f.lower == "haar_pxda" && f.higher == "da") flagged = f.significant;
  EXPECT_TRUE(flagged);
}

TEST(CompareTraces, NeedsTwoTraces) {
  const auto t = make_trace(std::vector<double>(200, 1.0), "da", 1, 0);
  EXPECT_THROW(compare_traces({t}, [](const Eigen::VectorXd& v) { return v[0]; }), std::invalid_argument);
}

TEST(Ks, MatchesOracle) {
  Rng rng = make_stream(4, 0);
  std::vector<double> a(5000), b(3000);
  for (auto& x : a) x = std_normal(rng);
  for (auto& x : b) x = 0.1 + std_normal(rng);
  EXPECT_NEAR(ks_one_sample(a, oracle::Phi), oracle::ks_statistic(a, oracle::Phi), 1e-15);
  EXPECT_NEAR(ks_two_sample(a, b), oracle::ks_two_sample(a, b), 1e-15);
  EXPECT_LT(ks_one_sample(a, oracle::Phi), 1.63 / std::sqrt(5000.0));
}

TEST(Csv, RoundTripIsExact) {
  Rng rng = make_stream(6, 0);
  std::vector<Eigen::VectorXd> states;
  for (int i = 0; i < 50; ++i) states.push_back(Eigen::Vector2d(std_normal(rng), 1e-300 * std_normal(rng)));
  const auto t = make_trace(states, {"beta1", "beta2"}, "haar_pxda", 6, 5, 3);
  std::stringstream ss;
  write_trace_csv(t, ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "iter,beta1,beta2");
  const auto back = read_trace_csv(ss);
  ASSERT_EQ(back.length(), 45);
  EXPECT_EQ(back.iterations.front(), 18);
  EXPECT_EQ(back.thin, 3);
  for (long r = 0; r < back.length(); ++r)
    for (int c = 0; c < 2; ++c) EXPECT_EQ(back.values(r, c), t.values(r + 5, c));
}
