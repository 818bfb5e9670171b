#include <cmath>
#include <random>

#include <Eigen/Core>
#include <gtest/gtest.h>

#include "pxda/group_action.hpp"

using namespace pxda;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(MultiplicativeGroup, ComposeAndInverse) {
  const MultiplicativeGroup grp(1);
  EXPECT_DOUBLE_EQ(grp.compose({2.0}, {3.0}).value, 6.0);
  EXPECT_EQ(grp.compose({2.5}, grp.identity()).value, 2.5);
  EXPECT_NEAR(grp.compose({4.0}, grp.inverse({4.0})).value, 1.0, 1e-12);
}

TEST(MultiplicativeGroup, GroupAxiomsOnRandomTriples) {
  const MultiplicativeGroup grp(2);
  Rng rng = make_stream(11, 0);
  std::lognormal_distribution<double> ld(0.0, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const Scale a{ld(rng)}, b{ld(rng)}, c{ld(rng)};
    EXPECT_LT(rel_err(grp.compose(a, grp.inverse(a)).value, 1.0), 1e-12);
    EXPECT_LT(rel_err(grp.compose(grp.compose(a, b), c).value, grp.compose(a, grp.compose(b, c)).value), 1e-12);
  }
}

TEST(MultiplicativeGroup, ActionAxioms) {
  const MultiplicativeGroup grp(1);
  Rng rng = make_stream(12, 0);
  std::lognormal_distribution<double> ld(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double y = nd(rng);
    const Scale g1{ld(rng)}, g2{ld(rng)};
    EXPECT_EQ(grp.act(grp.identity(), y), y);
    EXPECT_LT(std::abs(grp.act(grp.compose(g1, g2), y) - grp.act(g1, grp.act(g2, y))), 1e-12 * (1.0 + std::abs(y)));
  }
}

TEST(MultiplicativeGroup, JFunction) {
  const MultiplicativeGroup grp3(3);
  EXPECT_DOUBLE_EQ(j_eval(grp3, Scale{2.0}, 0.7), 8.0);
  EXPECT_DOUBLE_EQ(j_eval(grp3, grp3.identity(), -1.3), 1.0);
  EXPECT_DOUBLE_EQ(grp3.delta(grp3.identity()), 1.0);
  EXPECT_THROW(j_eval(grp3, Scale{1e200}, 1.0), DomainError);
}

TEST(MultiplicativeGroup, JAxiomBattery) {
  const MultiplicativeGroup grp(4);
  Rng rng = make_stream(13, 0);
  std::lognormal_distribution<double> ld(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const Scale g1{ld(rng)}, g2{ld(rng)};
    const Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(4, [&]() { return nd(rng); });
    const double lhs = j_eval(grp, grp.compose(g1, g2), y);
    const double rhs = j_eval(grp, g1, grp.act(g2, y)) * j_eval(grp, g2, y);
    EXPECT_LT(rel_err(lhs, rhs), 1e-10);
    EXPECT_LT(std::abs(j_eval(grp, grp.inverse(g1), y) * j_eval(grp, g1, y) - 1.0), 1e-10);
    EXPECT_EQ(grp.delta(g1), 1.0);
  }
}

TEST(MultiplicativeGroup, RelativeInvariance) {
  const MultiplicativeGroup grp(1);
  auto phi = [](double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi); };
  auto laplace = [](double y) { return 0.5 * std::exp(-std::abs(y)); };
  EXPECT_LT(check_relative_invariance(grp, phi, Scale{2.0}), 1e-8);
  EXPECT_LT(check_relative_invariance(grp, phi, grp.identity()), 1e-10);
  EXPECT_LT(check_relative_invariance(grp, laplace, Scale{0.5}), 1e-8);
}

TEST(MultiplicativeGroup, RelativeInvarianceSignalsNonConvergence) {
  const MultiplicativeGroup grp(1);
  auto heavy = [](double y) { return 1.0 / (1.0 + std::abs(y)); };
  EXPECT_THROW(check_relative_invariance(grp, heavy, Scale{2.0}), QuadratureError);
}

TEST(MultiplicativeGroup, LeftHaarInvariance) {
  // int h(gt g) dg/g = int h(g) dg/g; h a log-normal-shaped bump on the group.
  const MultiplicativeGroup grp(1);
  auto h = [](Scale g) { return std::exp(-0.5 * std::pow(std::log(g.value) - 0.3, 2)); };
  auto haar_integral = [&](Scale shift) {
    return grp.integrate([&](Scale g) { return h(grp.compose(shift, g)) * std::exp(grp.haar_log_density(g)); });
  };
  const double base = haar_integral(grp.identity());
  EXPECT_LT(std::abs(base - std::sqrt(2.0 * std::numbers::pi)), 1e-8);
  for (double s : {0.1, 0.7, 3.0, 25.0}) EXPECT_LT(std::abs(haar_integral(Scale{s}) - base), 1e-8);
}

TEST(MultiplicativeGroup, SamplerMatchesGammaLaw) {
  // density g exp(-2 g) on (0, inf): Gamma(2, 2), mean 1, variance 1/2
  const MultiplicativeGroup grp(1);
  Rng rng = make_stream(14, 0);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = grp.sample([](Scale g) { return std::log(g.value) - 2.0 * g.value; }, rng).value;
    s += g;
    s2 += g * g;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 1.0, 4.0 * std::sqrt(0.5 / n));
  EXPECT_NEAR(var, 0.5, 0.02);
}

TEST(MultiplicativeGroup, SamplerSignalsNullSet) {
  const MultiplicativeGroup grp(1);
  Rng rng = make_stream(15, 0);
  // dg/g itself is not normalizable
  EXPECT_THROW(grp.sample([](Scale g) { return -std::log(g.value); }, rng), NullSetError);
}

TEST(TrivialGroup, Basics) {
  const TrivialGroup grp(2);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 0.4);
  EXPECT_EQ(grp.act(grp.identity(), y), y);
  EXPECT_EQ(j_eval(grp, Unit{}, y), 1.0);
  static_assert(GroupAction<TrivialGroup, Eigen::VectorXd>);
  static_assert(GroupAction<MultiplicativeGroup, double>);
}
