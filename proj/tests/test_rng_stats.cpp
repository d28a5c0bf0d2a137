#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "hom/ensemble.hpp"
#include "hom/rng.hpp"
#include "hom/stats.hpp"

namespace hom {
namespace {

// Jacobi-theta form of the Kolmogorov CDF, an independent series.
double kolmogorov_cdf_theta(double x) {
  double s = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double m = (2.0 * k - 1.0) * std::numbers::pi;
    s += std::exp(-m * m / (8.0 * x * x));
  }
  return std::sqrt(2.0 * std::numbers::pi) / x * s;
}

TEST(Rng, SameStreamSameSequence) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, StreamsDiffer) {
  std::set<double> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(RngStream(1, i).uniform());
  EXPECT_EQ(firsts.size(), 1000u);
  EXPECT_NE(RngStream(1, 0).uniform(), RngStream(2, 0).uniform());
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
}

TEST(Rng, UnitInterval) {
  RngStream r(3, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Ensemble, ParallelMatchesSerial) {
  const auto fn = [](RngStream& r) { return r.uniform() + r.uniform(); };
  const auto s = run_ensemble_serial(5000, 9, fn);
  for (int threads : {1, 2, 3, 8}) EXPECT_EQ(run_ensemble_parallel(5000, 9, fn, threads), s);
}

TEST(Ensemble, ExceptionsPropagate) {
  const auto fn = [](RngStream& r) -> double {
    if (r.stream_index() == 17) throw std::runtime_error("boom");
    return 0.0;
  };
  EXPECT_THROW(run_ensemble_parallel(100, 1, fn, 2), std::runtime_error);
}

TEST(Stats, BinomialStderr) {
  EXPECT_DOUBLE_EQ(stats::binomial_stderr(0.5, 100), 0.05);
  EXPECT_EQ(stats::binomial_stderr(1.0, 10), 0.0);
}

TEST(Stats, MeanStderr) {
  const std::vector<double> xs = {1, 2, 3, 4};
  const auto m = stats::mean_stderr(xs);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.stderr_, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(stats::mean_stderr(std::vector<double>{7}).stderr_, 0.0);
}

TEST(Stats, KolmogorovSeriesAgree) {
  for (double x : {0.4, 0.6, 0.8, 1.0, 1.2, 1.63, 2.0}) {
    EXPECT_NEAR(stats::kolmogorov_q(x), 1.0 - kolmogorov_cdf_theta(x), 1e-12) << x;
  }
  // Classical 1% critical value.
  EXPECT_NEAR(stats::kolmogorov_q(1.6276), 0.01, 1e-4);
}

TEST(Stats, KsOneSampleAcceptsAndRejects) {
  std::vector<double> uniform, skewed;
  RngStream r(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const double u = r.uniform();
    uniform.push_back(u);
    skewed.push_back(u * u);
  }
  const auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_GT(stats::ks_one_sample(uniform, cdf).p_value, 0.01);
  EXPECT_LT(stats::ks_one_sample(skewed, cdf).p_value, 1e-6);
}

TEST(Stats, KsStatisticByHand) {
  // Samples 0.1, 0.5, 0.9 against U(0,1): D = max(1/3 - 0.1, 0.5 - 1/3, ...) = 0.2333..
  const auto r = stats::ks_one_sample({0.9, 0.1, 0.5}, [](double x) { return x; });
  EXPECT_NEAR(r.statistic, 1.0 / 3.0 - 0.1, 1e-15);
}

TEST(Stats, KsTwoSample) {
  std::vector<double> a, b, c;
  RngStream r(6, 0);
  for (int i = 0; i < 4000; ++i) {
    a.push_back(r.uniform());
    b.push_back(r.uniform());
    c.push_back(0.1 + r.uniform());
  }
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(stats::ks_two_sample(a, c).p_value, 1e-6);
  EXPECT_NEAR(stats::ks_two_sample({1, 2, 3}, {4, 5, 6}).statistic, 1.0, 1e-15);
}

TEST(Stats, FitThroughOrigin) {
  const std::vector<double> x = {1, 2, 3}, y = {2, 4, 6};
  const auto f = stats::fit_through_origin(x, y);
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_DOUBLE_EQ(f.r_squared, 1.0);
  const std::vector<double> y2 = {2, 4.5, 5.5};
  EXPECT_LT(stats::fit_through_origin(x, y2).r_squared, 1.0);
}

}  // namespace
}  // namespace hom
