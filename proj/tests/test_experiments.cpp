#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hom/analytic.hpp"
#include "hom/experiments.hpp"

namespace hom {
namespace {

std::size_t idx(IonLevel i1, IonLevel i2) { return flatten({i1, i2, 0, 0}, 1); }

StateVector ion_state(double ba, double ab) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(36);
  v(idx(IonLevel::kB, IonLevel::kA)) = ba;
  v(idx(IonLevel::kA, IonLevel::kB)) = ab;
  return StateVector(v, protocol_dims(1));
}

TrajectorySummary success(std::uint64_t i, double fidelity = 1.0) {
  return {i, Outcome::kOneClick, ChannelTag::kD1, std::nullopt, fidelity};
}

TrajectorySummary failure(std::uint64_t i) { return {i, Outcome::kNoClick, std::nullopt, std::nullopt, 0.0}; }

TEST(Fidelity, TargetOverlaps) {
  const double s = 1 / std::sqrt(2.0);
  EXPECT_NEAR(fidelity_to_target(ion_state(s, s), ChannelTag::kD1), 1.0, 1e-15);
  EXPECT_NEAR(fidelity_to_target(ion_state(1, 0), ChannelTag::kD1), 0.5, 1e-15);
  EXPECT_NEAR(fidelity_to_target(ion_state(s, -s), ChannelTag::kD1), 0.0, 1e-15);
  EXPECT_NEAR(fidelity_to_target(ion_state(s, -s), ChannelTag::kD2), 1.0, 1e-15);
  EXPECT_THROW(fidelity_to_target(ion_state(s, s), ChannelTag::kLostD1), std::invalid_argument);
}

TEST(Aggregate, AllSuccess) {
  std::vector<TrajectorySummary> recs;
  for (std::uint64_t i = 0; i < 10; ++i) recs.push_back(success(i));
  const auto pt = aggregate(recs);
  EXPECT_EQ(pt.p_hat, 1.0);
  EXPECT_EQ(pt.p_stderr, 0.0);
  EXPECT_EQ(pt.F_hat, 1.0);
  EXPECT_FALSE(pt.Ps_hat.has_value());
}

TEST(Aggregate, HalfAndHalf) {
  std::vector<TrajectorySummary> recs;
  const std::size_t n = 400;
  for (std::uint64_t i = 0; i < n; ++i) recs.push_back(i % 2 ? success(i, 0.9) : failure(i));
  const auto pt = aggregate(recs);
  EXPECT_EQ(pt.p_hat, 0.5);
  EXPECT_DOUBLE_EQ(pt.p_stderr, 0.5 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(pt.F_hat, 0.9, 1e-14);
}

TEST(Aggregate, OrderIndependent) {
  std::vector<TrajectorySummary> recs;
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u;
  for (std::uint64_t i = 0; i < 500; ++i) recs.push_back(u(rng) < 0.3 ? success(i, u(rng)) : failure(i));
  const auto a = aggregate(recs);
  std::shuffle(recs.begin(), recs.end(), rng);
  const auto b = aggregate(recs);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.F_hat, b.F_hat);  // bit-identical: reduction order is by stream index
  EXPECT_EQ(a.F_stderr, b.F_stderr);
}

TEST(Aggregate, NoHeraldsGivesNan) {
  const auto pt = aggregate({failure(0), failure(1)});
  EXPECT_EQ(pt.p_hat, 0.0);
  EXPECT_TRUE(std::isnan(pt.F_hat));
  EXPECT_THROW(aggregate({}), std::invalid_argument);
}

TEST(Aggregate, SecondStageCounts) {
  std::vector<TrajectorySummary> recs = {
      {0, Outcome::kTwoClicks, ChannelTag::kD1, ChannelTag::kD1, 1.0},
      {1, Outcome::kTwoClicks, ChannelTag::kD2, ChannelTag::kD2, 1.0},
      {2, Outcome::kTwoClicks, ChannelTag::kD1, ChannelTag::kD2, 1.0},
      {3, Outcome::kOneClick, ChannelTag::kD2, std::nullopt, 1.0},
      {4, Outcome::kNoClick, std::nullopt, std::nullopt, 0.0},
  };
  const auto pt = aggregate(recs, true);
  EXPECT_EQ(pt.n_two_clicks, 3u);
  EXPECT_DOUBLE_EQ(*pt.Ps_hat, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*pt.two_click_fraction, 0.75);
  EXPECT_EQ(pt.d1_then_d2, 1u);
}

TEST(Grid, Defaults) {
  EXPECT_EQ(default_grid(SweptParam::kEta).size(), 6u);
  EXPECT_EQ(default_grid(SweptParam::kLambda), (std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5}));
  EXPECT_EQ(default_grid(SweptParam::kGamma), (std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.4, 0.5}));
  const auto phi = default_grid(SweptParam::kPhi);
  ASSERT_EQ(phi.size(), 13u);
  EXPECT_NEAR(phi.back(), 2 * std::numbers::pi, 1e-15);
}

TEST(Grid, WithValue) {
  const SystemParams p;
  EXPECT_EQ(with_value(p, SweptParam::kGamma, 0.3).gamma_ca, 0.3);
  EXPECT_EQ(with_value(p, SweptParam::kGamma, 0.3).gamma_cb, 0.3);
  EXPECT_THROW(with_value(p, SweptParam::kEta, 1.2), ParameterError);
  EXPECT_THROW(with_value(p, SweptParam::kLambda, 0.0), ParameterError);
  EXPECT_THROW(with_value(p, SweptParam::kPhi, 7.0), ParameterError);
  EXPECT_THROW(parse_swept_param("kappa"), ParameterError);
}

TEST(Sweep, SinglePointMatchesDirectRun) {
  const SystemParams p;
  const std::vector<double> grid = {1.0};
  const auto res = sweep(p, SweptParam::kEta, grid, 3000, 9);
  const auto direct = run_entanglement_generation(p, 3000, 9);
  ASSERT_EQ(res.points.size(), 1u);
  EXPECT_EQ(res.points[0].p_hat, direct.p_hat);
  EXPECT_EQ(res.points[0].F_hat, direct.F_hat);
}

TEST(Sweep, SerialAndParallelIdentical) {
  SystemParams p;
  p.gamma_ca = p.gamma_cb = 0.2;
  RunOptions serial;
  serial.serial = true;
  RunOptions parallel;
  parallel.threads = 3;
  const auto a = run_entanglement_generation(p, 2000, 4, serial);
  const auto b = run_entanglement_generation(p, 2000, 4, parallel);
  EXPECT_EQ(a.n_success, b.n_success);
  EXPECT_EQ(a.F_hat, b.F_hat);
  EXPECT_EQ(a.F_stderr, b.F_stderr);
}

TEST(Sweep, RejectsPhi) {
  const std::vector<double> grid = {0.0};
  EXPECT_THROW(sweep(SystemParams{}, SweptParam::kPhi, grid, 10, 1), ParameterError);
}

TEST(Redistribution, CosineAntisymmetry) {
  const SystemParams p;
  const double phi = std::numbers::pi / 3;
  const std::vector<double> grid = {phi, phi + std::numbers::pi};
  const auto res = run_redistribution(p, grid, 6000, 12);
  const auto& a = res.points[0];
  const auto& b = res.points[1];
  EXPECT_LT(std::abs(*a.Ps_hat + *b.Ps_hat - 1.0), 3 * std::hypot(*a.Ps_stderr, *b.Ps_stderr));
}

TEST(Redistribution, SplitAfterFirstD1) {
  const SystemParams p;
  const double phi = 2 * std::numbers::pi / 3;
  const std::vector<double> grid = {phi};
  const auto pt = run_redistribution(p, grid, 8000, 13).points[0];
  const double n = static_cast<double>(pt.d1_then_d1 + pt.d1_then_d2);
  ASSERT_GT(n, 100);
  const double p1 = static_cast<double>(pt.d1_then_d1) / n;
  const double expected = analytic::p1_p2_split(phi).first;
  EXPECT_LT(std::abs(p1 - expected), 3 * std::sqrt(expected * (1 - expected) / n));
}

TEST(Redistribution, PhasePiNeverSameDetector) {
  const SystemParams p;
  const std::vector<double> grid = {std::numbers::pi};
  const auto pt = run_redistribution(p, grid, 3000, 14).points[0];
  EXPECT_GT(pt.n_two_clicks, 100u);
  EXPECT_EQ(*pt.Ps_hat, 0.0);
}

TEST(Truncation, OneAndTwoPhotonCutoffsAgree) {
  SystemParams p1;
  p1.hamiltonian = HamiltonianKind::kFull;
  SystemParams p2 = p1;
  p2.n_max = 2;
  const auto a = run_entanglement_generation(p1, 20000, 15);
  const auto b = run_entanglement_generation(p2, 20000, 15);
  EXPECT_LT(std::abs(a.p_hat - b.p_hat), 3 * std::hypot(a.p_stderr, b.p_stderr));
  EXPECT_LT(std::abs(a.F_hat - b.F_hat), 3 * std::hypot(a.F_stderr, b.F_stderr));
}

}  // namespace
}  // namespace hom
