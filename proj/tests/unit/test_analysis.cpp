#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "adjsarah/analysis.hpp"
#include "adjsarah/dataset.hpp"
#include "adjsarah/error.hpp"
#include "adjsarah/objective.hpp"
#include "adjsarah/optimizers.hpp"

namespace adjsarah {
namespace {

LogisticL2 logistic(std::size_t n, std::size_t d = 3) {
  return LogisticL2(generate_separable_blobs(n, d, 1.0, 21), 0.05);
}

TEST(DeltaIdentity, NeedsRecordedLoop) {
  InstrumentedEpoch empty;
  EXPECT_THROW(check_delta_identity(empty), PreconditionError);
  EXPECT_THROW(check_v_monotone(empty), PreconditionError);
}

TEST(DeltaIdentity, HandBuiltLoop) {
  // m = 2 in one dimension: diffs 1 and 2, v_0 = 3.
  InstrumentedEpoch e;
  e.order = {0, 1};
  e.directions = {{3.0}, {3.0 + 1.5 * 1.0}, {3.0 + 1.5 + 3.0 * 2.0}};
  e.grad_diffs = {{1.0}, {2.0}};
  e.weights = {1.5, 3.0};
  e.iterates = {{0.0}, {0.0}, {0.0}, {0.0}};
  // sum v_t = 3 + 4.5 + 10.5 = 18 = 3 * (1 + 2 + 3)
  const auto check = check_delta_identity(e);
  EXPECT_EQ(check.residual, 0.0);
  EXPECT_EQ(check.scale, 3.0 * 4.0);
}

TEST(DeltaIdentity, UnitWeightsBreakIt) {
  const auto obj = logistic(8);
  const std::vector<double> w0{0.5, -0.5, 0.25};
  const std::vector<std::size_t> order{0, 1, 2, 3, 4, 5, 6, 7};
  const auto plain = run_epoch_shuffled_sarah(obj, w0, order, 0.2, 1, true);
  const auto adjusted = run_epoch_adjusted(obj, w0, order, 0.2, 1, true);
  EXPECT_LE(check_delta_identity(*adjusted.instrumented).relative(), 1e-12);
  EXPECT_GT(check_delta_identity(*plain.instrumented).relative(), 1e-6);
}

TEST(VMonotone, DetectsGrowth) {
  InstrumentedEpoch e;
  e.order = {0, 1};
  e.directions = {{1.0}, {0.5}, {0.75}};
  const auto check = check_v_monotone(e);
  EXPECT_FALSE(check.monotone);
  ASSERT_TRUE(check.first_violation.has_value());
  EXPECT_EQ(*check.first_violation, 2u);
  EXPECT_NEAR(check.worst_ratio, 2.25, 1e-15);
}

TEST(VMonotone, ZeroDirectionsAreMonotone) {
  InstrumentedEpoch e;
  e.order = {0, 1, 2};
  e.directions = {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  EXPECT_TRUE(check_v_monotone(e).monotone);
}

TEST(PrefixVariance, FullSampleHasNoError) {
  const auto obj = logistic(6);
  const std::vector<double> w{0.1, 0.2, 0.3};
  EXPECT_EQ(brute_force_prefix_variance(obj, w, 6), 0.0);
  EXPECT_EQ(prefix_variance_closed_form(6, 6, 1.7), 0.0);
}

TEST(PrefixVariance, SingleDrawIsSigmaSquared) {
  const auto obj = logistic(2);
  const std::vector<double> w{0.4, -0.1, 0.3};
  const double sigma_sq = variance_at(obj, w);
  EXPECT_NEAR(brute_force_prefix_variance(obj, w, 1), sigma_sq,
              1e-14 * sigma_sq);
  EXPECT_EQ(prefix_variance_closed_form(2, 1, sigma_sq), sigma_sq);
}

TEST(PrefixVariance, MatchesClosedForm) {
  const auto obj = logistic(6);
  const std::vector<double> w{-0.3, 0.6, 0.2};
  const double sigma_sq = variance_at(obj, w);
  for (std::size_t m = 1; m <= 6; ++m) {
    const double closed = prefix_variance_closed_form(6, m, sigma_sq);
    EXPECT_NEAR(brute_force_prefix_variance(obj, w, m), closed,
                1e-12 * sigma_sq)
        << "m=" << m;
  }
  EXPECT_NEAR(prefix_variance_closed_form(6, 3, 1.0), 3.0 / 15.0, 1e-16);
  EXPECT_EQ(prefix_variance_closed_form(1, 1, 5.0), 0.0);
}

TEST(PrefixVariance, RefusesLargeEnumerations) {
  const auto obj = logistic(11);
  const std::vector<double> w(3, 0.0);
  EXPECT_THROW(brute_force_prefix_variance(obj, w, 5), PreconditionError);
  const auto small = logistic(5);
  EXPECT_THROW(brute_force_prefix_variance(small, w, 0), ConfigError);
  EXPECT_THROW(prefix_variance_closed_form(5, 6, 1.0), ConfigError);
}

TEST(ExactScBound, StartsAtInitialGap) {
  EXPECT_EQ(exact_sc_bound(2.0, 0.1, 0.01, 10, 0, 3.5), 3.5);
}

TEST(ExactScBound, Factor) {
  const double L = 1.01, mu = 0.01;
  const std::size_t n = 10;
  const double eta = 1.0 / (2 * n * L);
  const double factor = exact_sc_factor(L, mu, eta, n);
  EXPECT_NEAR(factor, 0.9972772277227723, 1e-15);
  // equivalent form 1 - (n+1) / (4 kappa n)
  EXPECT_NEAR(factor, 1.0 - 11.0 / (4.0 * 101.0 * 10.0), 1e-15);
  EXPECT_NEAR(exact_sc_bound(L, mu, eta, n, 3, 2.0),
              2.0 * factor * factor * factor, 1e-15);
}

TEST(ExactScBound, RejectsLargeStep) {
  EXPECT_THROW(exact_sc_factor(1.0, 0.1, 0.051, 10), PreconditionError);
  EXPECT_THROW(exact_sc_factor(1.0, 0.1, 0.0, 10), PreconditionError);
  EXPECT_NO_THROW(exact_sc_factor(1.0, 0.1, 0.05, 10));
}

TEST(ExactNcBound, HandValue) {
  // L = 2, n = 4, eta = 1/16 = 1/(2nL): the correction factor is 3/4.
  EXPECT_NEAR(exact_nc_bound(2.0, 1.0 / 16.0, 4, 10, 3.0), 2.56, 1e-14);
}

TEST(ExactNcBound, HalvesWhenEpochsDouble) {
  const double a = exact_nc_bound(1.5, 0.01, 20, 10, 0.7);
  const double b = exact_nc_bound(1.5, 0.01, 20, 20, 0.7);
  EXPECT_NEAR(b, a / 2, 1e-15 * a);
  EXPECT_THROW(exact_nc_bound(1.5, 0.01, 20, 0, 0.7), PreconditionError);
}

TEST(InexactScBound, HandValue) {
  // L = 1, mu = 0.1, m = 4, eta = 1/16, s = 2, gap0 = 1, sigma^2 = 1/2
  const auto b = inexact_sc_bound(1.0, 0.1, 1.0 / 16.0, 4, 2, 1.0, 0.5);
  EXPECT_NEAR(b.alpha, 0.984375, 1e-15);
  EXPECT_NEAR(b.geometric, 0.968994140625, 1e-15);
  EXPECT_NEAR(b.noise_floor, 24.0, 1e-13);
  EXPECT_NEAR(b.total(), 24.968994140625, 1e-13);
}

TEST(InexactScBound, NoVarianceIsPureGeometric) {
  const auto b = inexact_sc_bound(2.0, 0.2, 0.01, 5, 7, 3.0, 0.0);
  EXPECT_EQ(b.noise_floor, 0.0);
  EXPECT_NEAR(b.total(), 3.0 * std::pow(1 - 0.01 * 6 * 0.2 / 2, 7), 1e-15);
}

TEST(InexactScBound, Preconditions) {
  EXPECT_THROW(inexact_sc_bound(1.0, 0.0, 0.01, 4, 1, 1.0, 1.0),
               PreconditionError);
  EXPECT_THROW(inexact_sc_bound(1.0, 0.1, 0.1, 4, 1, 1.0, 1.0),
               PreconditionError);
}

TEST(InexactNcBound, HandValue) {
  // L = 1, m = 4, eta = 1/16, S = 5, gap0 = 2, sigma^2 = 1/2
  const auto b = inexact_nc_bound(1.0, 1.0 / 16.0, 4, 5, 2.0, 0.5);
  EXPECT_NEAR(b.optimization, 3.4133333333333336, 1e-14);
  EXPECT_NEAR(b.noise, 3.2, 1e-14);
}

TEST(InexactNcBound, OptimizationTermVanishes) {
  const auto short_run = inexact_nc_bound(1.0, 0.01, 5, 10, 1.0, 0.3);
  const auto long_run = inexact_nc_bound(1.0, 0.01, 5, 1000000, 1.0, 0.3);
  EXPECT_NEAR(long_run.optimization, short_run.optimization / 100000, 1e-18);
  EXPECT_EQ(long_run.noise, short_run.noise);
}

TEST(ChooseInnerSize, StronglyConvexCases) {
  const auto sc = Setting::StronglyConvex;
  EXPECT_EQ(choose_inner_size(1.0, 0.01, 0.1, 1000000, sc), 95999u);
  EXPECT_EQ(choose_inner_size(0.5, 0.1, 0.01, 1000, sc), 1000u);
  EXPECT_EQ(choose_inner_size(0.0, 0.1, 0.01, 1000, sc), 1u);
  EXPECT_EQ(choose_inner_size(0.002, 0.5, 0.2, 1000, sc), 1u);
  EXPECT_EQ(choose_inner_size(0.25, 1.0, 0.5, 1000, sc), 47u);
}

TEST(ChooseInnerSize, NonconvexCases) {
  const auto nc = Setting::NonConvex;
  EXPECT_EQ(choose_inner_size(2.0, 0.0, 0.5, 100, nc), 8u);
  EXPECT_EQ(choose_inner_size(0.3, 0.0, 0.1, 100, nc), 30u);
  EXPECT_EQ(choose_inner_size(10.0, 0.0, 0.01, 500, nc), 500u);
  EXPECT_EQ(choose_inner_size(1e-6, 0.0, 0.9, 500, nc), 1u);
}

TEST(ChooseInnerSize, Preconditions) {
  const auto sc = Setting::StronglyConvex;
  EXPECT_THROW(choose_inner_size(1.0, 0.1, 0.0, 10, sc), PreconditionError);
  EXPECT_THROW(choose_inner_size(1.0, 0.1, 1.0, 10, sc), PreconditionError);
  EXPECT_THROW(choose_inner_size(-1.0, 0.1, 0.5, 10, sc), PreconditionError);
  EXPECT_THROW(choose_inner_size(1.0, 0.0, 0.5, 10, sc), PreconditionError);
  EXPECT_NO_THROW(choose_inner_size(1.0, 0.0, 0.5, 10, Setting::NonConvex));
}

}  // namespace
}  // namespace adjsarah
