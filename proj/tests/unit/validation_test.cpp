// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "blobq/error.hpp"
#include "blobq/sim/validation.hpp"

namespace blobq::sim {
namespace {

constexpr double kTau = 12.0;

SimConfig config_for(double lambda, int B) {
    SimConfig c;
    c.lambda = lambda;
    c.tau = kTau;
    c.B = B;
    c.horizon_blocks = 100'000;
    c.replications = 20;
    c.seed = 2024;
    return c;
}

TEST(ValidateAgainstAnalytic, HalfLoadPasses) {
    const double lambda = 0.5 * 6 / kTau;
    const auto solution = analytic::solve_model(lambda, kTau, 6);
    const auto report = validate_against_analytic(config_for(lambda, 6), solution);
    EXPECT_TRUE(report.parameters_match);
    EXPECT_TRUE(report.delay_in_ci) << report.analytic_T << " vs [" << report.ci95.low << ", "
                                    << report.ci95.high << "]";
    EXPECT_FALSE(report.time_avg_checks.empty());
    EXPECT_FALSE(report.arrival_checks.empty());
    for (const auto& c : report.time_avg_checks) EXPECT_GE(c.expected_count, kMinExpectedCount);
    EXPECT_TRUE(report.time_avg_pass);
    EXPECT_TRUE(report.arrival_pass);
    EXPECT_TRUE(report.pass());
}

TEST(ValidateAgainstAnalytic, MismatchedRateFails) {
    const double lambda = 0.5 * 6 / kTau;
    const auto solution = analytic::solve_model(lambda * 1.1, kTau, 6);
    const auto report = validate_against_analytic(config_for(lambda, 6), solution);
    EXPECT_FALSE(report.parameters_match);
    EXPECT_FALSE(report.delay_in_ci);
    EXPECT_FALSE(report.time_avg_pass && report.arrival_pass);
    EXPECT_FALSE(report.pass());
}

TEST(EffectiveBatch, FullCapacityTransactionsWaitMuchLonger) {
    SimConfig base = config_for(0.0, 6);
    base.horizon_blocks = 50'000;
    base.replications = 10;
    const double lambda = 0.7 * 6 / kTau;
    const auto e = effective_batch_experiment(lambda, kTau, 6, base);
    EXPECT_GT(e.full_batch.mean_sojourn, 2.0 * e.single_blob.mean_sojourn);
    EXPECT_TRUE(e.full_batch_matches_analytic)
        << e.analytic_full_batch.T << " vs [" << e.full_batch.ci95.low << ", "
        << e.full_batch.ci95.high << "]";
    EXPECT_DOUBLE_EQ(e.analytic_full_batch.lambda, lambda / 6);
    EXPECT_EQ(e.analytic_full_batch.B, 1);
}

TEST(EffectiveBatch, DegenerateBatchCasesAgree) {
    SimConfig base = config_for(0.0, 1);
    base.horizon_blocks = 50'000;
    const auto e = effective_batch_experiment(0.6 / kTau, kTau, 1, base);
    const double gap = std::abs(e.single_blob.mean_sojourn - e.full_batch.mean_sojourn);
    const double half_a = (e.single_blob.ci95.high - e.single_blob.ci95.low) / 2;
    const double half_b = (e.full_batch.ci95.high - e.full_batch.ci95.low) / 2;
    EXPECT_LT(gap, half_a + half_b);
    EXPECT_DOUBLE_EQ(e.analytic_single_blob.T, e.analytic_full_batch.T);
}

TEST(EffectiveBatch, RejectsUnstableLoad) {
    try {
        effective_batch_experiment(1.0, kTau, 6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnstableLoad);
    }
}

}  // namespace
}  // namespace blobq::sim
