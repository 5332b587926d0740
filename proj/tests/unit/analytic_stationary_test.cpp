// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "blobq/analytic/model.hpp"
#include "blobq/error.hpp"
#include "oracles/oracles.hpp"

namespace blobq::analytic {
namespace {

StateDistribution solve_embedded(double mean, int B, int n_max) {
    const auto P = build_transition_matrix(epoch_arrival_pmf(mean / 12.0, 12.0), B, n_max);
    return stationary_departure_distribution(P);
}

TEST(StationaryDeparture, EmptySystemFixedPointWithoutArrivals) {
    const auto pi = solve_embedded(0.0, 3, 12);
    EXPECT_EQ(pi.kind, DistributionKind::DepartureEmbedded);
    EXPECT_EQ(pi.probs[0], 1.0);
    for (std::size_t n = 1; n < pi.probs.size(); ++n) EXPECT_EQ(pi.probs[n], 0.0);
}

TEST(StationaryDeparture, MatchesMatrixPowerOracleB2) {
    const auto pi = solve_embedded(1.0, 2, 20);
    const auto oracle_pi =
        oracle::stationary_by_matrix_power(oracle::enumerate_transitions(1.0, 2, 20));
    ASSERT_EQ(pi.probs.size(), oracle_pi.size());
    for (std::size_t n = 0; n < pi.probs.size(); ++n) {
        EXPECT_NEAR(pi.probs[n], oracle_pi[n], 1e-10) << "state " << n;
    }
    // Frozen from a 40-digit LU solve of the same truncated chain.
    EXPECT_NEAR(pi.probs[0], 0.87870891033824912, 1e-13);
    EXPECT_NEAR(pi.probs[1], 0.082155097447989317, 1e-13);
    EXPECT_NEAR(pi.probs[2], 0.02749599273590962, 1e-13);
    EXPECT_NEAR(pi.probs[3], 0.0082956819918723096, 1e-13);
}

TEST(StationaryDeparture, FixedPointAndSanityOnRandomChains) {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<int> B_dist(1, 16);
    std::uniform_real_distribution<double> rho_dist(0.01, 0.95);
    for (int trial = 0; trial < 40; ++trial) {
        const int B = B_dist(gen);
        const int n_max = 4 * B + std::uniform_int_distribution<int>(0, 200)(gen);
        const double mean = rho_dist(gen) * B;
        const auto P = build_transition_matrix(epoch_arrival_pmf(mean / 12.0, 12.0), B, n_max);
        const auto pi = stationary_departure_distribution(P);
        EXPECT_LT(stationary_residual(P, pi.probs), 1e-12);
        double total = 0.0;
        for (double p : pi.probs) {
            EXPECT_GE(p, 0.0);
            total += p;
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
    }
}

TEST(StationaryDeparture, DeterministicAcrossCalls) {
    const auto a = solve_embedded(4.2, 6, 300);
    const auto b = solve_embedded(4.2, 6, 300);
    EXPECT_EQ(a.probs, b.probs);
}

TEST(StationaryDeparture, ReportsResidualWhenToleranceUnreachable) {
    const auto P = build_transition_matrix(epoch_arrival_pmf(0.3, 12.0), 6, 60);
    try {
        stationary_departure_distribution(P, 0.0);
        FAIL() << "a zero residual tolerance cannot be met";
    } catch (const NoConvergenceError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
        EXPECT_GE(e.achieved_residual(), 0.0);
        EXPECT_LT(e.achieved_residual(), 1e-12);
    }
}

// =============================================================================
// Elapsed-time kernel
// =============================================================================

TEST(ElapsedTimeKernel, FirstCoefficientClosedForm) {
    const auto k = elapsed_time_kernel(1.0 / 12.0, 12.0, 5);
    // 1 - e^-1, frozen from a 40-digit quadrature
    EXPECT_NEAR(k.coeffs[0], 0.63212055882855768, 1e-15);
    for (double mean : {1e-4, 0.3, 2.0, 15.2}) {
        const auto kk = elapsed_time_kernel(mean / 12.0, 12.0, 0);
        EXPECT_NEAR(kk.coeffs[0], -std::expm1(-mean) / mean, 1e-15);
    }
}

TEST(ElapsedTimeKernel, ThirdCoefficientMatchesQuadrature) {
    const auto k = elapsed_time_kernel(1.0, 1.0, 3);
    EXPECT_NEAR(k.coeffs[3], 0.018988156876153809, 1e-15);
    EXPECT_NEAR(k.coeffs[3], oracle::kernel_by_quadrature(1.0, 1.0, 3), 1e-12);
}

TEST(ElapsedTimeKernel, MatchesQuadratureAcrossMeans) {
    for (double mean : {0.25, 0.5, 1.0, 3.0, 9.0, 15.2}) {
        const auto k = elapsed_time_kernel(mean / 12.0, 12.0, 50);
        for (int m = 0; m <= 50; ++m) {
            const double q = oracle::kernel_by_quadrature(mean / 12.0, 12.0, m);
            EXPECT_NEAR(k.coeffs[m], q, 1e-12) << "mean " << mean << " m " << m;
            if (q > 1e-250) {
                EXPECT_NEAR(k.coeffs[m] / q, 1.0, 1e-9) << "mean " << mean << " m " << m;
            }
        }
    }
}

TEST(ElapsedTimeKernel, SumsToOneWhenLongEnough) {
    for (double mean : {1e-3, 0.7, 4.0, 15.2, 40.0}) {
        const auto k = elapsed_time_kernel(mean / 12.0, 12.0, 400);
        double total = 0.0;
        for (double c : k.coeffs) {
            EXPECT_GE(c, 0.0);
            total += c;
        }
        EXPECT_NEAR(total, 1.0, 1e-10) << "mean " << mean;
    }
}

TEST(ElapsedTimeKernel, ZeroRateIsRejected) {
    try {
        elapsed_time_kernel(0.0, 12.0, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
}

// =============================================================================
// Time-stationary distribution and metrics
// =============================================================================

TEST(TimeStationary, VanishingRateStaysAtZero) {
    StateDistribution delta{{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, DistributionKind::DepartureEmbedded, 0.0};
    const auto pi_bar = time_stationary_distribution(delta, elapsed_time_kernel(1e-12, 12.0, 6));
    EXPECT_EQ(pi_bar.kind, DistributionKind::TimeStationary);
    EXPECT_NEAR(pi_bar.probs[0], 1.0, 1e-10);
}

TEST(TimeStationary, DominatesZeroStateTermAndNormalizes) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int B = std::uniform_int_distribution<int>(1, 16)(gen);
        const double mean = std::uniform_real_distribution<double>(0.05, 0.9)(gen) * B;
        const int n_max = 8 * B + 100;
        const auto pi_plus = solve_embedded(mean, B, n_max);
        const auto kernel = elapsed_time_kernel(mean / 12.0, 12.0, n_max);
        const auto pi_bar = time_stationary_distribution(pi_plus, kernel);
        double total = 0.0;
        for (std::size_t n = 0; n < pi_bar.probs.size(); ++n) {
            EXPECT_GE(pi_bar.probs[n], pi_plus.probs[0] * kernel.coeffs[n] * (1.0 - 1e-12));
            total += pi_bar.probs[n];
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
        EXPECT_LT(std::abs(pi_bar.normalization_deficit), 1e-8);
    }
}

TEST(TimeStationary, RejectsWrongKindAndShortKernel) {
    StateDistribution d{{0.5, 0.5}, DistributionKind::TimeStationary, 0.0};
    EXPECT_THROW(time_stationary_distribution(d, elapsed_time_kernel(0.1, 12.0, 4)), Error);
    d.kind = DistributionKind::DepartureEmbedded;
    EXPECT_THROW(time_stationary_distribution(d, elapsed_time_kernel(0.1, 12.0, 0)), Error);
}

TEST(Metrics, EmptySystemHasNoBacklog) {
    StateDistribution delta{{1.0, 0.0, 0.0}, DistributionKind::TimeStationary, 0.0};
    const auto m = metrics(delta, ModelParams{0.1, 12.0, 2, 2});
    EXPECT_EQ(m.N, 0.0);
    EXPECT_EQ(m.T, 0.0);
    EXPECT_DOUBLE_EQ(m.rho, 0.6);
}

TEST(Metrics, LittlesLawHoldsByConstruction) {
    StateDistribution d{{0.2, 0.3, 0.5}, DistributionKind::TimeStationary, 0.0};
    const ModelParams params{0.37, 12.0, 2, 2};
    const auto m = metrics(d, params);
    EXPECT_DOUBLE_EQ(m.N, 1.3);
    EXPECT_DOUBLE_EQ(m.T * params.lambda, m.N);
    EXPECT_EQ(m.n_max_used, 2);
}

TEST(Metrics, ZeroRateIsRejected) {
    StateDistribution d{{1.0, 0.0}, DistributionKind::TimeStationary, 0.0};
    try {
        metrics(d, ModelParams{0.0, 12.0, 1, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
}

}  // namespace
}  // namespace blobq::analytic
