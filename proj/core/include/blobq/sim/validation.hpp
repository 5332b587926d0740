// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "blobq/analytic/solver.hpp"
#include "blobq/sim/simulator.hpp"

namespace blobq::sim {

struct StateCheck {
    int state = 0;
    double analytic = 0.0;
    double simulated = 0.0;
    double standard_error = 0.0;
    double expected_count = 0.0;
    bool pass = false;
};

struct ValidationReport {
    bool parameters_match = false;
    double analytic_T = 0.0;
    double simulated_T = 0.0;
    ConfidenceInterval ci95;
    bool delay_in_ci = false;
    std::vector<StateCheck> time_avg_checks;
    std::vector<StateCheck> arrival_checks;
    bool time_avg_pass = false;
    bool arrival_pass = false;

    bool pass() const noexcept {
        return parameters_match && delay_in_ci && time_avg_pass && arrival_pass;
    }
};

/// Minimum expected number of arrival observations for a state to be checked.
inline constexpr double kMinExpectedCount = 25.0;

/// Compares a simulation against the analytic solution: the analytic delay
/// must sit inside the simulated 95% interval, and pi_bar must agree with
/// both the time-averaged and the arrival-observed distributions within three
/// standard errors on every state expected to be seen at least 25 times.
ValidationReport validate_against_analytic(const SimResult& result,
                                           const analytic::SteadyState& solution,
                                           const SimConfig& config);

/// Runs the simulation for `config` and validates it.
ValidationReport validate_against_analytic(const SimConfig& config,
                                           const analytic::SteadyState& solution);

struct BatchExperiment {
    double rho = 0.0;
    double lambda = 0.0;
    double tau = 0.0;
    int B = 0;
    SimResult single_blob;  // 1-blob transactions at rate lambda
    SimResult full_batch;   // B-blob transactions at rate lambda / B
    analytic::QueueMetrics analytic_single_blob;  // solve_delay(lambda, tau, B)
    analytic::QueueMetrics analytic_full_batch;   // solve_delay(lambda / B, tau, 1)
    bool full_batch_matches_analytic = false;
};

/// Same load, two transaction shapes. The full-batch case is the B_eff = 1
/// queue, so its delay should match the analytic single-slot model.
/// `base` supplies horizon, warmup, seed, replications and packing.
BatchExperiment effective_batch_experiment(double lambda, double tau, int B,
                                           const SimConfig& base = {},
                                           const analytic::SolveOptions& options = {});

}  // namespace blobq::sim
