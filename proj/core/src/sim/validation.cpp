// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blobq/sim/validation.hpp"

#include <algorithm>
#include <cmath>

#include "blobq/error.hpp"

namespace blobq::sim {
namespace {

std::vector<StateCheck> check_states(const std::vector<double>& analytic,
                                     const std::vector<double>& simulated,
                                     const std::vector<double>& se, double observations) {
    std::vector<StateCheck> checks;
    const std::size_t width = std::max(analytic.size(), simulated.size());
    for (std::size_t n = 0; n < width; ++n) {
        const double expected = n < analytic.size() ? analytic[n] : 0.0;
        const double expected_count = observations * expected;
        if (expected_count < kMinExpectedCount) continue;

        StateCheck c;
        c.state = static_cast<int>(n);
        c.analytic = expected;
        c.simulated = n < simulated.size() ? simulated[n] : 0.0;
        c.standard_error = n < se.size() ? se[n] : 0.0;
        c.expected_count = expected_count;
        c.pass = std::abs(c.simulated - c.analytic) <= 3.0 * c.standard_error;
        checks.push_back(c);
    }
    return checks;
}

bool all_pass(const std::vector<StateCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const StateCheck& c) { return c.pass; });
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

ValidationReport validate_against_analytic(const SimResult& result,
                                           const analytic::SteadyState& solution,
                                           const SimConfig& config) {
    const auto& m = solution.metrics;
    ValidationReport report;
    report.parameters_match = close(m.lambda, config.lambda) && close(m.tau, config.tau) &&
                              m.B == config.B && config.blob_size_dist.size() == 1;
    report.analytic_T = m.T;
    report.simulated_T = result.mean_sojourn;
    report.ci95 = result.ci95;
    report.delay_in_ci = result.ci95.low <= m.T && m.T <= result.ci95.high;

    const double observations = static_cast<double>(result.measured_arrivals);
    report.time_avg_checks = check_states(solution.pi_bar.probs, result.time_avg_distribution,
                                          result.time_avg_se, observations);
    report.arrival_checks = check_states(solution.pi_bar.probs, result.arrival_observed_distribution,
                                         result.arrival_observed_se, observations);
    report.time_avg_pass = all_pass(report.time_avg_checks);
    report.arrival_pass = all_pass(report.arrival_checks);
    return report;
}

ValidationReport validate_against_analytic(const SimConfig& config,
                                           const analytic::SteadyState& solution) {
    return validate_against_analytic(simulate(config), solution, config);
}

BatchExperiment effective_batch_experiment(double lambda, double tau, int B,
                                           const SimConfig& base,
                                           const analytic::SolveOptions& options) {
    if (B < 1) throw Error(ErrorKind::InvalidParameter, "B must be >= 1");
    const double rho = lambda * tau / static_cast<double>(B);
    if (!(rho < 1.0)) throw Error(ErrorKind::UnstableLoad, "batch experiment needs rho < 1");

    BatchExperiment out;
    out.rho = rho;
    out.lambda = lambda;
    out.tau = tau;
    out.B = B;

    SimConfig single = base;
    single.lambda = lambda;
    single.tau = tau;
    single.B = B;
    single.blob_size_dist = {1.0};

    SimConfig full = single;
    full.lambda = lambda / static_cast<double>(B);
    full.blob_size_dist.assign(static_cast<std::size_t>(B), 0.0);
    full.blob_size_dist.back() = 1.0;
    full.seed = replication_seed(base.seed, 0x46554c4cULL);

    out.single_blob = simulate(single);
    out.full_batch = simulate(full);
    out.analytic_single_blob = analytic::solve_delay(lambda, tau, B, options);
    out.analytic_full_batch = analytic::solve_delay(full.lambda, tau, 1, options);
    out.full_batch_matches_analytic = out.full_batch.ci95.low <= out.analytic_full_batch.T &&
                                      out.analytic_full_batch.T <= out.full_batch.ci95.high;
    return out;
}

}  // namespace blobq::sim
