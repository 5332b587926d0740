// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blobq/analytic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blobq/parallel.hpp"

namespace blobq::analytic {

SteadyState solve_at(const ModelParams& params, const SolveOptions& options) {
    params.validate();
    const auto pmf = epoch_arrival_pmf(params.lambda, params.tau, options.pmf_tail_tol);
    const auto P = build_transition_matrix(pmf, params.B, params.n_max);
    auto pi_plus = stationary_departure_distribution(P, options.residual_tol);
    const auto kernel = elapsed_time_kernel(params.lambda, params.tau, params.n_max);
    auto pi_bar = time_stationary_distribution(pi_plus, kernel);
    const auto m = metrics(pi_bar, params);
    return SteadyState{m, std::move(pi_plus), std::move(pi_bar)};
}

SteadyState solve_model(double lambda, double tau, int B, const SolveOptions& options) {
    if (!(std::isfinite(lambda) && lambda > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "lambda must be finite and > 0");
    }
    if (!(std::isfinite(tau) && tau > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "tau must be finite and > 0");
    }
    if (B < 1) throw Error(ErrorKind::InvalidParameter, "B must be >= 1");

    const double rho = lambda * tau / static_cast<double>(B);
    if (rho >= 1.0 - options.stability_margin) {
        std::ostringstream msg;
        msg << "offered load rho = " << rho << " is not below 1 - " << options.stability_margin;
        throw Error(ErrorKind::UnstableLoad, msg.str());
    }

    int n_max = options.n_max_floor > 0 ? options.n_max_floor : 4 * B + 64;
    n_max = std::max(n_max, B);

    std::optional<SteadyState> previous;
    while (n_max <= options.n_max_budget) {
        auto current = solve_at(ModelParams{lambda, tau, B, n_max}, options);
        if (previous) {
            const double change = std::abs(current.metrics.T - previous->metrics.T);
            if (current.metrics.tail_mass < options.tail_tol &&
                change <= options.relative_delay_tol * std::abs(current.metrics.T)) {
                return current;
            }
        }
        previous = std::move(current);
        n_max *= 2;
    }

    std::ostringstream msg;
    msg << "truncation budget n_max <= " << options.n_max_budget << " exhausted at rho = " << rho;
    const double last_T = previous ? previous->metrics.T : std::numeric_limits<double>::quiet_NaN();
    const double last_tail =
        previous ? previous->metrics.tail_mass : std::numeric_limits<double>::infinity();
    if (previous) msg << " (last T = " << last_T << ", tail mass = " << last_tail << ")";
    throw NoConvergenceError(msg.str(), last_tail, last_T);
}

QueueMetrics solve_delay(double lambda, double tau, int B, const SolveOptions& options) {
    return solve_model(lambda, tau, B, options).metrics;
}

std::vector<SweepRow> sweep_load(int B, double tau, std::vector<double> rho_grid,
                                 const SolveOptions& options) {
    std::stable_sort(rho_grid.begin(), rho_grid.end());
    std::vector<SweepRow> rows(rho_grid.size());

    detail::parallel_for(rows.size(), [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.rho = rho_grid[i];
        row.lambda = row.rho * static_cast<double>(B) / tau;
        if (!(row.rho > 0.0 && row.rho < 1.0)) {
            row.error = ErrorKind::InvalidParameter;
            row.message = "rho must lie in (0, 1)";
            return;
        }
        try {
            const auto m = solve_delay(row.lambda, tau, B, options);
            row.N = m.N;
            row.T = m.T;
        } catch (const Error& e) {
            row.error = e.kind();
            row.message = e.what();
        }
    });
    return rows;
}

}  // namespace blobq::analytic
