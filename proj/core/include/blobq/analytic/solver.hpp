// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blobq/analytic/model.hpp"
#include "blobq/error.hpp"

namespace blobq::analytic {

struct SolveOptions {
    double stability_margin = 1e-3;
    // 0 selects 4 * B + 64.
    int n_max_floor = 0;
    int n_max_budget = 4096;
    double tail_tol = 1e-10;
    double relative_delay_tol = 1e-6;
    double residual_tol = 1e-12;
    double pmf_tail_tol = 1e-300;  // keep terms until they underflow
};

/// Everything the end-to-end pipeline produced at the accepted truncation.
struct SteadyState {
    QueueMetrics metrics;
    StateDistribution pi_plus;
    StateDistribution pi_bar;
};

/// Runs the full pipeline with adaptive truncation: n_max starts at the floor
/// and doubles until the top decile of pi_bar holds less than `tail_tol` and
/// the delay moved by less than `relative_delay_tol` since the previous size.
///
/// Throws Error(UnstableLoad) when rho >= 1 - margin, Error(InvalidParameter)
/// for lambda <= 0, and NoConvergenceError when the budget runs out.
SteadyState solve_model(double lambda, double tau, int B, const SolveOptions& options = {});

QueueMetrics solve_delay(double lambda, double tau, int B, const SolveOptions& options = {});

/// Single pipeline pass at a fixed truncation bound.
SteadyState solve_at(const ModelParams& params, const SolveOptions& options = {});

struct SweepRow {
    double rho = 0.0;
    double lambda = 0.0;
    double N = 0.0;
    double T = 0.0;
    std::optional<ErrorKind> error;
    std::string message;

    bool ok() const noexcept { return !error.has_value(); }
};

/// One row per load in ascending rho order. Points are solved concurrently;
/// a failing point is reported in its row and does not abort the sweep.
std::vector<SweepRow> sweep_load(int B, double tau, std::vector<double> rho_grid,
                                 const SolveOptions& options = {});

}  // namespace blobq::analytic
