// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blobq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUnstable = 2;
inline constexpr int kExitUsage = 64;

inline constexpr const char* kSweepCsvHeader =
    "B,tau,rho,lambda,N_analytic,T_analytic,T_sim_mean,T_sim_ci_low,T_sim_ci_high,status";

/// Parses "start:stop:step" (inclusive of stop when step divides the range),
/// a comma list, or a single value. Throws std::invalid_argument.
std::vector<double> parse_rho_grid(std::string_view text);

struct SweepCsvRow {
    int B = 0;
    double tau = 0.0;
    double rho = 0.0;
    double lambda = 0.0;
    std::optional<double> N_analytic;
    std::optional<double> T_analytic;
    std::optional<double> T_sim_mean;
    std::optional<double> T_sim_ci_low;
    std::optional<double> T_sim_ci_high;
    std::string status;
};

/// Nine significant digits, empty for missing values.
std::string format_sweep_row(const SweepCsvRow& row);
std::vector<SweepCsvRow> read_sweep_csv(std::istream& in);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blobq::cli
