// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace blobq::sim {

/// How a block fills its blob capacity from the waiting line.
enum class PackingPolicy {
    // Serve from the head in arrival order; a head that does not fit ends the block.
    FifoBlocking,
    // Scan in arrival order and take every transaction that still fits.
    FirstFit,
};

std::string_view to_string(PackingPolicy policy) noexcept;
std::optional<PackingPolicy> parse_packing_policy(std::string_view text) noexcept;

struct SimConfig {
    double lambda = 0.0;  // transactions per second
    double tau = 12.0;    // block interval, seconds
    int B = 6;            // blobs per block
    // blob_size_dist[k] is the probability a transaction carries k + 1 blobs.
    std::vector<double> blob_size_dist{1.0};
    std::int64_t horizon_blocks = 250'000;
    // Unset means 10% of the horizon, at least 1000 blocks.
    std::optional<std::int64_t> warmup_blocks;
    std::uint64_t seed = 42;
    int replications = 10;
    PackingPolicy packing = PackingPolicy::FifoBlocking;
    // Worker threads for replications, 0 = hardware concurrency.
    unsigned threads = 0;

    std::int64_t resolved_warmup() const noexcept;
    double rho() const noexcept;

    /// Throws Error(InvalidConfig) when an invariant is violated.
    void validate() const;
};

struct ReplicationStats {
    std::uint64_t seed = 0;
    double mean_sojourn = 0.0;
    double mean_queue_length = 0.0;
    std::vector<double> time_avg_distribution;
    std::vector<double> arrival_observed_distribution;
    std::vector<double> departure_distribution;
    std::int64_t measured_arrivals = 0;
    std::int64_t measured_served = 0;
    std::int64_t measured_blocks = 0;
    std::int64_t empty_blocks = 0;
    std::int64_t total_arrivals = 0;
    std::int64_t total_served = 0;
    std::int64_t final_queue_length = 0;
    std::int64_t max_blobs_in_block = 0;
    double min_sojourn = 0.0;
};

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
};

struct SimResult {
    double mean_sojourn = 0.0;
    ConfidenceInterval ci95;
    double mean_queue_length = 0.0;
    ConfidenceInterval queue_length_ci95;
    // Pooled over replications, with per-state standard errors taken from the
    // spread of the replication-level values.
    std::vector<double> time_avg_distribution;
    std::vector<double> time_avg_se;
    std::vector<double> arrival_observed_distribution;
    std::vector<double> arrival_observed_se;
    // Queue length left behind by each measured block.
    std::vector<double> departure_distribution;
    std::vector<double> departure_se;
    double empty_block_fraction = 0.0;
    std::int64_t blocks_simulated = 0;
    std::int64_t measured_blocks = 0;
    std::int64_t measured_arrivals = 0;
    std::int64_t btx_served = 0;
    std::int64_t total_arrivals = 0;
    std::int64_t final_queue_length = 0;
    bool overloaded = false;
    std::vector<double> per_replication_means;
    std::vector<ReplicationStats> replications;
};

/// Clocked batch-service simulation. Blocks are produced at k * tau whether
/// or not anything is waiting; a transaction arriving exactly at a block
/// instant waits for the next one. Sojourn is departure block time minus
/// arrival time. Statistics cover arrivals after the warmup blocks.
SimResult simulate(const SimConfig& config);

/// Called for every departure with the serving block index, the arrival time
/// and the blob count of the transaction.
using DepartureHook = std::function<void(std::int64_t block, double arrival, int blobs)>;

/// One replication with an explicit seed; the building block of simulate().
ReplicationStats run_replication(const SimConfig& config, std::uint64_t seed,
                                 const DepartureHook& hook = {});

/// Seed of replication `index`, derived from the master seed.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Two-sided 95% Student-t interval for the mean of `samples`.
ConfidenceInterval student_t_ci95(const std::vector<double>& samples);

}  // namespace blobq::sim
