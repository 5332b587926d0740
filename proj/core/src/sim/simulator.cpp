// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blobq/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "blobq/error.hpp"
#include "blobq/parallel.hpp"

namespace blobq::sim {
namespace {

[[noreturn]] void invalid(const std::string& message) {
    throw Error(ErrorKind::InvalidConfig, message);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Bit-level conversions so a seed reproduces the same stream everywhere,
// independent of how the standard library implements its distributions.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

struct Waiting {
    double arrival;
    int blobs;
    bool measured;
};

template <typename T>
void bump(std::vector<T>& v, std::size_t index, T amount) {
    if (index >= v.size()) v.resize(index + 1, T{});
    v[index] += amount;
}

double mean_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

double standard_error(std::vector<double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double mean = mean_of(values);
    std::sort(values.begin(), values.end());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

// Per-state pooled value and standard error across replications.
void pool_states(const std::vector<std::vector<double>>& per_rep,
                 const std::vector<double>& weights, std::vector<double>& pooled,
                 std::vector<double>& se) {
    std::size_t width = 0;
    for (const auto& v : per_rep) width = std::max(width, v.size());
    const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);

    pooled.assign(width, 0.0);
    se.assign(width, 0.0);
    std::vector<double> column(per_rep.size());
    for (std::size_t n = 0; n < width; ++n) {
        double acc = 0.0;
        for (std::size_t r = 0; r < per_rep.size(); ++r) {
            column[r] = n < per_rep[r].size() ? per_rep[r][n] : 0.0;
            acc += column[r] * weights[r];
        }
        pooled[n] = total_weight > 0.0 ? acc / total_weight : 0.0;
        se[n] = standard_error(column);
    }
}

}  // namespace

std::string_view to_string(PackingPolicy policy) noexcept {
    switch (policy) {
        case PackingPolicy::FifoBlocking: return "fifo-blocking";
        case PackingPolicy::FirstFit: return "first-fit";
    }
    return "unknown";
}

std::optional<PackingPolicy> parse_packing_policy(std::string_view text) noexcept {
    if (text == "fifo-blocking") return PackingPolicy::FifoBlocking;
    if (text == "first-fit") return PackingPolicy::FirstFit;
    return std::nullopt;
}

std::int64_t SimConfig::resolved_warmup() const noexcept {
    if (warmup_blocks) return *warmup_blocks;
    return std::max<std::int64_t>(horizon_blocks / 10, 1000);
}

double SimConfig::rho() const noexcept {
    double mean_blobs = 0.0;
    for (std::size_t k = 0; k < blob_size_dist.size(); ++k) {
        mean_blobs += static_cast<double>(k + 1) * blob_size_dist[k];
    }
    return lambda * tau * mean_blobs / static_cast<double>(B);
}

void SimConfig::validate() const {
    if (!(std::isfinite(lambda) && lambda > 0.0)) invalid("lambda must be finite and > 0");
    if (!(std::isfinite(tau) && tau > 0.0)) invalid("tau must be finite and > 0");
    if (B < 1) invalid("B must be >= 1");
    if (blob_size_dist.empty()) invalid("blob size distribution is empty");
    if (blob_size_dist.size() > static_cast<std::size_t>(B)) {
        invalid("blob size distribution supports more blobs than the block capacity");
    }
    double total = 0.0;
    for (double p : blob_size_dist) {
        if (!(p >= 0.0)) invalid("blob size probabilities must be >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) invalid("blob size distribution must sum to 1");
    if (horizon_blocks < 1) invalid("horizon must be at least one block");
    const auto warmup = resolved_warmup();
    if (warmup < 0 || warmup >= horizon_blocks) invalid("warmup must be in [0, horizon)");
    if (replications < 1) invalid("replications must be >= 1");
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

ConfidenceInterval student_t_ci95(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n == 0) return {};
    const double mean = mean_of(samples);
    if (n < 2) return {mean, mean};
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double half = boost::math::quantile(dist, 0.975) * standard_error(samples);
    return {mean - half, mean + half};
}

ReplicationStats run_replication(const SimConfig& config, std::uint64_t seed,
                                 const DepartureHook& hook) {
    Stream stream(seed);
    const std::int64_t horizon = config.horizon_blocks;
    const std::int64_t warmup = config.resolved_warmup();
    const double tau = config.tau;
    const int capacity = config.B;

    std::vector<double> cumulative(config.blob_size_dist.size());
    std::partial_sum(config.blob_size_dist.begin(), config.blob_size_dist.end(),
                     cumulative.begin());
    auto draw_blobs = [&]() -> int {
        if (cumulative.size() == 1) return 1;
        const double u = stream.uniform() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto index = std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                     static_cast<std::ptrdiff_t>(cumulative.size()) - 1);
        return static_cast<int>(index) + 1;
    };

    ReplicationStats stats;
    stats.seed = seed;
    stats.min_sojourn = std::numeric_limits<double>::infinity();

    std::vector<double> time_in_state;
    std::vector<std::int64_t> seen_by_arrivals;
    std::vector<std::int64_t> left_by_blocks;
    double sojourn_sum = 0.0;

    std::deque<Waiting> queue;
    std::vector<bool> taken;
    double next_arrival = stream.exponential(config.lambda);

    for (std::int64_t k = 1; k <= horizon; ++k) {
        const double block_time = static_cast<double>(k) * tau;
        const bool measured = k > warmup;
        double t_prev = static_cast<double>(k - 1) * tau;

        while (next_arrival < block_time) {
            const std::size_t q = queue.size();
            if (measured) {
                bump(time_in_state, q, next_arrival - t_prev);
                bump<std::int64_t>(seen_by_arrivals, q, 1);
                ++stats.measured_arrivals;
            }
            t_prev = next_arrival;
            queue.push_back(Waiting{next_arrival, draw_blobs(), measured});
            ++stats.total_arrivals;
            next_arrival += stream.exponential(config.lambda);
        }
        if (measured) bump(time_in_state, queue.size(), block_time - t_prev);

        int room = capacity;
        std::int64_t served = 0;
        auto depart = [&](const Waiting& w) {
            room -= w.blobs;
            ++served;
            ++stats.total_served;
            if (hook) hook(k, w.arrival, w.blobs);
            if (w.measured) {
                const double sojourn = block_time - w.arrival;
                sojourn_sum += sojourn;
                stats.min_sojourn = std::min(stats.min_sojourn, sojourn);
                ++stats.measured_served;
            }
        };

        if (config.packing == PackingPolicy::FifoBlocking) {
            while (!queue.empty() && queue.front().blobs <= room) {
                depart(queue.front());
                queue.pop_front();
            }
        } else {
            taken.assign(queue.size(), false);
            std::size_t scanned = 0;
            for (; scanned < queue.size() && room > 0; ++scanned) {
                if (queue[scanned].blobs <= room) {
                    depart(queue[scanned]);
                    taken[scanned] = true;
                }
            }
            if (served > 0) {
                std::deque<Waiting> rest;
                for (std::size_t i = 0; i < queue.size(); ++i) {
                    if (i >= scanned || !taken[i]) rest.push_back(queue[i]);
                }
                queue.swap(rest);
            }
        }

        if (measured) {
            ++stats.measured_blocks;
            if (served == 0) ++stats.empty_blocks;
            bump<std::int64_t>(left_by_blocks, queue.size(), 1);
            stats.max_blobs_in_block =
                std::max<std::int64_t>(stats.max_blobs_in_block, capacity - room);
        }
    }

    stats.final_queue_length = static_cast<std::int64_t>(queue.size());
    stats.mean_sojourn = stats.measured_served > 0
                             ? sojourn_sum / static_cast<double>(stats.measured_served)
                             : std::numeric_limits<double>::quiet_NaN();

    const double window = static_cast<double>(horizon - warmup) * tau;
    stats.time_avg_distribution.resize(time_in_state.size());
    for (std::size_t n = 0; n < time_in_state.size(); ++n) {
        stats.time_avg_distribution[n] = time_in_state[n] / window;
        stats.mean_queue_length += static_cast<double>(n) * stats.time_avg_distribution[n];
    }
    stats.arrival_observed_distribution.resize(seen_by_arrivals.size());
    for (std::size_t n = 0; n < seen_by_arrivals.size(); ++n) {
        stats.arrival_observed_distribution[n] =
            static_cast<double>(seen_by_arrivals[n]) / static_cast<double>(stats.measured_arrivals);
    }
    stats.departure_distribution.resize(left_by_blocks.size());
    for (std::size_t n = 0; n < left_by_blocks.size(); ++n) {
        stats.departure_distribution[n] =
            static_cast<double>(left_by_blocks[n]) / static_cast<double>(stats.measured_blocks);
    }
    return stats;
}

SimResult simulate(const SimConfig& config) {
    config.validate();
    const auto R = static_cast<std::size_t>(config.replications);

    std::vector<ReplicationStats> reps(R);
    detail::parallel_for(
        R, [&](std::size_t r) { reps[r] = run_replication(config, replication_seed(config.seed, r)); },
        config.threads);

    SimResult result;
    std::vector<double> queue_means(R);
    std::vector<double> arrival_weights(R), time_weights(R), block_weights(R);
    std::vector<std::vector<double>> time_avg(R), arrival_obs(R), departures(R);
    result.per_replication_means.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
        const auto& rep = reps[r];
        result.per_replication_means[r] = rep.mean_sojourn;
        queue_means[r] = rep.mean_queue_length;
        time_avg[r] = rep.time_avg_distribution;
        arrival_obs[r] = rep.arrival_observed_distribution;
        departures[r] = rep.departure_distribution;
        time_weights[r] = 1.0;
        arrival_weights[r] = static_cast<double>(rep.measured_arrivals);
        block_weights[r] = static_cast<double>(rep.measured_blocks);

        result.blocks_simulated += config.horizon_blocks;
        result.measured_blocks += rep.measured_blocks;
        result.measured_arrivals += rep.measured_arrivals;
        result.btx_served += rep.total_served;
        result.total_arrivals += rep.total_arrivals;
        result.final_queue_length += rep.final_queue_length;
    }

    result.mean_sojourn = mean_of(result.per_replication_means);
    result.ci95 = student_t_ci95(result.per_replication_means);
    result.mean_queue_length = mean_of(queue_means);
    result.queue_length_ci95 = student_t_ci95(queue_means);
    pool_states(time_avg, time_weights, result.time_avg_distribution, result.time_avg_se);
    pool_states(arrival_obs, arrival_weights, result.arrival_observed_distribution,
                result.arrival_observed_se);
    pool_states(departures, block_weights, result.departure_distribution, result.departure_se);

    std::int64_t empty = 0;
    for (const auto& rep : reps) empty += rep.empty_blocks;
    result.empty_block_fraction =
        static_cast<double>(empty) / static_cast<double>(result.measured_blocks);
    result.overloaded = config.rho() >= 1.0;
    result.replications = std::move(reps);
    return result;
}

}  // namespace blobq::sim
