// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace blobq::analytic {

/// Parameters of the clocked batch-service queue.
///
/// Arrivals are Poisson with rate `lambda` (1/s), blocks are produced every
/// `tau` seconds and each block serves at most `B` single-blob transactions.
/// `n_max` bounds the queue length kept in the truncated chain.
struct ModelParams {
    double lambda = 0.0;
    double tau = 12.0;
    int B = 6;
    int n_max = 0;

    /// Offered load per blob slot, lambda * tau / B.
    double rho() const noexcept { return lambda * tau / static_cast<double>(B); }

    /// Throws Error(InvalidParameter) on nonpositive tau, negative lambda,
    /// B < 1 or n_max < B. Stability is checked separately by the solver.
    void validate() const;
};

/// Poisson probabilities of k arrivals during one block interval.
///
/// `alphas[k]` is P(k arrivals), `betas[j]` the cumulative sum up to j and
/// `tails[j]` the complementary mass sum_{k > j} alphas[k], accumulated from
/// the far tail so it stays accurate when it is tiny. All three vectors have
/// length K + 1, where K is the smallest index whose tail is below the
/// requested tolerance.
struct EpochArrivalPMF {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> tails;
    double mean = 0.0;

    std::size_t max_index() const noexcept { return alphas.size() - 1; }

    /// alpha_k, zero past the truncation point.
    double alpha(std::size_t k) const noexcept { return k < alphas.size() ? alphas[k] : 0.0; }

    /// beta_j, saturating at beta_K past the truncation point.
    double beta(std::size_t j) const noexcept {
        return j < betas.size() ? betas[j] : betas.back();
    }
};

EpochArrivalPMF epoch_arrival_pmf(double lambda, double tau, double tail_tol = 1e-15);

/// Transition matrix of the chain embedded just after each block.
///
/// Dense, row-major, (n_max + 1) x (n_max + 1). Row i is the distribution of
/// the number left behind by the next block given i were left by this one.
class TransitionMatrix {
public:
    TransitionMatrix(int n_max, int B);

    int n_max() const noexcept { return n_max_; }
    int batch_size() const noexcept { return B_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(n_max_) + 1; }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        return entries_[i * dimension() + j];
    }
    double& operator()(std::size_t i, std::size_t j) noexcept {
        return entries_[i * dimension() + j];
    }

    std::span<const double> row(std::size_t i) const noexcept {
        return {entries_.data() + i * dimension(), dimension()};
    }

    std::span<const double> data() const noexcept { return entries_; }

private:
    int n_max_;
    int B_;
    std::vector<double> entries_;
};

/// Builds the embedded-chain matrix for capacity B truncated at n_max.
///
/// Row i <= B sends mass beta_{B-i} to state 0; every reachable j >= 1 gets
/// alpha_{j-i+B}; entries with j < i - B are zero. Whatever probability lies
/// beyond column n_max is folded into the last column so each row sums to 1.
TransitionMatrix build_transition_matrix(const EpochArrivalPMF& pmf, int B, int n_max);

enum class DistributionKind { DepartureEmbedded, TimeStationary };

struct StateDistribution {
    std::vector<double> probs;
    DistributionKind kind = DistributionKind::DepartureEmbedded;
    // Mass missing before renormalization (zero for the embedded solve).
    double normalization_deficit = 0.0;

    double mean() const noexcept;
};

/// Stationary distribution of the embedded chain, pi+ P = pi+.
///
/// Solved directly by state reduction (Grassmann-Taksar-Heyman), exploiting
/// that row i has no mass left of column i - B. The result is checked against
/// `residual_tol` in the l1 norm; a larger residual raises NoConvergenceError.
StateDistribution stationary_departure_distribution(const TransitionMatrix& P,
                                                    double residual_tol = 1e-12);

/// l1 norm of pi P - pi.
double stationary_residual(const TransitionMatrix& P, std::span<const double> pi);

/// Mixing weights c_m = (1/tau) * integral_0^tau Poisson(m; lambda x) dx,
/// the probability that m arrivals happened since the last block at a
/// uniformly random instant of the block interval.
struct ElapsedTimeKernel {
    std::vector<double> coeffs;
    double mean = 0.0;
};

/// Evaluates c_0..c_M as P(m + 1, lambda tau) / (lambda tau), with the
/// regularized lower incomplete gamma values taken from the recurrence
/// P(m + 1, z) = P(m + 2, z) + z^(m+1) e^(-z) / (m+1)! run downward from
/// the far tail. lambda must be positive.
ElapsedTimeKernel elapsed_time_kernel(double lambda, double tau, int M);

/// Distribution of the queue length at an arbitrary instant: the discrete
/// convolution of pi+ with the elapsed-time kernel, renormalized over the
/// truncated range. By PASTA it is also what an arriving transaction sees.
StateDistribution time_stationary_distribution(const StateDistribution& pi_plus,
                                               const ElapsedTimeKernel& kernel);

struct QueueMetrics {
    double lambda = 0.0;
    double tau = 0.0;
    int B = 0;
    double rho = 0.0;
    double N = 0.0;  // mean number in system
    double T = 0.0;  // mean sojourn, seconds
    int n_max_used = 0;
    double tail_mass = 0.0;  // time-stationary mass in the top 10% of states
    double normalization_deficit = 0.0;
};

/// Mean queue length and, through Little's law, mean delay.
QueueMetrics metrics(const StateDistribution& pi_bar, const ModelParams& params);

/// Probability held by the top 10% of states of a truncated distribution.
double upper_decile_mass(std::span<const double> probs) noexcept;

}  // namespace blobq::analytic
