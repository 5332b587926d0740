// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blobq/analytic/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blobq/error.hpp"

namespace blobq::analytic {
namespace {

// Below this mean e^{-z} is comfortably representable and the textbook
// forward recurrence from alpha_0 is used; above it the walk starts at the mode.
constexpr double kForwardRecurrenceLimit = 600.0;

[[noreturn]] void invalid(const std::string& message) {
    throw Error(ErrorKind::InvalidParameter, message);
}

// Poisson(z) probabilities from k = 0 until they underflow past the mean,
// with at least `min_len` entries.
std::vector<double> poisson_terms(double z, std::size_t min_len) {
    std::vector<double> terms;
    if (z == 0.0) {
        terms.assign(std::max<std::size_t>(min_len, 1), 0.0);
        terms[0] = 1.0;
        return terms;
    }

    std::size_t start = 0;
    double start_value = std::exp(-z);
    if (z > kForwardRecurrenceLimit) {
        start = static_cast<std::size_t>(std::floor(z));
        const double m = static_cast<double>(start);
        start_value = std::exp(-z + m * std::log(z) - std::lgamma(m + 1.0));
    }

    terms.resize(start + 1);
    terms[start] = start_value;
    for (std::size_t k = start; k > 0; --k) {
        terms[k - 1] = terms[k] * static_cast<double>(k) / z;
    }

    double term = start_value;
    for (std::size_t k = start;; ++k) {
        const bool past_mean = static_cast<double>(k) > z;
        if (past_mean && term == 0.0 && terms.size() >= min_len) break;
        term *= z / static_cast<double>(k + 1);
        terms.push_back(term);
    }
    return terms;
}

// tails[j] = sum_{k > j} terms[k], accumulated from the end.
std::vector<double> upper_tails(const std::vector<double>& terms) {
    std::vector<double> tails(terms.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = terms.size(); j-- > 0;) {
        tails[j] = acc;
        acc += terms[j];
    }
    return tails;
}

}  // namespace

void ModelParams::validate() const {
    if (!(std::isfinite(lambda) && lambda >= 0.0)) invalid("lambda must be finite and >= 0");
    if (!(std::isfinite(tau) && tau > 0.0)) invalid("tau must be finite and > 0");
    if (B < 1) invalid("B must be >= 1");
    if (n_max < B) invalid("n_max must be >= B");
}

EpochArrivalPMF epoch_arrival_pmf(double lambda, double tau, double tail_tol) {
    if (!(std::isfinite(lambda) && lambda >= 0.0)) invalid("lambda must be finite and >= 0");
    if (!(std::isfinite(tau) && tau > 0.0)) invalid("tau must be finite and > 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) invalid("tail tolerance must lie in (0, 1)");

    const double z = lambda * tau;
    auto alphas = poisson_terms(z, 1);
    auto tails = upper_tails(alphas);

    std::size_t K = 0;
    while (K + 1 < alphas.size() && !(tails[K] < tail_tol)) ++K;
    alphas.resize(K + 1);
    tails.resize(K + 1);

    std::vector<double> betas(K + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
        acc += alphas[k];
        betas[k] = acc;
    }

    return EpochArrivalPMF{std::move(alphas), std::move(betas), std::move(tails), z};
}

TransitionMatrix::TransitionMatrix(int n_max, int B) : n_max_(n_max), B_(B) {
    if (B < 1) invalid("B must be >= 1");
    if (n_max < B) invalid("n_max must be >= B");
    entries_.assign(dimension() * dimension(), 0.0);
}

TransitionMatrix build_transition_matrix(const EpochArrivalPMF& pmf, int B, int n_max) {
    TransitionMatrix P(n_max, B);
    const std::size_t last = static_cast<std::size_t>(n_max);
    const std::size_t batch = static_cast<std::size_t>(B);

    for (std::size_t i = 0; i <= last; ++i) {
        double row_sum = 0.0;
        if (i <= batch) {
            P(i, 0) = pmf.beta(batch - i);
            row_sum += P(i, 0);
        }
        const std::size_t first = std::max<std::size_t>(1, i > batch ? i - batch : 0);
        for (std::size_t j = first; j < last; ++j) {
            P(i, j) = pmf.alpha(j + batch - i);
            row_sum += P(i, j);
        }
        const std::size_t beyond = last + batch - i - 1;
        P(i, last) = beyond < pmf.tails.size() ? pmf.tails[beyond] : std::max(0.0, 1.0 - row_sum);
    }
    return P;
}

double StateDistribution::mean() const noexcept {
    double acc = 0.0;
    for (std::size_t n = 0; n < probs.size(); ++n) acc += static_cast<double>(n) * probs[n];
    return acc;
}

double stationary_residual(const TransitionMatrix& P, std::span<const double> pi) {
    const std::size_t D = P.dimension();
    std::vector<double> product(D, 0.0);
    for (std::size_t i = 0; i < D; ++i) {
        if (pi[i] == 0.0) continue;
        const auto row = P.row(i);
        for (std::size_t j = 0; j < D; ++j) product[j] += pi[i] * row[j];
    }
    double residual = 0.0;
    for (std::size_t j = 0; j < D; ++j) residual += std::abs(product[j] - pi[j]);
    return residual;
}

StateDistribution stationary_departure_distribution(const TransitionMatrix& P,
                                                    double residual_tol) {
    const std::size_t D = P.dimension();
    const std::size_t batch = static_cast<std::size_t>(P.batch_size());

    std::vector<double> W(P.data().begin(), P.data().end());
    auto at = [&](std::size_t i, std::size_t j) -> double& { return W[i * D + j]; };

    // Censor states from the top down. Row n only has mass in columns
    // [n - B, n) below the diagonal, and elimination never widens that band.
    std::vector<double> exit_mass(D, 0.0);
    for (std::size_t n = D - 1; n > 0; --n) {
        const std::size_t lo = n > batch ? n - batch : 0;
        double s = 0.0;
        for (std::size_t j = lo; j < n; ++j) s += at(n, j);
        if (!(s > 0.0)) {
            throw NoConvergenceError("embedded chain is reducible at state " + std::to_string(n),
                                     std::numeric_limits<double>::infinity());
        }
        exit_mass[n] = s;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = at(i, n) / s;
            if (f == 0.0) continue;
            double* dst = &at(i, lo);
            const double* src = &at(n, lo);
            for (std::size_t j = 0; j < n - lo; ++j) dst[j] += f * src[j];
        }
    }

    std::vector<double> pi(D, 0.0);
    pi[0] = 1.0;
    double total = 1.0;
    for (std::size_t n = 1; n < D; ++n) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += pi[i] * at(i, n);
        pi[n] = acc / exit_mass[n];
        total += pi[n];
    }
    for (double& p : pi) p /= total;

    const double residual = stationary_residual(P, pi);
    if (!(residual < residual_tol)) {
        std::ostringstream msg;
        msg << "stationary residual " << residual << " exceeds tolerance " << residual_tol;
        throw NoConvergenceError(msg.str(), residual);
    }
    return StateDistribution{std::move(pi), DistributionKind::DepartureEmbedded, 0.0};
}

ElapsedTimeKernel elapsed_time_kernel(double lambda, double tau, int M) {
    if (!(std::isfinite(lambda) && lambda > 0.0)) {
        invalid("elapsed-time kernel needs lambda > 0");
    }
    if (!(std::isfinite(tau) && tau > 0.0)) invalid("tau must be finite and > 0");
    if (M < 0) invalid("kernel length must be >= 0");

    const double z = lambda * tau;
    const auto terms = poisson_terms(z, static_cast<std::size_t>(M) + 2);
    const auto tails = upper_tails(terms);

    ElapsedTimeKernel kernel;
    kernel.mean = z;
    kernel.coeffs.resize(static_cast<std::size_t>(M) + 1);
    for (std::size_t m = 0; m < kernel.coeffs.size(); ++m) kernel.coeffs[m] = tails[m] / z;
    return kernel;
}

StateDistribution time_stationary_distribution(const StateDistribution& pi_plus,
                                               const ElapsedTimeKernel& kernel) {
    if (pi_plus.kind != DistributionKind::DepartureEmbedded) {
        invalid("time-stationary distribution needs the departure-embedded distribution");
    }
    const std::size_t D = pi_plus.probs.size();
    if (kernel.coeffs.size() < D) invalid("kernel shorter than the state space");

    std::vector<double> pi_bar(D, 0.0);
    double total = 0.0;
    for (std::size_t n = 0; n < D; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= n; ++k) acc += pi_plus.probs[k] * kernel.coeffs[n - k];
        pi_bar[n] = acc;
        total += acc;
    }
    for (double& p : pi_bar) p /= total;
    return StateDistribution{std::move(pi_bar), DistributionKind::TimeStationary, 1.0 - total};
}

double upper_decile_mass(std::span<const double> probs) noexcept {
    const std::size_t D = probs.size();
    const std::size_t count = (D + 9) / 10;
    double acc = 0.0;
    for (std::size_t n = D - count; n < D; ++n) acc += probs[n];
    return acc;
}

QueueMetrics metrics(const StateDistribution& pi_bar, const ModelParams& params) {
    if (!(std::isfinite(params.lambda) && params.lambda > 0.0)) {
        invalid("delay is undefined without arrivals (lambda must be > 0)");
    }
    if (pi_bar.kind != DistributionKind::TimeStationary) {
        invalid("metrics need the time-stationary distribution");
    }
    QueueMetrics m;
    m.lambda = params.lambda;
    m.tau = params.tau;
    m.B = params.B;
    m.rho = params.rho();
    m.N = pi_bar.mean();
    m.T = m.N / params.lambda;
    m.n_max_used = static_cast<int>(pi_bar.probs.size()) - 1;
    m.tail_mass = upper_decile_mass(pi_bar.probs);
    m.normalization_deficit = pi_bar.normalization_deficit;
    return m;
}

}  // namespace blobq::analytic
