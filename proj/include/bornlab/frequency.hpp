#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bornlab/linalg.hpp"

namespace bornlab {

/// Outcome probabilities p_i, target outcome k and number of copies N.
struct FrequencySpec {
    std::vector<double> probabilities;
    std::size_t k = 0;
    std::size_t copies = 1;
};

/// Throws invalid-spec unless sum p = 1 within 1e-12, each p in [0, 1],
/// k indexes an outcome and N >= 1.
void validate(const FrequencySpec &spec);

struct FrequencyMoments {
    double mean = 0.0;     // E[m / N]
    double variance = 0.0; // E[(m / N - mean)^2]
    double deviation = 0.0; // E[(m / N - p)^2]
};

/// Moments of m / N for m ~ Binomial(N, p), by compensated summation of the
/// probability mass function outward from its mode.
FrequencyMoments binomial_frequency_moments(double p, std::size_t n);

/// ||(f_N^k - p_k) psi^{(x)N}|| from the binomial sum, never forming the
/// d^N-dimensional space.
double frequency_deviation_norm(const FrequencySpec &spec);

/// sqrt(p (1 - p) / N).
double frequency_deviation_closed_form(double p, std::size_t n);

inline constexpr std::size_t kBruteForceLimit = 2'000'000;

/// Expands psi^{(x)N} explicitly, applies the diagonal frequency weights and
/// returns the deviation norm; d^N above two million throws size-limit.
double frequency_apply_bruteforce(const PureState &psi, std::size_t k, std::size_t n);

struct ConvergenceSeries {
    std::vector<std::pair<std::size_t, double>> points;
    std::optional<double> slope;
    std::optional<double> prefactor;
    /// Every value is exactly zero, so no slope exists.
    bool exact_convergence = false;
};

/// Least-squares line through (log N, log value); leaves slope empty when any
/// value is non-positive, and flags exact convergence when all are zero.
void fit_log_log(ConvergenceSeries &series);

/// Deviation norms for the outcome probability p over a strictly increasing
/// grid of at least four copy counts.
ConvergenceSeries hartle_convergence_study(const FrequencySpec &base, const std::vector<std::size_t> &grid);

struct MixtureComponent {
    double weight;
    PureState psi;
};

struct MixtureGap {
    /// Var(f_N^k) under rho^{(x)N}.
    ConvergenceSeries product_of_mixture;
    /// Var(f_N^k) under sum_j p_j (psi_j psi_j^dagger)^{(x)N}.
    ConvergenceSeries mixture_of_products;
    std::vector<double> q;       // q_j = |<x_k|psi_j>|^2
    double q_mean = 0.0;         // sum_j p_j q_j
    double q_variance = 0.0;     // Var_j(q_j), the second series' limit
    /// E[f_N^k] under each construction at every grid point.
    std::vector<std::pair<double, double>> expectations;
};

MixtureGap mixed_variance_gap(const std::vector<MixtureComponent> &mixture, std::size_t k,
                              const std::vector<std::size_t> &n_grid);
/// Same, from weights and per-component probabilities q_j of outcome k; each
/// component is realized as sqrt(q_j)|x_0> + sqrt(1 - q_j)|x_1>.
MixtureGap mixed_variance_gap(const std::vector<double> &weights, const std::vector<double> &q,
                              const std::vector<std::size_t> &n_grid);

} // namespace bornlab
