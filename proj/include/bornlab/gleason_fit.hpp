#pragma once

#include <cstdint>
#include <string_view>

#include "bornlab/assignments.hpp"
#include "bornlab/linalg.hpp"

namespace bornlab {

struct FitResult {
    HermitianOperator rho_hat;
    double residual_rms = 0.0;
    /// Ratio of extreme singular values of the design matrix.
    double condition = 0.0;
    std::size_t sample_count = 0;
    /// Tr rho_hat, the frame weight W; the trace is not constrained in the fit.
    double weight = 0.0;
};

/// Least-squares fit of <x|rho|x> to mu(|x><x|) over every vector of
/// `n_frames` Haar-random orthonormal bases. State-consuming assignments are
/// evaluated at `state`, or at a seeded random density matrix when none is
/// given. No regularization is applied.
FitResult fit_density(const Assignment &a, std::size_t d, std::size_t n_frames, std::uint64_t seed,
                      const State *state = nullptr);

/// Real coordinates of a Hermitian matrix over the basis used by the fit:
/// diagonal entries, then 2 Re and 2 Im of each upper off-diagonal pair.
Eigen::VectorXd hermitian_design_row(const Vector &x);

enum class Regularity { Regular, NonRegular };
std::string_view to_string(Regularity r);

inline constexpr double kDefaultRegularityThreshold = 1e-6;
Regularity regularity_verdict(const FitResult &fit, double threshold = kDefaultRegularityThreshold);

} // namespace bornlab
