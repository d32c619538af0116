#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bornlab/assignments.hpp"
#include "bornlab/sampling.hpp"

namespace bornlab {

enum class Status { Holds, Fails, NotApplicable };
std::string_view to_string(Status s);

/// Enough to replay a single failing trial: the trial's own seed and
/// dimension, what was compared, and the values on both sides.
struct Witness {
    std::size_t trial = 0;
    std::size_t dim = 0;
    std::uint64_t trial_seed = 0;
    std::string description;
    std::vector<std::pair<std::string, double>> values;
    std::vector<std::pair<std::string, std::string>> exact_values;
    double discrepancy = 0.0;
};

struct PropertyVerdict {
    std::string property;
    std::string assignment;
    Status status = Status::NotApplicable;
    std::optional<Witness> witness;
    double max_discrepancy = 0.0;
    std::size_t trials = 0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    /// Every comparison was made in exact arithmetic.
    bool exact = false;
    std::vector<std::string> notes;

    [[nodiscard]] bool holds() const { return status == Status::Holds; }
    [[nodiscard]] bool fails() const { return status == Status::Fails; }
};

struct CheckConfig {
    std::vector<std::size_t> dims{2, 3, 4, 5};
    /// Trials per dimension; trials cycle through the dimensions in order.
    std::size_t trials = 200;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    TagPolicy tags = TagPolicy::Mixed;
};

/// Property identifiers in report order.
std::vector<std::string> property_names();

PropertyVerdict check_additivity(const Assignment &a, const CheckConfig &cfg);
PropertyVerdict check_onc(const Assignment &a, const CheckConfig &cfg);
PropertyVerdict check_anc(const Assignment &a, const CheckConfig &cfg);
/// |mu(I) - 1| <= 1e-10, one rank-one basis context per dimension.
PropertyVerdict check_normalization(const Assignment &a, const CheckConfig &cfg);
PropertyVerdict check_strong_normalization(const Assignment &a, const CheckConfig &cfg);
/// Every sampled value >= -1e-12.
PropertyVerdict check_nonnegativity(const Assignment &a, const CheckConfig &cfg);
PropertyVerdict check_state_affinity(const Assignment &a, const CheckConfig &cfg);
/// Dispatch by identifier; unknown names throw unknown-identifier.
PropertyVerdict check_property(const Assignment &a, std::string_view property, const CheckConfig &cfg);

struct Lemma1Record {
    std::string assignment;
    std::optional<bool> strong_normalization;
    std::optional<bool> additivity;
    std::optional<bool> normalization;
    bool skipped = false;
    std::string reason;
    bool consistent = true;
};

/// strongNorm == (additive && normalized) on the sampled instances.
Lemma1Record lemma1_crosscheck(const Assignment &a, const CheckConfig &cfg);

struct FrameWeightResult {
    PropertyVerdict verdict;
    /// (subspace dimension, weight of the first sampled basis).
    std::vector<std::pair<std::size_t, double>> weights;
};

/// For each subspace dimension k, a fixed random k-dimensional subspace and
/// state; the summed values over random orthonormal bases of it must agree.
FrameWeightResult frame_weight_check(const Assignment &a, std::size_t d,
                                     const std::vector<std::size_t> &subspace_dims, std::size_t trials,
                                     double tol, std::uint64_t seed, TagPolicy tags = TagPolicy::Rational);

// --- Continuity probes --------------------------------------------------------

enum class ProbePath { AmplitudeSweep, ScalingSweep, FrameRotation };
std::string_view to_string(ProbePath p);
ProbePath parse_probe_path(std::string_view s);

struct ProbePoint {
    QuadRational param;
    double param_real = 0.0;
    double value = 0.0;
    std::optional<QuadRational> exact;
};

struct Jump {
    std::size_t left = 0; // index into the sorted series; the pair is (left, left + 1)
    double dparam = 0.0;
    double dvalue = 0.0;
};

struct ProbeResult {
    std::string assignment;
    ProbePath path = ProbePath::AmplitudeSweep;
    std::vector<ProbePoint> series; // sorted by real parameter
    std::vector<Jump> jumps;
    double tolerance = 0.0;
    double grid_step = 0.0;
    [[nodiscard]] double max_jump() const;
};

/// amplitude-sweep: psi(t) = sqrt(t) x1 + sqrt(1 - t) x2 with tags (t, 1 - t),
/// value mu(x1). scaling-sweep: mu(x A) for a fixed rank-one A (or f(x) on
/// Q(sqrt2)). frame-rotation: mu(x1(theta)) for the d = 2 basis rotated by
/// theta. Jumps are adjacent pairs with |dmu| > tol and |dparam| no larger
/// than the mean grid step.
ProbeResult continuity_probe(const Assignment &a, ProbePath path, const std::vector<QuadRational> &grid,
                             double tol, std::uint64_t seed = 0);

// --- Property matrix ------------------------------------------------------------

struct PropertyMatrix {
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::vector<PropertyVerdict>> cells;
    std::vector<std::vector<double>> wall_seconds;
};

/// Seed of one matrix cell, derived from the scenario seed by hashing the
/// check identifier so the schedule cannot change results.
std::uint64_t cell_seed(std::uint64_t base, std::string_view assignment, std::string_view property);

/// `tolerances` overrides cfg.tol per property; the fixed floors of
/// normalization and non-negativity are unaffected.
PropertyMatrix build_property_matrix(const std::vector<std::string> &assignments,
                                     const std::vector<std::string> &properties, const CheckConfig &cfg,
                                     std::size_t jobs = 1, const std::map<std::string, double> &tolerances = {});

} // namespace bornlab
