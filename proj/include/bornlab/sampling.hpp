#pragma once

#include <optional>
#include <vector>

#include "bornlab/assignments.hpp"
#include "bornlab/exact.hpp"
#include "bornlab/linalg.hpp"

namespace bornlab {

enum class TagPolicy { None, Rational, Mixed };

/// One sampled piece of a context: block projectors over an orthonormal frame
/// of some subspace, and (when tagging) the exact weight of the pivot state on
/// each block.
struct Piece {
    Matrix frame;                        // d x m, orthonormal columns
    std::vector<std::size_t> block_sizes;
    std::vector<HermitianOperator> members;
    std::vector<QuadRational> tags;      // empty unless tagging
    [[nodiscard]] Matrix block_basis(std::size_t j) const;
};

/// Positive exact weights summing to `total`: total * n_j / sum(n) with small
/// random integers n_j.
std::vector<QuadRational> random_exact_weights(const QuadRational &total, std::size_t count, Rng &rng);

/// Moves +-s*sqrt2 between two weights (s rational, |s sqrt2| below a third of
/// the smallest weight), so the total is unchanged and positivity survives.
void inject_sqrt2_pair(std::vector<QuadRational> &weights, Rng &rng);

/// Random orthonormal frame of span(basis), cut into consecutive blocks, such
/// that the projection of psi onto block j has squared norm weights[j]. The
/// weights must add up to |P psi|^2 where P projects onto span(basis).
Matrix weighted_frame(const Matrix &basis, const Vector &psi, const std::vector<double> &weights,
                      const std::vector<std::size_t> &block_sizes, Rng &rng);

/// Random block sizes (each >= 1) summing to m.
std::vector<std::size_t> random_block_sizes(std::size_t m, std::size_t n_blocks, Rng &rng);

/// Draws everything one trial needs: a state matching the assignment's
/// preference and, for tag-consuming assignments, a pure pivot state relative
/// to which all sampled members carry exact tags.
class TrialSampler {
  public:
    TrialSampler(const Assignment &a, std::size_t d, TagPolicy policy, Rng &rng);

    [[nodiscard]] std::size_t dim() const { return d_; }
    [[nodiscard]] bool tagging() const { return tagging_; }
    [[nodiscard]] const State *state() const { return state_ ? &*state_ : nullptr; }

    /// Splits span(basis) into blocks. `total` is the exact tag of the whole
    /// subspace (ignored unless tagging). Under the mixed policy a sqrt2 pair
    /// is moved between two blocks before the frame is built.
    Piece split(const Matrix &basis, const std::vector<std::size_t> &block_sizes,
                const QuadRational &total);
    /// Split of the whole space.
    Piece split_all(const std::vector<std::size_t> &block_sizes) {
        return split(Matrix::Identity(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_)),
                     block_sizes, QuadRational(1));
    }
    /// Concatenates pieces into one context; tags follow members.
    [[nodiscard]] static Context join(const std::vector<const Piece *> &pieces);
    [[nodiscard]] static std::vector<ProbabilityTag> join_tags(const std::vector<const Piece *> &pieces);

    Rng &rng() { return rng_; }

  private:
    std::size_t d_;
    bool tagging_ = false;
    TagPolicy policy_;
    Rng &rng_;
    std::optional<State> state_;
    std::optional<PureState> pivot_;
};

} // namespace bornlab
