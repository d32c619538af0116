#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bornlab/exact.hpp"
#include "bornlab/linalg.hpp"

namespace bornlab {

/// Which inputs an assignment reads. An assignment that does not consume the
/// context gives the same value for an operator in every context.
struct Consumes {
    bool op = true;
    bool context = false;
    bool state = false;
    bool tags = false;
};

enum class Domain { Operators, QuadScalars };
enum class StateKind { Mixed, Pure };

/// Arguments for one evaluation mu(A | context, state, tags). Tags, when
/// present, are aligned with the context members.
struct EvalInput {
    const HermitianOperator &op;
    const Context *context = nullptr;
    const State *state = nullptr;
    std::span<const ProbabilityTag> tags = {};
};

struct Value {
    XReal real;
    /// Present when the assignment's value is exactly representable in Q(sqrt2).
    std::optional<QuadRational> exact;
};

/// A measurement-assignment function mu: operator (and optionally context,
/// state, exact probability tags) to the extended reals.
class Assignment {
  public:
    virtual ~Assignment() = default;

    [[nodiscard]] virtual std::string_view name() const = 0;
    [[nodiscard]] virtual Consumes consumes() const = 0;
    [[nodiscard]] virtual Domain domain() const { return Domain::Operators; }
    [[nodiscard]] virtual StateKind preferred_state() const { return StateKind::Mixed; }
    [[nodiscard]] virtual bool defined_in_dim(std::size_t /*d*/) const { return true; }

    [[nodiscard]] virtual Value evaluate(const EvalInput &in) const = 0;
    /// Only meaningful for the Q(sqrt2)-domain assignment.
    [[nodiscard]] virtual QuadRational evaluate_scalar(const QuadRational &x) const;
};

// --- Free-standing evaluators -------------------------------------------------

/// Tr[rho A] for an effect A.
double born_eval(const State &state, const HermitianOperator &a);
/// (Tr[A] / d)^2.
double trace_squared_eval(const HermitianOperator &a, std::size_t d);

/// Indices of the context members whose sum is A (within 1e-9); throws
/// not-in-context-algebra otherwise.
std::vector<std::size_t> match_subset(const HermitianOperator &a, const Context &ctx);
/// k / N, where A is the sum of k of the N members of a complete context.
Rational equal_rule_eval(const HermitianOperator &a, const Context &ctx);

/// |<psi|x_i>|^4 / sum_j |<psi|x_j>|^4 over a rank-one basis of C^2.
double deutsch_quartic_eval(const PureState &psi, std::size_t i, const Context &basis);

/// Follows the tag when it is rational, sqrt2 otherwise.
QuadRational zurek_patch_value(std::span<const ProbabilityTag> tags, std::size_t i);
double zurek_patch_eval(std::span<const ProbabilityTag> tags, std::size_t i);
/// Throws invalid-tags unless the tags' real embeddings sum to 1 within 1e-12.
void validate_tags(std::span<const ProbabilityTag> tags);

/// Bloch-sphere step: 1 on the open northern hemisphere, 0 on the southern,
/// 1/2 on the equator (|z| <= 1e-12).
Rational bloch_hemisphere_eval(const PureState &x);

/// f(a + b sqrt2) = c1 a + c2 b sqrt2: the additive function fixed by its
/// values on the two Q-independent directions 1 and sqrt2.
QuadRational two_slope_eval(const QuadRational &x, const Rational &c1, const Rational &c2);

// --- Catalog ------------------------------------------------------------------

/// Stable identifiers: born, trace-squared, equal-rule, deutsch-quartic,
/// zurek-patch, bloch-hemisphere, two-slope.
std::vector<std::string> assignment_names();
/// The six operator-domain assignments tabulated in the property matrix.
std::vector<std::string> matrix_assignment_names();
std::unique_ptr<Assignment> make_assignment(std::string_view name);
std::unique_ptr<Assignment> make_two_slope(const Rational &c1, const Rational &c2);
/// Constant mu = value on every operator.
std::unique_ptr<Assignment> make_constant(double value);

} // namespace bornlab
