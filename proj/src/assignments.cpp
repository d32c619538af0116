#include "bornlab/assignments.hpp"

#include <algorithm>
#include <cmath>

namespace bornlab {

namespace {

constexpr double kMatchTol = 1e-9;
constexpr double kEquatorTol = 1e-12;
constexpr double kTagSumTol = 1e-12;

const Context &require_context(const EvalInput &in, std::string_view who) {
    if (in.context == nullptr) {
        throw Error(ErrorKind::InvalidSpec, std::string(who) + " needs a context");
    }
    return *in.context;
}

const State &require_state(const EvalInput &in, std::string_view who) {
    if (in.state == nullptr) {
        throw Error(ErrorKind::InvalidState, std::string(who) + " needs a state");
    }
    return *in.state;
}

void require_effect(const HermitianOperator &a) {
    if (!a.is_effect()) {
        throw Error(ErrorKind::InvalidOperator, "operator is not an effect");
    }
}

class Born final : public Assignment {
  public:
    std::string_view name() const override { return "born"; }
    Consumes consumes() const override { return {true, false, true, false}; }
    Value evaluate(const EvalInput &in) const override {
        return {born_eval(require_state(in, name()), in.op), std::nullopt};
    }
};

class TraceSquared final : public Assignment {
  public:
    std::string_view name() const override { return "trace-squared"; }
    Consumes consumes() const override { return {true, false, false, false}; }
    Value evaluate(const EvalInput &in) const override {
        return {trace_squared_eval(in.op, in.op.dim()), std::nullopt};
    }
};

class EqualRule final : public Assignment {
  public:
    std::string_view name() const override { return "equal-rule"; }
    Consumes consumes() const override { return {true, true, false, false}; }
    Value evaluate(const EvalInput &in) const override {
        const Rational v = equal_rule_eval(in.op, require_context(in, name()));
        return {to_double(v), QuadRational(v)};
    }
};

// Quartic weights on an arbitrary complete context: w_i = Tr[rho A_i]^2 and
// mu(A) = sum_{i in S} w_i / sum_j w_j where A is the sum of members S.
class DeutschQuartic final : public Assignment {
  public:
    std::string_view name() const override { return "deutsch-quartic"; }
    Consumes consumes() const override { return {true, true, true, false}; }
    StateKind preferred_state() const override { return StateKind::Pure; }
    Value evaluate(const EvalInput &in) const override {
        const Context &ctx = require_context(in, name());
        const State &state = require_state(in, name());
        if (!ctx.complete()) {
            throw Error(ErrorKind::InvalidSpec, "deutsch-quartic needs a complete context");
        }
        const auto subset = match_subset(in.op, ctx);
        double num = 0.0;
        double den = 0.0;
        std::vector<bool> in_subset(ctx.size(), false);
        for (auto i : subset) {
            in_subset[i] = true;
        }
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            const double p = (state.rho() * ctx[i].matrix()).trace().real();
            const double w = p * p;
            den += w;
            if (in_subset[i]) {
                num += w;
            }
        }
        if (den <= 0.0) {
            throw Error(ErrorKind::InvalidState, "quartic weights vanish on every member");
        }
        return {num / den, std::nullopt};
    }
};

class ZurekPatch final : public Assignment {
  public:
    std::string_view name() const override { return "zurek-patch"; }
    Consumes consumes() const override { return {true, true, false, true}; }
    Value evaluate(const EvalInput &in) const override {
        const Context &ctx = require_context(in, name());
        if (in.tags.empty()) {
            throw Error(ErrorKind::MissingTags, "zurek-patch needs probability tags");
        }
        if (in.tags.size() != ctx.size()) {
            throw Error(ErrorKind::InvalidTags, "tag count does not match context size");
        }
        validate_tags(in.tags);
        QuadRational t;
        for (auto i : match_subset(in.op, ctx)) {
            t += in.tags[i].value();
        }
        const QuadRational v = t.is_rational() ? t : QuadRational::sqrt2();
        return {v.to_double(), v};
    }
};

class BlochHemisphere final : public Assignment {
  public:
    std::string_view name() const override { return "bloch-hemisphere"; }
    Consumes consumes() const override { return {true, false, false, false}; }
    bool defined_in_dim(std::size_t d) const override { return d == 2; }
    Value evaluate(const EvalInput &in) const override {
        const HermitianOperator &a = in.op;
        if (a.dim() != 2) {
            throw Error(ErrorKind::NotApplicable, "bloch-hemisphere is defined in dimension 2 only");
        }
        const Matrix &m = a.matrix();
        if (m.norm() <= tol::projector) {
            return {0.0, QuadRational(0)};
        }
        if (frobenius_distance(m, Matrix::Identity(2, 2)) <= tol::projector) {
            return {1.0, QuadRational(1)};
        }
        if (!a.is_projector() || std::abs(a.trace() - 1.0) > tol::projector) {
            throw Error(ErrorKind::NotApplicable,
                        "bloch-hemisphere is defined on projectors only");
        }
        const double z = m(0, 0).real() - m(1, 1).real();
        const Rational v = z > kEquatorTol ? Rational(1) : (z < -kEquatorTol ? Rational(0) : Rational(1, 2));
        return {to_double(v), QuadRational(v)};
    }
};

class TwoSlope final : public Assignment {
  public:
    TwoSlope(Rational c1, Rational c2) : c1_(std::move(c1)), c2_(std::move(c2)) {}
    std::string_view name() const override { return "two-slope"; }
    Consumes consumes() const override { return {false, false, false, false}; }
    Domain domain() const override { return Domain::QuadScalars; }
    Value evaluate(const EvalInput & /*in*/) const override {
        throw Error(ErrorKind::NotApplicable, "two-slope acts on Q(sqrt2), not on operators");
    }
    QuadRational evaluate_scalar(const QuadRational &x) const override {
        return two_slope_eval(x, c1_, c2_);
    }

  private:
    Rational c1_;
    Rational c2_;
};

class Constant final : public Assignment {
  public:
    explicit Constant(double v) : v_(v) {}
    std::string_view name() const override { return "constant"; }
    Consumes consumes() const override { return {true, false, false, false}; }
    Value evaluate(const EvalInput & /*in*/) const override { return {v_, std::nullopt}; }

  private:
    double v_;
};

} // namespace

QuadRational Assignment::evaluate_scalar(const QuadRational & /*x*/) const {
    throw Error(ErrorKind::NotApplicable, std::string(name()) + " is not defined on Q(sqrt2)");
}

double born_eval(const State &state, const HermitianOperator &a) {
    require_effect(a);
    if (state.dim() != a.dim()) {
        throw Error(ErrorKind::InvalidDims, "state and operator dimensions differ");
    }
    // Only the real part is kept; for Hermitian rho and A the imaginary part is rounding.
    return (state.rho() * a.matrix()).trace().real();
}

double trace_squared_eval(const HermitianOperator &a, std::size_t d) {
    require_effect(a);
    if (d != a.dim()) {
        throw Error(ErrorKind::InvalidDims, "dimension does not match the operator");
    }
    const double t = a.trace() / static_cast<double>(d);
    return t * t;
}

std::vector<std::size_t> match_subset(const HermitianOperator &a, const Context &ctx) {
    if (a.dim() != ctx.dim()) {
        throw Error(ErrorKind::InvalidDims, "operator and context dimensions differ");
    }
    const Matrix &target = a.matrix();
    const auto n = ctx.size();
    if (ctx.projective()) {
        // For A = sum_S P_i with orthogonal P_i: A P_i = P_i on S and 0 elsewhere.
        std::vector<std::size_t> subset;
        Matrix sum = Matrix::Zero(target.rows(), target.cols());
        for (std::size_t i = 0; i < n; ++i) {
            const Matrix &p = ctx[i].matrix();
            if ((target * p - p).norm() <= kMatchTol) {
                subset.push_back(i);
                sum += p;
            }
        }
        if ((sum - target).norm() <= kMatchTol) {
            return subset;
        }
        throw Error(ErrorKind::NotInContextAlgebra, "operator is not a sum of context members");
    }
    if (n > 20) {
        throw Error(ErrorKind::NotInContextAlgebra,
                    "subset search over non-projective contexts is limited to 20 members");
    }
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Matrix sum = Matrix::Zero(target.rows(), target.cols());
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                sum += ctx[i].matrix();
            }
        }
        if ((sum - target).norm() <= kMatchTol) {
            std::vector<std::size_t> subset;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1u << i)) {
                    subset.push_back(i);
                }
            }
            return subset;
        }
    }
    throw Error(ErrorKind::NotInContextAlgebra, "operator is not a sum of context members");
}

Rational equal_rule_eval(const HermitianOperator &a, const Context &ctx) {
    if (!ctx.complete()) {
        throw Error(ErrorKind::InvalidSpec, "the Equal rule needs a complete context");
    }
    const auto k = match_subset(a, ctx).size();
    return Rational(static_cast<long long>(k), static_cast<long long>(ctx.size()));
}

double deutsch_quartic_eval(const PureState &psi, std::size_t i, const Context &basis) {
    if (basis.dim() != 2 || psi.dim() != 2) {
        throw Error(ErrorKind::InvalidDimension, "the quartic counterexample is posed in dimension 2");
    }
    if (basis.size() != 2 || !basis.complete() || !basis.projective() || !basis.rank_one()) {
        throw Error(ErrorKind::InvalidSpec, "basis must be a complete rank-one context of size 2");
    }
    if (i >= 2) {
        throw Error(ErrorKind::InvalidSpec, "outcome index out of range");
    }
    double w[2];
    for (std::size_t j = 0; j < 2; ++j) {
        const double p = psi.vector().dot(basis[j].matrix() * psi.vector()).real();
        w[j] = p * p;
    }
    const double den = w[0] + w[1];
    if (den <= 0.0) {
        throw Error(ErrorKind::InvalidState, "zero quartic denominator");
    }
    return w[i] / den;
}

void validate_tags(std::span<const ProbabilityTag> tags) {
    if (tags.empty()) {
        throw Error(ErrorKind::MissingTags, "empty tag set");
    }
    QuadRational exact;
    for (const auto &t : tags) {
        exact += t.value();
    }
    if (std::abs(exact.to_double() - 1.0) > kTagSumTol) {
        throw Error(ErrorKind::InvalidTags, "tags sum to " + exact.to_string() + ", not 1");
    }
}

QuadRational zurek_patch_value(std::span<const ProbabilityTag> tags, std::size_t i) {
    validate_tags(tags);
    if (i >= tags.size()) {
        throw Error(ErrorKind::InvalidTags, "outcome index out of range");
    }
    return tags[i].is_rational() ? tags[i].value() : QuadRational::sqrt2();
}

double zurek_patch_eval(std::span<const ProbabilityTag> tags, std::size_t i) {
    return zurek_patch_value(tags, i).to_double();
}

Rational bloch_hemisphere_eval(const PureState &x) {
    if (x.dim() != 2) {
        throw Error(ErrorKind::InvalidDimension, "bloch-hemisphere is defined in dimension 2 only");
    }
    const double z = std::norm(x.vector()(0)) - std::norm(x.vector()(1));
    if (z > kEquatorTol) {
        return 1;
    }
    if (z < -kEquatorTol) {
        return 0;
    }
    return Rational(1, 2);
}

QuadRational two_slope_eval(const QuadRational &x, const Rational &c1, const Rational &c2) {
    return {c1 * x.rational_part(), c2 * x.sqrt2_part()};
}

std::vector<std::string> assignment_names() {
    return {"bloch-hemisphere", "born",        "deutsch-quartic", "equal-rule",
            "trace-squared",    "two-slope",   "zurek-patch"};
}

std::vector<std::string> matrix_assignment_names() {
    return {"born", "trace-squared", "equal-rule", "deutsch-quartic", "zurek-patch", "bloch-hemisphere"};
}

std::unique_ptr<Assignment> make_assignment(std::string_view name) {
    if (name == "born") return std::make_unique<Born>();
    if (name == "trace-squared") return std::make_unique<TraceSquared>();
    if (name == "equal-rule") return std::make_unique<EqualRule>();
    if (name == "deutsch-quartic") return std::make_unique<DeutschQuartic>();
    if (name == "zurek-patch") return std::make_unique<ZurekPatch>();
    if (name == "bloch-hemisphere") return std::make_unique<BlochHemisphere>();
    if (name == "two-slope") return std::make_unique<TwoSlope>(Rational(1), Rational(10000));
    throw Error(ErrorKind::UnknownIdentifier, "unknown assignment '" + std::string(name) + "'");
}

std::unique_ptr<Assignment> make_two_slope(const Rational &c1, const Rational &c2) {
    return std::make_unique<TwoSlope>(c1, c2);
}

std::unique_ptr<Assignment> make_constant(double value) { return std::make_unique<Constant>(value); }

} // namespace bornlab
