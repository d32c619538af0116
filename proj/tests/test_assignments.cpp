#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>

#include "bornlab/assignments.hpp"

using namespace bornlab;

namespace {

Vector vec2(Complex a, Complex b) {
    Vector v(2);
    v << a, b;
    return v;
}

HermitianOperator basis_projector(std::size_t d, std::size_t k) {
    return HermitianOperator::rank_one(PureState::basis(d, k).vector());
}

Context computational_context(std::size_t d) {
    std::vector<HermitianOperator> members;
    for (std::size_t k = 0; k < d; ++k) {
        members.push_back(basis_projector(d, k));
    }
    return Context(members);
}

// Random effect: U diag(u_i) U^dagger with u_i uniform in [0, 1].
HermitianOperator random_effect(std::size_t d, Rng &rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Matrix u = haar_random_unitary(d, rng);
    Eigen::VectorXd diag(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        diag(i) = unit(rng);
    }
    const Matrix m = u * diag.cast<Complex>().asDiagonal() * u.adjoint();
    return HermitianOperator(Matrix((m + m.adjoint()) / 2.0));
}

std::vector<ProbabilityTag> tags_of(std::initializer_list<QuadRational> values) {
    std::vector<ProbabilityTag> out;
    for (const auto &v : values) {
        out.push_back(ProbabilityTag::of(v));
    }
    return out;
}

} // namespace

TEST_CASE("born: maximally mixed state gives 1/d") {
    for (std::size_t d = 1; d <= 6; ++d) {
        const State mixed(HermitianOperator::identity(d).scaled(1.0 / static_cast<double>(d)));
        CHECK(born_eval(mixed, basis_projector(d, 0)) == doctest::Approx(1.0 / static_cast<double>(d)).epsilon(1e-14));
    }
}

TEST_CASE("born: equal superposition gives 1/2") {
    const State psi(PureState::normalized(vec2(1.0, 1.0)));
    CHECK(std::abs(born_eval(psi, basis_projector(2, 0)) - 0.5) <= 1e-15);
}

TEST_CASE("born: matches the entrywise double sum") {
    Rng rng(31);
    for (std::size_t d = 2; d <= 6; ++d) {
        const HermitianOperator rho = random_density_matrix(d, rng);
        const HermitianOperator a = random_effect(d, rng);
        Complex sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                sum += rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                       a.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            }
        }
        CHECK(std::abs(sum.imag()) <= 1e-12);
        CHECK(std::abs(born_eval(State(rho), a) - sum.real()) <= 1e-12);
    }
}

TEST_CASE("born: linear in the effect") {
    Rng rng(32);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 2 + static_cast<std::size_t>(t % 5);
        const State rho(random_density_matrix(d, rng));
        const HermitianOperator a = random_effect(d, rng);
        const HermitianOperator b = random_effect(d, rng);
        const double alpha = unit(rng);
        const double beta = 1.0 - alpha;
        const HermitianOperator mix = a.scaled(alpha) + b.scaled(beta);
        REQUIRE(mix.is_effect());
        CHECK(std::abs(born_eval(rho, mix) - alpha * born_eval(rho, a) - beta * born_eval(rho, b)) <= 1e-10);
    }
}

TEST_CASE("born: non-effects are rejected") {
    const State rho(HermitianOperator::identity(2).scaled(0.5));
    try {
        (void)born_eval(rho, HermitianOperator::identity(2).scaled(2.0));
        FAIL("accepted a non-effect");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::InvalidOperator);
    }
}

TEST_CASE("trace-squared: rank-one, identity and the rank-two sum") {
    const auto a = basis_projector(2, 0);
    const auto b = basis_projector(2, 1);
    CHECK(trace_squared_eval(a, 2) == doctest::Approx(0.25));
    CHECK(trace_squared_eval(HermitianOperator::identity(2), 2) == 1.0);
    CHECK(trace_squared_eval(a + b, 2) == 1.0);
    CHECK(trace_squared_eval(a, 2) + trace_squared_eval(b, 2) == doctest::Approx(0.5));
}

TEST_CASE("equal rule: subset sizes over the context size") {
    const Context three = computational_context(3);
    CHECK(equal_rule_eval(three[0] + three[1], three) == Rational(2, 3));

    const Context four = computational_context(4);
    CHECK(equal_rule_eval(four[0] + four[1], four) == Rational(1, 2));
    CHECK(equal_rule_eval(HermitianOperator::identity(4), four) == 1);
}

TEST_CASE("equal rule: the same operator in two contexts") {
    // B2 + B3 in {B1, B2, B3} versus the two-member context {B1, B2 + B3}.
    const Context three = computational_context(3);
    const HermitianOperator b23 = three[1] + three[2];
    CHECK(equal_rule_eval(b23, three) == Rational(2, 3));
    const Context two({three[0], b23});
    CHECK(equal_rule_eval(b23, two) == Rational(1, 2));
}

TEST_CASE("equal rule: full context gives exactly one") {
    Rng rng(33);
    for (std::size_t d = 2; d <= 8; ++d) {
        for (std::size_t blocks = 1; blocks <= d; ++blocks) {
            const Context ctx = random_projective_context(d, blocks, rng);
            CHECK(equal_rule_eval(HermitianOperator::identity(d), ctx) == 1);
        }
    }
}

TEST_CASE("equal rule: operators outside the subset-sum algebra") {
    const Context ctx = computational_context(3);
    const HermitianOperator plus = HermitianOperator::rank_one(PureState::normalized(Vector::Ones(3)).vector());
    try {
        (void)equal_rule_eval(plus, ctx);
        FAIL("accepted an operator outside the algebra");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NotInContextAlgebra);
    }
}

TEST_CASE("deutsch quartic: symmetric, eigen and one-third cases") {
    const Context basis = computational_context(2);
    const PureState sym = PureState::normalized(vec2(1.0, 1.0));
    CHECK(std::abs(deutsch_quartic_eval(sym, 0, basis) - 0.5) <= 1e-15);
    CHECK(std::abs(deutsch_quartic_eval(sym, 1, basis) - 0.5) <= 1e-15);
    CHECK(deutsch_quartic_eval(PureState::basis(2, 0), 0, basis) == 1.0);
    const PureState third(vec2(std::sqrt(1.0 / 3.0), std::sqrt(2.0 / 3.0)));
    // (1/9) / (1/9 + 4/9)
    CHECK(std::abs(deutsch_quartic_eval(third, 0, basis) - 0.2) <= 1e-15);
}

TEST_CASE("deutsch quartic: sums to one over every basis") {
    Rng rng(34);
    for (int t = 0; t < 500; ++t) {
        const Context basis = random_projective_context(2, 2, rng);
        const PureState psi = random_pure_state(2, rng);
        CHECK(std::abs(deutsch_quartic_eval(psi, 0, basis) + deutsch_quartic_eval(psi, 1, basis) - 1.0) <= 1e-12);
    }
}

TEST_CASE("deutsch quartic: posed in dimension two only") {
    CHECK_THROWS_AS((void)deutsch_quartic_eval(PureState::basis(3, 0), 0, computational_context(3)), Error);
}

TEST_CASE("zurek patch: rational tags follow the tag") {
    const auto halves = tags_of({QuadRational(Rational(1, 2)), QuadRational(Rational(1, 2))});
    CHECK(zurek_patch_eval(halves, 0) == 0.5);
    const auto thirds = tags_of({QuadRational(Rational(1, 3)), QuadRational(Rational(2, 3))});
    CHECK(zurek_patch_eval(thirds, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(zurek_patch_value(thirds, 1) == QuadRational(Rational(2, 3)));
}

TEST_CASE("zurek patch: irrational tags jump to sqrt2") {
    // 1 - sqrt2/2 and sqrt2/2: an irrational tag always has an irrational partner.
    const auto tags = tags_of({QuadRational(Rational(1), Rational(-1, 2)), QuadRational(Rational(0), Rational(1, 2))});
    CHECK(std::abs(zurek_patch_eval(tags, 0) - std::sqrt(2.0)) <= 1e-15);
    CHECK(zurek_patch_value(tags, 1) == QuadRational::sqrt2());
}

TEST_CASE("zurek patch: inconsistent tags are rejected") {
    const auto bad = tags_of({QuadRational(Rational(1, 2)), QuadRational(Rational(1, 3))});
    try {
        (void)zurek_patch_eval(bad, 0);
        FAIL("accepted tags not summing to one");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::InvalidTags);
    }
}

TEST_CASE("bloch hemisphere: poles and equator") {
    CHECK(bloch_hemisphere_eval(PureState::basis(2, 0)) == 1);
    CHECK(bloch_hemisphere_eval(PureState::basis(2, 1)) == 0);
    CHECK(bloch_hemisphere_eval(PureState::normalized(vec2(1.0, 1.0))) == Rational(1, 2));
    CHECK(bloch_hemisphere_eval(PureState::normalized(vec2(1.0, Complex(0.0, 1.0)))) == Rational(1, 2));
}

TEST_CASE("bloch hemisphere: antipodal pairs sum to one") {
    Rng rng(35);
    for (int t = 0; t < 1000; ++t) {
        const Vector x = random_pure_state(2, rng).vector();
        const Vector perp = vec2(-std::conj(x(1)), std::conj(x(0)));
        CHECK(bloch_hemisphere_eval(PureState(x)) + bloch_hemisphere_eval(PureState(perp)) == 1);
    }
}

TEST_CASE("two slope: basis values and rational homogeneity") {
    CHECK(two_slope_eval(QuadRational(1), Rational(1), Rational(5)) == QuadRational(1));
    CHECK(two_slope_eval(QuadRational::sqrt2(), Rational(1), Rational(5)) == QuadRational(Rational(0), Rational(5)));
    Rng rng(36);
    std::uniform_int_distribution<long long> small(-500, 500);
    for (int t = 0; t < 100; ++t) {
        const QuadRational x(Rational(small(rng), 7), Rational(small(rng), 11));
        const Rational q(3, 7);
        CHECK(two_slope_eval(q * x, Rational(1), Rational(10000)) ==
              q * two_slope_eval(x, Rational(1), Rational(10000)));
    }
}

TEST_CASE("two slope: nearby reals far apart in value") {
    const QuadRational one(1);
    const QuadRational root = QuadRational::sqrt2();
    CHECK(two_slope_eval(one, 1, 10000).to_double() == 1.0);
    CHECK(two_slope_eval(root, 1, 10000).to_double() == doctest::Approx(14142.135623730951));
}

TEST_CASE("two slope: Cauchy equation holds exactly") {
    Rng rng(37);
    std::uniform_int_distribution<long long> num(-10000, 10000);
    std::uniform_int_distribution<long long> den(1, 1000);
    const Rational c1(-3, 4);
    const Rational c2(10000);
    for (int t = 0; t < 10000; ++t) {
        const QuadRational x(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
        const QuadRational y(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
        REQUIRE(two_slope_eval(x + y, c1, c2) == two_slope_eval(x, c1, c2) + two_slope_eval(y, c1, c2));
    }
}

TEST_CASE("catalog: names resolve and unknown names fail") {
    for (const auto &name : assignment_names()) {
        CHECK(make_assignment(name)->name() == name);
    }
    CHECK(matrix_assignment_names().size() == 6);
    try {
        (void)make_assignment("gibbs");
        FAIL("unknown name accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::UnknownIdentifier);
    }
}

TEST_CASE("catalog: context-blind assignments agree across contexts") {
    Rng rng(38);
    for (const auto &name : matrix_assignment_names()) {
        const auto a = make_assignment(name);
        if (a->consumes().context) {
            continue;
        }
        const std::size_t d = a->defined_in_dim(3) ? 3 : 2;
        const State rho(random_density_matrix(d, rng));
        const Matrix frame = haar_random_unitary(d, rng);
        const HermitianOperator op = HermitianOperator::rank_one(frame.col(0));
        // Two completions of op: the rest of the frame split differently.
        const Context c1 = context_from_frame(frame, d == 3 ? Partition{{0}, {1}, {2}} : Partition{{0}, {1}});
        const Context c2 = context_from_frame(frame, d == 3 ? Partition{{0}, {1, 2}} : Partition{{0}, {1}});
        std::vector<ProbabilityTag> t1;
        std::vector<ProbabilityTag> t2;
        if (a->consumes().tags) {
            t1 = tags_of({QuadRational(Rational(1, 4)), QuadRational(Rational(1, 4)), QuadRational(Rational(1, 2))});
            t2 = tags_of({QuadRational(Rational(1, 4)), QuadRational(Rational(3, 4))});
            if (d == 2) {
                t1 = t2;
            }
        }
        const auto v1 = a->evaluate({op, &c1, &rho, t1}).real.finite();
        const auto v2 = a->evaluate({op, &c2, &rho, t2}).real.finite();
        CHECK_MESSAGE(v1 == v2, name);
    }
}
