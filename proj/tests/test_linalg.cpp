#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bornlab/linalg.hpp"

using namespace bornlab;

namespace {

// Plain-loop oracles, deliberately not using Eigen products.
Complex loop_inner(const Matrix &m, Eigen::Index a, Eigen::Index b) {
    Complex s = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        s += std::conj(m(r, a)) * m(r, b);
    }
    return s;
}

Complex loop_trace(const Matrix &m) {
    Complex s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        s += m(i, i);
    }
    return s;
}

template <class F> void expect_error(ErrorKind kind, F &&f) {
    try {
        f();
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(e.kind() == kind);
    }
}

} // namespace

TEST_CASE("haar unitary: dimension one is a phase") {
    const Matrix u = haar_random_unitary(1, 42);
    REQUIRE(u.rows() == 1);
    CHECK(std::abs(std::abs(u(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("haar unitary: same seed gives the same matrix") {
    CHECK(haar_random_unitary(4, 7) == haar_random_unitary(4, 7));
    CHECK(haar_random_unitary(4, 7) != haar_random_unitary(4, 8));
}

TEST_CASE("haar unitary: column Gram matrix is the identity") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix u = haar_random_unitary(3, seed);
        for (Eigen::Index a = 0; a < 3; ++a) {
            for (Eigen::Index b = 0; b < 3; ++b) {
                const Complex expected = a == b ? 1.0 : 0.0;
                CHECK(std::abs(loop_inner(u, a, b) - expected) <= 1e-12);
            }
        }
    }
}

TEST_CASE("haar unitary: zero dimension is rejected") {
    expect_error(ErrorKind::InvalidDimension, [] { (void)haar_random_unitary(0, 1); });
}

TEST_CASE("random projective context: rank-one case") {
    const Context ctx = random_projective_context(3, 3, 11);
    CHECK(ctx.size() == 3);
    CHECK(ctx.complete());
    CHECK(ctx.projective());
    CHECK(ctx.rank_one());
    Matrix sum = Matrix::Zero(3, 3);
    for (const auto &m : ctx.members()) {
        CHECK(std::abs(m.trace() - 1.0) < 1e-10);
        sum += m.matrix();
    }
    CHECK(frobenius_distance(sum, Matrix::Identity(3, 3)) <= 1e-10);
}

TEST_CASE("random projective context: two blocks in d = 4") {
    const Context ctx = random_projective_context(4, 2, 5);
    REQUIRE(ctx.size() == 2);
    CHECK(std::lround(ctx[0].trace()) + std::lround(ctx[1].trace()) == 4);
    CHECK(ctx[0].is_projector());
    CHECK(ctx[1].is_projector());
}

TEST_CASE("random projective context: members are orthogonal") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Context ctx = random_projective_context(2, 2, seed);
        CHECK((ctx[0].matrix() * ctx[1].matrix()).norm() <= 1e-10);
    }
}

TEST_CASE("random projective context: too many blocks") {
    expect_error(ErrorKind::InvalidPartition, [] { (void)random_projective_context(2, 3, 1); });
}

TEST_CASE("sampled contexts satisfy every invariant in d = 2..8") {
    Rng rng(99);
    for (std::size_t d = 2; d <= 8; ++d) {
        for (std::size_t blocks = 1; blocks <= d; ++blocks) {
            const Context ctx = random_projective_context(d, blocks, rng);
            Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            for (std::size_t i = 0; i < ctx.size(); ++i) {
                const Matrix &p = ctx[i].matrix();
                CHECK((p * p - p).norm() <= 1e-10);
                for (std::size_t j = 0; j < ctx.size(); ++j) {
                    if (i != j) {
                        CHECK((p * ctx[j].matrix()).norm() <= 1e-10);
                    }
                }
                sum += p;
            }
            CHECK((sum - Matrix::Identity(sum.rows(), sum.cols())).norm() <= 1e-10);
        }
    }
}

TEST_CASE("tensor product: identities and basis vectors") {
    const Matrix i6 = tensor_product(Matrix(Matrix::Identity(2, 2)), Matrix(Matrix::Identity(3, 3)));
    CHECK(i6 == Matrix::Identity(6, 6));

    const Vector v = tensor_product(PureState::basis(2, 0).vector(), PureState::basis(2, 1).vector());
    REQUIRE(v.size() == 4);
    for (Eigen::Index k = 0; k < 4; ++k) {
        CHECK(v(k) == Complex(k == 1 ? 1.0 : 0.0));
    }
}

TEST_CASE("tensor product: trace factorizes") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const Matrix a = random_hermitian(3, rng).matrix() + Complex(0, 1) * random_hermitian(3, rng).matrix();
        const Matrix b = random_hermitian(2, rng).matrix();
        const Complex lhs = loop_trace(tensor_product(a, b));
        CHECK(std::abs(lhs - loop_trace(a) * loop_trace(b)) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("tensor product: mixed-product rule and associativity") {
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const Matrix a = random_hermitian(2, rng).matrix();
        const Matrix b = random_hermitian(3, rng).matrix();
        const Matrix c = random_hermitian(2, rng).matrix();
        const Vector x = random_pure_state(2, rng).vector();
        const Vector y = random_pure_state(3, rng).vector();
        const Vector lhs = tensor_product(a, b) * tensor_product(x, y);
        const Vector rhs = tensor_product(Vector(a * x), Vector(b * y));
        CHECK((lhs - rhs).norm() <= 1e-12);
        CHECK((tensor_product(tensor_product(a, b), c) - tensor_product(a, tensor_product(b, c))).norm() <= 1e-12);
    }
}

TEST_CASE("tensor product: mixed kinds are rejected") {
    const LinearObject v = Vector(Vector::Ones(2));
    const LinearObject m = Matrix(Matrix::Identity(2, 2));
    expect_error(ErrorKind::TypeMismatch, [&] { (void)tensor_product(v, m); });
    CHECK(std::get<Matrix>(tensor_product(m, m)).rows() == 4);
}

TEST_CASE("coarse grain: grouped members are sums") {
    const Context ctx = random_projective_context(3, 3, 21);
    const Context coarse = coarse_grain(ctx, {{0, 1}, {2}});
    REQUIRE(coarse.size() == 2);
    CHECK(frobenius_distance(coarse[0].matrix(), ctx[0].matrix() + ctx[1].matrix()) <= 1e-15);
    CHECK(coarse.complete());

    const Context same = coarse_grain(ctx, {{0}, {1}, {2}});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(same[i].matrix() == ctx[i].matrix());
    }
}

TEST_CASE("coarse grain: sums of orthogonal projectors are projectors") {
    const Context ctx = random_projective_context(4, 4, 22);
    const Context coarse = coarse_grain(ctx, {{0, 1}, {2, 3}});
    for (const auto &m : coarse.members()) {
        CHECK((m.matrix() * m.matrix() - m.matrix()).norm() <= 1e-10);
    }
    CHECK(coarse.projective());
}

TEST_CASE("coarse grain: bad partitions") {
    const Context ctx = random_projective_context(3, 3, 23);
    expect_error(ErrorKind::InvalidPartition, [&] { (void)coarse_grain(ctx, {{0, 1}, {1, 2}}); });
    expect_error(ErrorKind::InvalidPartition, [&] { (void)coarse_grain(ctx, {{0, 1}}); });
    expect_error(ErrorKind::InvalidPartition, [&] { (void)coarse_grain(ctx, {{0, 1}, {2, 3}}); });
}

TEST_CASE("spectral decomposition: degenerate diagonal") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    const auto parts = spectral_decompose(HermitianOperator(m));
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].eigenvalue == doctest::Approx(1.0));
    CHECK(parts[0].projector.trace() == doctest::Approx(2.0));
    CHECK(parts[1].eigenvalue == doctest::Approx(0.0));
    CHECK(parts[1].projector.trace() == doctest::Approx(1.0));

    const auto id = spectral_decompose(HermitianOperator::identity(4));
    REQUIRE(id.size() == 1);
    CHECK(frobenius_distance(id[0].projector.matrix(), Matrix::Identity(4, 4)) <= 1e-10);
}

TEST_CASE("spectral decomposition: reconstruction of random hermitians") {
    Rng rng(8);
    for (std::size_t d = 1; d <= 8; ++d) {
        const HermitianOperator a = random_hermitian(d, rng);
        const auto parts = spectral_decompose(a);
        CHECK(frobenius_distance(reconstruct(parts), a.matrix()) <= 1e-10);
        Matrix sum = Matrix::Zero(a.matrix().rows(), a.matrix().cols());
        for (const auto &p : parts) {
            sum += p.projector.matrix();
        }
        CHECK(frobenius_distance(sum, Matrix::Identity(sum.rows(), sum.cols())) <= 1e-10);
    }
}

TEST_CASE("spectral decomposition: non-hermitian input") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    expect_error(ErrorKind::InvalidOperator, [&] { (void)spectral_decompose(m); });
}

TEST_CASE("operator refinements") {
    Matrix half = Matrix::Identity(2, 2) * 0.5;
    const HermitianOperator h(half);
    CHECK(h.is_effect());
    CHECK_FALSE(h.is_projector());
    CHECK(HermitianOperator::identity(3).scaled(1.0 / 3).is_density_matrix());
    CHECK_FALSE(HermitianOperator::identity(3).scaled(2.0).is_effect());
}

TEST_CASE("pure states are unit vectors") {
    Vector v(2);
    v << 1.0, 1.0;
    expect_error(ErrorKind::InvalidState, [&] { PureState s(v); });
    CHECK(std::abs(PureState::normalized(v).vector().norm() - 1.0) <= 1e-12);
}

TEST_CASE("extended reals saturate and reject indeterminate forms") {
    CHECK((XReal::pos_inf() + XReal(3.0)) == XReal::pos_inf());
    CHECK((XReal(1.0) - XReal::pos_inf()) == XReal::neg_inf());
    CHECK((-XReal::neg_inf()) == XReal::pos_inf());
    expect_error(ErrorKind::UndefinedArithmetic, [] { (void)(XReal::pos_inf() - XReal::pos_inf()); });
    expect_error(ErrorKind::UndefinedArithmetic, [] { (void)(0.0 * XReal::pos_inf()); });
    CHECK((XReal(2.0) + XReal(3.0)).finite() == 5.0);
}
