#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bornlab/gleason_fit.hpp"

using namespace bornlab;

namespace {

// Best affine fit f(n) ~ (w + r.n) / 2 of the hemisphere step over a
// Fibonacci grid on the Bloch sphere. Every density matrix in d = 2 gives
// <x|rho|x> of that form, so this is the residual floor over all rho.
double hemisphere_grid_floor(int points) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    Eigen::MatrixXd design(points, 4);
    Eigen::VectorXd target(points);
    for (int i = 0; i < points; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / points;
        const double r = std::sqrt(1.0 - z * z);
        const double phi = golden * i;
        design.row(i) << 1.0, r * std::cos(phi), r * std::sin(phi), z;
        target(i) = z > 1e-12 ? 1.0 : (z < -1e-12 ? 0.0 : 0.5);
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
    return std::sqrt((design * coef - target).squaredNorm() / points);
}

} // namespace

TEST_CASE("born refit recovers a hidden density matrix") {
    Rng rng(41);
    const auto born = make_assignment("born");
    const HermitianOperator rho = random_density_matrix(3, rng);
    const State state(rho);
    const FitResult fit = fit_density(*born, 3, 20, 5, &state);
    CHECK(fit.residual_rms <= 1e-10);
    CHECK(frobenius_distance(fit.rho_hat.matrix(), rho.matrix()) <= 1e-8);
    CHECK(fit.sample_count == 60);
    CHECK(fit.weight == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(regularity_verdict(fit) == Regularity::Regular);
}

TEST_CASE("born refits across dimensions two to six") {
    Rng rng(42);
    const auto born = make_assignment("born");
    for (std::size_t d = 2; d <= 6; ++d) {
        for (int rep = 0; rep < 10; ++rep) {
            const HermitianOperator rho = random_density_matrix(d, rng);
            const State state(rho);
            const FitResult fit = fit_density(*born, d, 20, rng(), &state);
            CHECK(fit.residual_rms <= 1e-10);
            CHECK(frobenius_distance(fit.rho_hat.matrix(), rho.matrix()) <= 1e-7);
        }
    }
}

TEST_CASE("born fit residual is invariant under unitary conjugation of rho") {
    Rng rng(43);
    const auto born = make_assignment("born");
    const HermitianOperator rho = random_density_matrix(4, rng);
    const Matrix u = haar_random_unitary(4, rng);
    const Matrix conj = u * rho.matrix() * u.adjoint();
    const State s1(rho);
    const State s2(HermitianOperator(Matrix((conj + conj.adjoint()) / 2.0)));
    const FitResult f1 = fit_density(*born, 4, 20, 9, &s1);
    const FitResult f2 = fit_density(*born, 4, 20, 9, &s2);
    CHECK(std::abs(f1.residual_rms - f2.residual_rms) <= 1e-9);
    CHECK(frobenius_distance(f2.rho_hat.matrix(), conj) <= 1e-8);
}

TEST_CASE("constant assignment fits to the maximally mixed state") {
    for (std::size_t d = 2; d <= 5; ++d) {
        const auto c = make_constant(1.0 / static_cast<double>(d));
        const FitResult fit = fit_density(*c, d, 20, 3);
        CHECK(fit.residual_rms <= 1e-10);
        const Matrix expected = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) /
                                static_cast<double>(d);
        CHECK(frobenius_distance(fit.rho_hat.matrix(), expected) <= 1e-10);
    }
}

TEST_CASE("trace-squared on rank-one projectors in d = 3 is regular with rho = I/9") {
    const FitResult fit = fit_density(*make_assignment("trace-squared"), 3, 20, 4);
    CHECK(regularity_verdict(fit) == Regularity::Regular);
    CHECK(frobenius_distance(fit.rho_hat.matrix(), Matrix::Identity(3, 3) / 9.0) <= 1e-10);
    CHECK(fit.weight == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("hemisphere step has a residual floor over all density matrices") {
    const double floor = hemisphere_grid_floor(200000);
    // The continuum value is 1/4: the step minus its best affine part 1/2 + 3z/4.
    CHECK(floor == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(floor >= 0.05);
}

TEST_CASE("hemisphere fit is non-regular for every seed") {
    const auto hemi = make_assignment("bloch-hemisphere");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FitResult fit = fit_density(*hemi, 2, 50, seed);
        CHECK(fit.residual_rms >= 0.05);
        CHECK(regularity_verdict(fit) == Regularity::NonRegular);
    }
}

TEST_CASE("fit errors") {
    try {
        (void)fit_density(*make_assignment("born"), 3, 2, 1);
        FAIL("underdetermined fit accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::UnderdeterminedFit);
    }
    try {
        (void)fit_density(*make_assignment("bloch-hemisphere"), 3, 20, 1);
        FAIL("hemisphere fitted in d = 3");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NotApplicable);
    }
}

TEST_CASE("design rows reproduce the quadratic form") {
    Rng rng(44);
    for (std::size_t d = 2; d <= 5; ++d) {
        const HermitianOperator h = random_hermitian(d, rng);
        const Vector x = random_pure_state(d, rng).vector();
        // Coordinates of h in the fit basis: diagonal, then Re and -Im of the upper triangle.
        Eigen::VectorXd coords(static_cast<Eigen::Index>(d * d));
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
            coords(k++) = h.matrix()(i, i).real();
        }
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
            for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(d); ++j) {
                coords(k++) = h.matrix()(i, j).real();
                coords(k++) = -h.matrix()(i, j).imag();
            }
        }
        const double direct = x.dot(h.matrix() * x).real();
        CHECK(std::abs(hermitian_design_row(x).dot(coords) - direct) <= 1e-12);
    }
}
