#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bornlab/frequency.hpp"

using namespace bornlab;

namespace {

// E[g(m)] over all d^N outcome strings, weighting each string by the product
// of its per-copy probabilities. No binomial coefficients involved.
template <class G> double enumerate(const std::vector<double> &probs, std::size_t k, std::size_t n, G &&g) {
    const std::size_t d = probs.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= d;
    }
    double acc = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        std::size_t hits = 0;
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t outcome = rest % d;
            rest /= d;
            w *= probs[outcome];
            hits += outcome == k ? 1 : 0;
        }
        acc += w * g(hits);
    }
    return acc;
}

double enumerated_deviation(const std::vector<double> &probs, std::size_t k, std::size_t n) {
    const double p = probs[k];
    const double nn = static_cast<double>(n);
    return std::sqrt(enumerate(probs, k, n, [&](std::size_t m) { return std::pow(m / nn - p, 2); }));
}

PureState state_with(const std::vector<double> &probs) {
    Vector v(static_cast<Eigen::Index>(probs.size()));
    for (std::size_t i = 0; i < probs.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = std::sqrt(probs[i]);
    }
    return PureState::normalized(v);
}

} // namespace

TEST_CASE("deviation norm: eigenstate, p = 1/2 and large N") {
    CHECK(frequency_deviation_norm({{1.0, 0.0}, 0, 37}) == 0.0);
    CHECK(std::abs(frequency_deviation_norm({{0.5, 0.5}, 0, 100}) - 0.05) <= 1e-12);
    const double big = frequency_deviation_norm({{0.25, 0.75}, 0, 4'000'000});
    CHECK(std::abs(big - std::sqrt(0.25 * 0.75 / 4e6)) <= 1e-15);
    CHECK(big == doctest::Approx(2.165063509461097e-4).epsilon(1e-12));
}

TEST_CASE("binomial moments agree with explicit enumeration") {
    for (double p : {0.0, 0.1, 0.5, 0.77, 1.0}) {
        for (std::size_t n = 1; n <= 12; ++n) {
            const std::vector<double> probs{p, 1.0 - p};
            CHECK(std::abs(frequency_deviation_norm({probs, 0, n}) - enumerated_deviation(probs, 0, n)) <= 1e-12);
            const auto m = binomial_frequency_moments(p, n);
            CHECK(std::abs(m.mean - p) <= 1e-12);
            CHECK(std::abs(m.variance - p * (1.0 - p) / static_cast<double>(n)) <= 1e-12);
        }
    }
}

TEST_CASE("brute force: hand-enumerated N = 2 and the eigenstate") {
    // Strings 00, 01, 10, 11 with deviations 1/2, 0, 0, 1/2, each of weight 1/4.
    CHECK(std::abs(frequency_apply_bruteforce(state_with({0.5, 0.5}), 0, 2) - std::sqrt(1.0 / 8.0)) <= 1e-15);
    CHECK(frequency_apply_bruteforce(PureState::basis(3, 1), 1, 5) == 0.0);
}

TEST_CASE("brute force agrees with the binomial formula on random states") {
    Rng rng(61);
    for (std::size_t d : {2, 3}) {
        for (int t = 0; t < 10; ++t) {
            const PureState psi = random_pure_state(d, rng);
            for (std::size_t n = 1; n <= 12; n += (d == 3 ? 3 : 1)) {
                const double p = std::norm(psi.vector()(0));
                const double brute = frequency_apply_bruteforce(psi, 0, n);
                CHECK(std::abs(brute - frequency_deviation_closed_form(p, n)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("brute force respects the size limit") {
    try {
        (void)frequency_apply_bruteforce(state_with({0.5, 0.5}), 0, 30);
        FAIL("2^30 strings accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::SizeLimit);
    }
}

TEST_CASE("frequency input validation") {
    CHECK_THROWS_AS(validate({{0.5, 0.6}, 0, 10}), Error);
    CHECK_THROWS_AS(validate({{0.5, 0.5}, 2, 10}), Error);
    CHECK_THROWS_AS(validate({{0.5, 0.5}, 0, 0}), Error);
    CHECK_THROWS_AS(validate({{1.5, -0.5}, 0, 1}), Error);
    CHECK_NOTHROW(validate({{0.2, 0.3, 0.5}, 1, 1}));
}

TEST_CASE("convergence study: slopes and exact convergence") {
    const std::vector<std::size_t> grid{100, 1000, 10000, 100000};
    const auto half = hartle_convergence_study({{0.5, 0.5}, 0, 1}, grid);
    REQUIRE(half.slope);
    CHECK(std::abs(*half.slope + 0.5) <= 0.02);
    CHECK(*half.prefactor == doctest::Approx(0.5).epsilon(1e-9));

    const auto nine = hartle_convergence_study({{0.9, 0.1}, 0, 1}, grid);
    REQUIRE(nine.slope);
    CHECK(std::abs(*nine.slope + 0.5) <= 0.02);
    CHECK(*nine.prefactor == doctest::Approx(std::sqrt(0.09)).epsilon(1e-9));

    const auto one = hartle_convergence_study({{1.0, 0.0}, 0, 1}, grid);
    CHECK(one.exact_convergence);
    CHECK_FALSE(one.slope);

    try {
        (void)hartle_convergence_study({{0.5, 0.5}, 0, 1}, {10, 100, 1000});
        FAIL("three-point grid accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::InvalidGrid);
    }
    CHECK_THROWS_AS((void)hartle_convergence_study({{0.5, 0.5}, 0, 1}, {10, 100, 100, 1000}), Error);
}

TEST_CASE("mixture gap: brute force for small N") {
    const std::vector<double> weights{0.5, 0.5};
    const std::vector<double> q{1.0, 0.0};
    const std::vector<std::size_t> grid{1, 2, 4, 6, 8, 10};
    const MixtureGap gap = mixed_variance_gap(weights, q, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::size_t n = grid[g];
        const double nn = static_cast<double>(n);
        // Product of the mixture: i.i.d. copies with q = 1/2.
        const double mean_p = enumerate({0.5, 0.5}, 0, n, [&](std::size_t m) { return m / nn; });
        const double var_p =
            enumerate({0.5, 0.5}, 0, n, [&](std::size_t m) { return std::pow(m / nn, 2); }) - mean_p * mean_p;
        // Mixture of products: pick j once, then i.i.d. copies with q_j.
        double second = 0.0;
        double first = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            const std::vector<double> probs{q[j], 1.0 - q[j]};
            second += weights[j] * enumerate(probs, 0, n, [&](std::size_t m) { return std::pow(m / nn, 2); });
            first += weights[j] * enumerate(probs, 0, n, [&](std::size_t m) { return m / nn; });
        }
        CHECK(std::abs(gap.product_of_mixture.points[g].second - var_p) <= 1e-12);
        CHECK(std::abs(gap.mixture_of_products.points[g].second - (second - first * first)) <= 1e-12);
    }
    CHECK(gap.q_variance == doctest::Approx(0.25));
}

TEST_CASE("mixture gap: limits zero and Var_j(q_j)") {
    const MixtureGap gap = mixed_variance_gap({0.5, 0.5}, {1.0, 0.0}, {100, 1000, 10000, 100000});
    CHECK(gap.product_of_mixture.points.back().second <= 1e-3);
    CHECK(std::abs(gap.mixture_of_products.points.back().second - 0.25) <= 1e-3);

    const MixtureGap other = mixed_variance_gap({0.3, 0.7}, {0.2, 0.9}, {100, 1000, 10000, 100000});
    // Var_j(q_j) = 0.3 * 0.2^2 + 0.7 * 0.9^2 - 0.69^2 = 0.3 * 0.7 * (0.9 - 0.2)^2.
    CHECK(other.q_variance == doctest::Approx(0.1029).epsilon(1e-12));
    CHECK(other.q_mean == doctest::Approx(0.69));
    const double at_1e4 = other.product_of_mixture.points[2].second;
    CHECK(at_1e4 == doctest::Approx(0.69 * 0.31 / 1e4).epsilon(1e-9));
    CHECK(other.mixture_of_products.points[2].second - at_1e4 > 0.1);
}

TEST_CASE("mixture gap: expectations agree, single component collapses") {
    const MixtureGap gap = mixed_variance_gap({0.3, 0.7}, {0.2, 0.9}, {10, 100, 1000, 10000});
    for (const auto &[product, mixture] : gap.expectations) {
        CHECK(std::abs(product - mixture) <= 1e-12);
        CHECK(std::abs(product - 0.69) <= 1e-12);
    }
    const MixtureGap pure = mixed_variance_gap(std::vector<double>{1.0}, std::vector<double>{0.3}, {10, 100, 1000, 10000});
    for (std::size_t g = 0; g < 4; ++g) {
        const double expected = 0.3 * 0.7 / static_cast<double>(pure.product_of_mixture.points[g].first);
        CHECK(pure.product_of_mixture.points[g].second == doctest::Approx(expected).epsilon(1e-12));
        CHECK(pure.mixture_of_products.points[g].second == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("mixture gap: explicit states and invalid mixtures") {
    Rng rng(62);
    std::vector<MixtureComponent> mix{{0.4, random_pure_state(3, rng)}, {0.6, random_pure_state(3, rng)}};
    const MixtureGap gap = mixed_variance_gap(mix, 1, {10, 100, 1000, 10000});
    CHECK(gap.q.size() == 2);
    CHECK(gap.q[0] == doctest::Approx(std::norm(mix[0].psi.vector()(1))));
    CHECK_THROWS_AS((void)mixed_variance_gap({0.5, 0.4}, {0.1, 0.2}, {10, 100, 1000, 10000}), Error);
}
