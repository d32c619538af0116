#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "bornlab/exact.hpp"
#include "bornlab/random.hpp"

using namespace bornlab;
using Dec50 = boost::multiprecision::cpp_dec_float_50;

namespace {

// 50-digit evaluation of a + b sqrt2, independent of quad_to_real.
double oracle(const QuadRational &x) {
    const auto a = x.rational_part();
    const auto b = x.sqrt2_part();
    const Dec50 ad = Dec50(numerator(a).str()) / Dec50(denominator(a).str());
    const Dec50 bd = Dec50(numerator(b).str()) / Dec50(denominator(b).str());
    return static_cast<double>(ad + bd * sqrt(Dec50(2)));
}

Rational random_rational(Rng &rng) {
    std::uniform_int_distribution<long long> num(-1000, 1000);
    std::uniform_int_distribution<long long> den(1, 97);
    return Rational(num(rng)) / Rational(den(rng));
}

QuadRational random_quad(Rng &rng) { return {random_rational(rng), random_rational(rng)}; }

} // namespace

TEST_CASE("quad ops: addition, scaling and subtraction") {
    const QuadRational one(1);
    CHECK(quad_ops(one, QuadRational::sqrt2(), QuadOp::Add) == QuadRational(Rational(1), Rational(1)));
    CHECK(quad_ops(QuadRational(Rational(3), Rational(2)), QuadRational(Rational(1, 2)), QuadOp::Scale) ==
          QuadRational(Rational(3, 2), Rational(1)));
    const QuadRational x(Rational(7, 3), Rational(-5, 11));
    CHECK(quad_ops(x, x, QuadOp::Sub) == QuadRational(0));
}

TEST_CASE("quad ops: scaling by an irrational is rejected") {
    CHECK_THROWS_AS((void)quad_ops(QuadRational(1), QuadRational::sqrt2(), QuadOp::Scale), Error);
}

TEST_CASE("quad to real: basis elements") {
    CHECK(std::abs(quad_to_real(QuadRational::sqrt2()) - 1.4142135623730951) <= 1e-12);
    CHECK(quad_to_real(QuadRational(1)) == 1.0);
}

TEST_CASE("quad to real: cancellation against a 50-digit oracle") {
    const QuadRational x(Rational(3), Rational(-2));
    CHECK(std::abs(quad_to_real(x) - oracle(x)) <= 1e-16);
    CHECK(std::abs(quad_to_real(x) - 0.17157287525380990) <= 1e-15);
    // (sqrt2 - 1)^12 is tiny and formed from large cancelling parts.
    QuadRational y(1);
    for (int i = 0; i < 12; ++i) {
        y = y * QuadRational(Rational(-1), Rational(1));
    }
    CHECK(std::abs(quad_to_real(y) - oracle(y)) <= 1e-15 * std::abs(oracle(y)));
}

TEST_CASE("quad to real is monotone in the exact order") {
    Rng rng(17);
    for (int t = 0; t < 2000; ++t) {
        const QuadRational x = random_quad(rng);
        const QuadRational y = random_quad(rng);
        if (x < y) {
            CHECK(quad_to_real(x) <= quad_to_real(y));
        } else if (y < x) {
            CHECK(quad_to_real(y) <= quad_to_real(x));
        }
        CHECK(x.sign() == (oracle(x) > 0 ? 1 : (oracle(x) < 0 ? -1 : 0)));
    }
}

TEST_CASE("field axioms hold exactly on random triples") {
    Rng rng(2024);
    for (int t = 0; t < 10000; ++t) {
        const QuadRational x = random_quad(rng);
        const QuadRational y = random_quad(rng);
        const QuadRational z = random_quad(rng);
        const Rational q = random_rational(rng);
        REQUIRE(((x + y) + z) == (x + (y + z)));
        REQUIRE((x + y) == (y + x));
        REQUIRE((q * (x + y)) == (q * x + q * y));
        REQUIRE(((x * y) * z) == (x * (y * z)));
        REQUIRE((x * (y + z)) == (x * y + x * z));
        const double sum = quad_to_real(x + y);
        REQUIRE(std::abs(sum - (quad_to_real(x) + quad_to_real(y))) <= 1e-12 * (1.0 + std::abs(sum)));
    }
}

TEST_CASE("rationals stay in lowest terms") {
    const Rational r = Rational(6) / Rational(-4);
    CHECK(numerator(r) == -3);
    CHECK(denominator(r) == 2);
    CHECK(to_string(Rational(617, 1000)) == "617/1000");
}

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-6/8") == Rational(-3, 4));
    CHECK(parse_rational("0.29") == Rational(29, 100));
    CHECK(parse_rational("0.05") == Rational(1, 20));
    CHECK(parse_rational("007") == Rational(7));
    CHECK(parse_rational("1e-9") == Rational(1, 1000000000));
    CHECK(parse_rational("-2.5e2") == Rational(-250));
    CHECK_THROWS_AS((void)parse_rational("1/0"), Error);
    CHECK_THROWS_AS((void)parse_rational("abc"), Error);
    CHECK_THROWS_AS((void)parse_rational(""), Error);
}

TEST_CASE("quad parsing") {
    CHECK(QuadRational::parse("sqrt2") == QuadRational::sqrt2());
    CHECK(QuadRational::parse("1 - 1/2*sqrt2") == QuadRational(Rational(1), Rational(-1, 2)));
    CHECK(QuadRational::parse("3/4 + 2/5*sqrt2") == QuadRational(Rational(3, 4), Rational(2, 5)));
    CHECK(QuadRational::parse("0.5") == QuadRational(Rational(1, 2)));
    CHECK(QuadRational::parse("-sqrt2") == QuadRational(Rational(0), Rational(-1)));
    CHECK_THROWS_AS((void)QuadRational::parse("sqrt3"), Error);
    CHECK_THROWS_AS((void)QuadRational::parse("1 +"), Error);
}

TEST_CASE("quad string round trip") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const QuadRational x = random_quad(rng);
        CHECK(QuadRational::parse(x.to_string()) == x);
    }
}

TEST_CASE("probability tags") {
    CHECK(ProbabilityTag::rational(Rational(1, 3)).is_rational());
    const auto irr = ProbabilityTag::irrational(QuadRational(Rational(1), Rational(-1, 2)));
    CHECK_FALSE(irr.is_rational());
    CHECK(std::abs(irr.to_double() - (1.0 - std::sqrt(0.5))) <= 1e-15);
    try {
        (void)ProbabilityTag::irrational(QuadRational(Rational(1, 2)));
        FAIL("rational value accepted as irrational tag");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::InvalidTags);
    }
}
