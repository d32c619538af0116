#pragma once

#include <compare>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "bornlab/error.hpp"

namespace bornlab {

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Accepts "p/q", integers, and plain decimals ("0.25", "-1e-6").
Rational parse_rational(std::string_view text);
std::string to_string(const Rational &r);
double to_double(const Rational &r);

/// Element a + b*sqrt(2) of the field Q(sqrt 2). Representation is unique, so
/// equality is component-wise.
class QuadRational {
  public:
    QuadRational() = default;
    QuadRational(Rational a, Rational b = Rational(0)) // NOLINT(google-explicit-constructor)
        : a_(std::move(a)), b_(std::move(b)) {}
    QuadRational(long long a) : a_(a) {} // NOLINT(google-explicit-constructor)

    static QuadRational sqrt2() { return {Rational(0), Rational(1)}; }
    /// Parses "p/q + r/s*sqrt2" and its variants ("sqrt2", "1 - 1/2*sqrt2", "0.5").
    static QuadRational parse(std::string_view text);

    [[nodiscard]] const Rational &rational_part() const { return a_; }
    [[nodiscard]] const Rational &sqrt2_part() const { return b_; }
    [[nodiscard]] bool is_rational() const { return b_ == 0; }

    /// Exact sign of a + b*sqrt2.
    [[nodiscard]] int sign() const;
    [[nodiscard]] double to_double() const;
    [[nodiscard]] std::string to_string() const;

    QuadRational operator-() const { return {-a_, -b_}; }
    friend QuadRational operator+(const QuadRational &x, const QuadRational &y) {
        return {x.a_ + y.a_, x.b_ + y.b_};
    }
    friend QuadRational operator-(const QuadRational &x, const QuadRational &y) {
        return {x.a_ - y.a_, x.b_ - y.b_};
    }
    friend QuadRational operator*(const QuadRational &x, const QuadRational &y) {
        return {x.a_ * y.a_ + 2 * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_};
    }
    friend QuadRational operator*(const Rational &q, const QuadRational &x) {
        return {q * x.a_, q * x.b_};
    }
    QuadRational &operator+=(const QuadRational &y) {
        a_ += y.a_;
        b_ += y.b_;
        return *this;
    }
    friend bool operator==(const QuadRational &x, const QuadRational &y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend std::strong_ordering operator<=>(const QuadRational &x, const QuadRational &y) {
        const int s = (x - y).sign();
        return s < 0 ? std::strong_ordering::less
                     : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

  private:
    Rational a_{0};
    Rational b_{0};
};

enum class QuadOp { Add, Sub, Scale };

/// Field arithmetic; for Scale the second operand must be rational.
QuadRational quad_ops(const QuadRational &x, const QuadRational &y, QuadOp op);

/// Embedding Q(sqrt2) -> R, accurate to a few ulps even under cancellation.
double quad_to_real(const QuadRational &x);

/// Exact squared-amplitude label: either rational or an irrational element
/// of Q(sqrt2).
class ProbabilityTag {
  public:
    static ProbabilityTag rational(Rational p) { return ProbabilityTag(QuadRational(std::move(p))); }
    /// Throws invalid-tags when the value is actually rational.
    static ProbabilityTag irrational(QuadRational p);
    /// Picks the kind from the value.
    static ProbabilityTag of(QuadRational p) { return ProbabilityTag(std::move(p)); }

    [[nodiscard]] bool is_rational() const { return value_.is_rational(); }
    [[nodiscard]] const QuadRational &value() const { return value_; }
    [[nodiscard]] double to_double() const { return quad_to_real(value_); }

    friend bool operator==(const ProbabilityTag &, const ProbabilityTag &) = default;

  private:
    explicit ProbabilityTag(QuadRational v) : value_(std::move(v)) {}
    QuadRational value_;
};

} // namespace bornlab
