#include "bornlab/exact.hpp"

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

namespace bornlab {

namespace {

std::string strip_spaces(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(c);
        }
    }
    return out;
}

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

/// String conversion reads a leading zero as an octal prefix.
std::string strip_leading_zeros(std::string_view digits) {
    const auto first = digits.find_first_not_of('0');
    return first == std::string_view::npos ? std::string("0") : std::string(digits.substr(first));
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) {
        throw Error(ErrorKind::ParseError, "malformed number '" + std::string(whole) + "'");
    }
    BigInt v{strip_leading_zeros(s)};
    return negative ? BigInt(-v) : v;
}

BigInt pow10(long long n) {
    BigInt p = 1;
    for (long long i = 0; i < n; ++i) {
        p *= 10;
    }
    return p;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        const BigInt ex = parse_integer(s.substr(e + 1), whole);
        if (ex > 400 || ex < -400) {
            throw Error(ErrorKind::ParseError, "exponent out of range in '" + std::string(whole) + "'");
        }
        exponent = ex.convert_to<long long>();
        s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        const auto int_part = s.substr(0, dot);
        const auto frac_part = s.substr(dot + 1);
        if ((!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part)) || (int_part.empty() && frac_part.empty())) {
            throw Error(ErrorKind::ParseError, "malformed number '" + std::string(whole) + "'");
        }
        digits = std::string(int_part) + std::string(frac_part);
        exponent -= static_cast<long long>(frac_part.size());
    } else {
        if (!all_digits(s)) {
            throw Error(ErrorKind::ParseError, "malformed number '" + std::string(whole) + "'");
        }
        digits = std::string(s);
    }
    Rational r{BigInt(strip_leading_zeros(digits))};
    if (exponent >= 0) {
        r *= pow10(exponent);
    } else {
        r /= pow10(-exponent);
    }
    return negative ? Rational(-r) : r;
}

} // namespace

Rational parse_rational(std::string_view text) {
    const std::string s = strip_spaces(text);
    if (s.empty()) {
        throw Error(ErrorKind::ParseError, "empty number");
    }
    if (auto slash = s.find('/'); slash != std::string::npos) {
        const BigInt num = parse_integer(std::string_view(s).substr(0, slash), text);
        const BigInt den = parse_integer(std::string_view(s).substr(slash + 1), text);
        if (den == 0) {
            throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
        }
        return Rational(num, den);
    }
    return parse_decimal(s, text);
}

std::string to_string(const Rational &r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

double to_double(const Rational &r) { return r.convert_to<double>(); }

// --- QuadRational -------------------------------------------------------------

int QuadRational::sign() const {
    const int sa = a_.sign();
    const int sb = b_.sign();
    if (sb == 0) {
        return sa;
    }
    if (sa == 0 || sa == sb) {
        return sb;
    }
    // Opposite signs: compare a^2 with 2 b^2 (never equal, sqrt2 is irrational).
    return a_ * a_ > 2 * b_ * b_ ? sa : sb;
}

double QuadRational::to_double() const {
    static const double root2 = std::sqrt(2.0);
    if (b_ == 0) {
        return bornlab::to_double(a_);
    }
    if (a_ == 0 || a_.sign() == b_.sign()) {
        return bornlab::to_double(a_) + bornlab::to_double(b_) * root2;
    }
    // a + b sqrt2 = (a^2 - 2 b^2) / (a - b sqrt2); the denominator has no cancellation.
    const Rational num = a_ * a_ - 2 * b_ * b_;
    const double den = bornlab::to_double(a_) - bornlab::to_double(b_) * root2;
    return bornlab::to_double(num) / den;
}

std::string QuadRational::to_string() const {
    if (b_ == 0) {
        return bornlab::to_string(a_);
    }
    std::string b_text;
    if (b_ == 1) {
        b_text = "sqrt2";
    } else if (b_ == -1) {
        b_text = "-sqrt2";
    } else {
        b_text = bornlab::to_string(b_) + "*sqrt2";
    }
    if (a_ == 0) {
        return b_text;
    }
    if (b_.sign() < 0) {
        const std::string pos = b_ == -1 ? "sqrt2" : bornlab::to_string(Rational(-b_)) + "*sqrt2";
        return bornlab::to_string(a_) + " - " + pos;
    }
    return bornlab::to_string(a_) + " + " + b_text;
}

QuadRational QuadRational::parse(std::string_view text) {
    const std::string s = strip_spaces(text);
    if (s.empty()) {
        throw Error(ErrorKind::ParseError, "empty Q(sqrt2) literal");
    }
    // Split into signed terms at '+'/'-' that are not part of an exponent.
    std::vector<std::string> terms;
    std::string current;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        const bool is_sign = c == '+' || c == '-';
        const bool after_exponent = i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E') &&
                                    i > 1 && std::isdigit(static_cast<unsigned char>(s[i - 2]));
        if (is_sign && i > 0 && !after_exponent && s[i - 1] != '*') {
            terms.push_back(current);
            current.clear();
        }
        current.push_back(c);
    }
    terms.push_back(current);

    QuadRational out;
    constexpr std::string_view root = "sqrt2";
    for (std::string term : terms) {
        if (term.empty() || term == "+" || term == "-") {
            throw Error(ErrorKind::ParseError, "malformed Q(sqrt2) literal '" + std::string(text) + "'");
        }
        if (term.size() >= root.size() && term.compare(term.size() - root.size(), root.size(), root) == 0) {
            std::string coeff = term.substr(0, term.size() - root.size());
            Rational b;
            if (coeff.empty() || coeff == "+") {
                b = 1;
            } else if (coeff == "-") {
                b = -1;
            } else {
                if (coeff.back() != '*') {
                    throw Error(ErrorKind::ParseError,
                                "expected '*' before sqrt2 in '" + std::string(text) + "'");
                }
                coeff.pop_back();
                b = parse_rational(coeff);
            }
            out += QuadRational(Rational(0), b);
        } else {
            out += QuadRational(parse_rational(term));
        }
    }
    return out;
}

QuadRational quad_ops(const QuadRational &x, const QuadRational &y, QuadOp op) {
    switch (op) {
    case QuadOp::Add: return x + y;
    case QuadOp::Sub: return x - y;
    case QuadOp::Scale:
        if (!y.is_rational()) {
            throw Error(ErrorKind::InvalidSpec, "scale coefficient must be rational");
        }
        return y.rational_part() * x;
    }
    return x;
}

double quad_to_real(const QuadRational &x) { return x.to_double(); }

ProbabilityTag ProbabilityTag::irrational(QuadRational p) {
    if (p.is_rational()) {
        throw Error(ErrorKind::InvalidTags, "irrational tag with zero sqrt2 component");
    }
    return ProbabilityTag(std::move(p));
}

} // namespace bornlab
