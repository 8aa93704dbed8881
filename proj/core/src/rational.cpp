#include "tcmax/rational.hpp"

#include <cctype>

namespace tcmax {

namespace {

Integer parse_integer(std::string_view text, std::string_view whole) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos == text.size()) {
        throw ParseError("malformed rational \"" + std::string(whole) + "\"");
    }
    for (std::size_t i = pos; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw ParseError("malformed rational \"" + std::string(whole) + "\"");
        }
    }
    Integer value(std::string(text.substr(pos)));
    return negative ? Integer(-value) : value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

Rational parse_rational(std::string_view text) {
    const auto whole = trim(text);
    const auto slash = whole.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_integer(whole, whole));
    }
    const Integer num = parse_integer(trim(whole.substr(0, slash)), whole);
    const auto den_text = trim(whole.substr(slash + 1));
    if (!den_text.empty() && (den_text.front() == '-' || den_text.front() == '+')) {
        throw ParseError("denominator must be unsigned in \"" + std::string(whole) + "\"");
    }
    const Integer den = parse_integer(den_text, whole);
    if (den == 0) {
        throw ParseError("zero denominator in \"" + std::string(whole) + "\"");
    }
    return Rational(num, den);
}

std::string to_string(const Rational& value) {
    if (boost::multiprecision::denominator(value) == 1) {
        return boost::multiprecision::numerator(value).str();
    }
    return value.str();
}

std::string to_string(std::span<const Rational> values) {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += to_string(values[i]);
    }
    out += ")";
    return out;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    Rational sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_zero() && !b[i].is_zero()) sum += a[i] * b[i];
    }
    return sum;
}

void axpy(const Rational& alpha, std::span<const Rational> x, std::span<Rational> y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
    if (alpha.is_zero()) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i].is_zero()) y[i] += alpha * x[i];
    }
}

bool is_zero(std::span<const Rational> v) {
    for (const auto& x : v) {
        if (!x.is_zero()) return false;
    }
    return true;
}

Vector scaled(std::span<const Rational> v, const Rational& factor) {
    Vector out(v.begin(), v.end());
    for (auto& x : out) x *= factor;
    return out;
}

Vector added(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size()) throw std::invalid_argument("added: dimension mismatch");
    Vector out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Vector subtracted(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size()) throw std::invalid_argument("subtracted: dimension mismatch");
    Vector out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Vector negated(std::span<const Rational> v) {
    Vector out(v.begin(), v.end());
    for (auto& x : out) x = -x;
    return out;
}

Rational norm1(std::span<const Rational> v) {
    Rational sum = 0;
    for (const auto& x : v) sum += abs(x);
    return sum;
}

Vector primitive(std::span<const Rational> v) {
    Integer lcm_den = 1;
    for (const auto& x : v) {
        if (!x.is_zero()) lcm_den = boost::multiprecision::lcm(lcm_den, Integer(boost::multiprecision::denominator(x)));
    }
    Integer gcd_num = 0;
    for (const auto& x : v) {
        if (x.is_zero()) continue;
        const Integer scaled_num = boost::multiprecision::numerator(x) * (lcm_den / boost::multiprecision::denominator(x));
        gcd_num = boost::multiprecision::gcd(gcd_num, Integer(abs(scaled_num)));
    }
    if (gcd_num == 0) return Vector(v.begin(), v.end());
    const Rational factor(lcm_den, gcd_num);
    return scaled(v, factor);
}

Vector unit_vector(std::size_t dim, std::size_t index) {
    Vector e(dim, Rational(0));
    e.at(index) = 1;
    return e;
}

Rational pow2_neg(unsigned k) {
    Integer den = 1;
    den <<= k;
    return Rational(Integer(1), den);
}

} // namespace tcmax
