#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tcmax {

/// Exact rational in lowest terms with positive denominator (GMP mpq).
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Dense vector of exact rationals.
using Vector = std::vector<Rational>;

/// Thrown when a "p/q" string cannot be parsed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses "p/q" or "p" (optional leading '-'); rejects zero denominators.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering; integers render without "/1".
std::string to_string(const Rational& value);

std::string to_string(std::span<const Rational> values);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);

/// y += alpha * x
void axpy(const Rational& alpha, std::span<const Rational> x, std::span<Rational> y);

bool is_zero(std::span<const Rational> v);

Vector scaled(std::span<const Rational> v, const Rational& factor);
Vector added(std::span<const Rational> a, std::span<const Rational> b);
Vector subtracted(std::span<const Rational> a, std::span<const Rational> b);
Vector negated(std::span<const Rational> v);

/// Sum of absolute values.
Rational norm1(std::span<const Rational> v);

/// Rescales a nonzero vector to coprime integer entries, preserving direction.
Vector primitive(std::span<const Rational> v);

Vector unit_vector(std::size_t dim, std::size_t index);

/// 2^(-k) as an exact rational.
Rational pow2_neg(unsigned k);

} // namespace tcmax
