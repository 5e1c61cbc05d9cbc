#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace fflab {

using Integer = mpz_class;
using Rational = mpq_class;

/// Raised when an operation would read a Laurent coefficient below its exact window.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an enumeration would exceed its configured work budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated preconditions on mathematical inputs (bad degrees, p <= d, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline Integer ipow(std::uint64_t base, unsigned exponent) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exponent);
    return r;
}

/// q^k for any integer k, as an exact rational.
inline Rational qpow(std::uint64_t q, long k) {
    if (k >= 0) return Rational(ipow(q, static_cast<unsigned>(k)));
    Rational r(Integer(1), ipow(q, static_cast<unsigned>(-k)));
    r.canonicalize();
    return r;
}

/// Overflow-checked q^k in 64 bits, used for enumeration sizes. Returns 0 on overflow.
inline std::uint64_t upow_checked(std::uint64_t base, unsigned exponent) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < exponent; ++i) {
        if (base != 0 && r > UINT64_MAX / base) return 0;
        r *= base;
    }
    return r;
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

/// Lossless "num/den" form, always with an explicit denominator.
inline std::string to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
    r.canonicalize();
    return r;
}

inline long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline long ceil_div(long a, long b) { return -floor_div(-a, b); }

}  // namespace fflab
