#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cyclotomic.hpp"
#include "polynomial.hpp"

namespace fflab {

/// |x| for x in K_infty: either 0 or q^exponent.
struct Magnitude {
    bool zero = true;
    long exponent = 0;

    static Magnitude of_zero() { return {}; }
    static Magnitude power(long k) { return {false, k}; }

    Rational value(std::uint32_t q) const { return zero ? Rational(0) : qpow(q, exponent); }

    /// ord with the convention ord 0 = -infinity (LONG_MIN).
    long ord() const { return zero ? LONG_MIN : exponent; }

    friend bool operator==(const Magnitude&, const Magnitude&) = default;
    friend bool operator<(const Magnitude& a, const Magnitude& b) { return a.ord() < b.ord(); }
    friend bool operator<=(const Magnitude& a, const Magnitude& b) { return a.ord() <= b.ord(); }
};

/// Element of F_q((1/t)) known exactly on the exponents >= floor.
/// When `exact` is set every coefficient below floor is zero (a Laurent
/// polynomial); otherwise those coefficients are unknown and reading them is
/// a PrecisionError.
class LaurentElement {
public:
    LaurentElement() = default;

    static LaurentElement exact_zero() { return LaurentElement(0, {}, true); }

    static LaurentElement from_polynomial(const Polynomial& a) { return LaurentElement(0, a.coeffs(), true); }

    static LaurentElement monomial(FieldElement c, long k) { return LaurentElement(k, {c}, true); }

    /// Coefficients for exponents floor, floor+1, ...
    LaurentElement(long floor, std::vector<FieldElement> coeffs, bool exact)
        : floor_(floor), c_(std::move(coeffs)), exact_(exact) {
        normalize();
    }

    /// Builds from a sparse exponent -> coefficient map.
    static LaurentElement from_terms(const std::map<long, FieldElement>& terms, long floor, bool exact) {
        long top = floor - 1;
        for (auto& [k, c] : terms) {
            if (k < floor && c.code != 0) throw PrecisionError("term below the declared floor");
            if (c.code != 0) top = std::max(top, k);
        }
        std::vector<FieldElement> v(static_cast<std::size_t>(std::max(0L, top - floor + 1)));
        for (auto& [k, c] : terms)
            if (k >= floor && k <= top) v[static_cast<std::size_t>(k - floor)] = c;
        return LaurentElement(floor, std::move(v), exact);
    }

    long floor() const { return floor_; }
    bool exact() const { return exact_; }
    /// Largest exponent with a nonzero coefficient in the window (floor-1 if none).
    long top() const { return floor_ + static_cast<long>(c_.size()) - 1; }

    FieldElement coeff(long k) const {
        if (k < floor_) {
            if (exact_) return FieldElement{0};
            throw PrecisionError("coefficient t^" + std::to_string(k) + " is below the exact floor t^" +
                                 std::to_string(floor_));
        }
        const long i = k - floor_;
        return i < static_cast<long>(c_.size()) ? c_[static_cast<std::size_t>(i)] : FieldElement{0};
    }

    /// Certified zero: constructed exact with no nonzero coefficient.
    bool is_certified_zero() const { return exact_ && c_.empty(); }

    /// Coarsens the window: coefficients below `new_floor` become unknown.
    LaurentElement truncated(long new_floor) const {
        if (new_floor <= floor_) {
            if (exact_) return LaurentElement(new_floor, window(new_floor, top()), false);
            if (new_floor == floor_) return *this;
            throw PrecisionError("cannot refine a window below its floor");
        }
        return LaurentElement(new_floor, window(new_floor, top()), false);
    }

    /// Copy of the coefficients on [lo, hi] (reads through coeff, so precision-checked).
    std::vector<FieldElement> window(long lo, long hi) const {
        std::vector<FieldElement> v;
        for (long k = lo; k <= hi; ++k) v.push_back(coeff(k));
        return v;
    }

    friend bool operator==(const LaurentElement&, const LaurentElement&) = default;

    std::string to_string(const FieldSpec& F) const {
        std::string s;
        for (long k = top(); k >= floor_; --k) {
            const auto c = coeff(k);
            if (c.code == 0) continue;
            if (!s.empty()) s += " + ";
            s += (F.f() == 1 ? std::to_string(c.code) : "{" + std::to_string(c.code) + "}");
            if (k != 0) s += "*t^" + std::to_string(k);
        }
        if (s.empty()) s = "0";
        if (!exact_) s += " + O(t^" + std::to_string(floor_ - 1) + ")";
        return s;
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back().code == 0) c_.pop_back();
        if (exact_) {
            std::size_t lead = 0;
            while (lead < c_.size() && c_[lead].code == 0) ++lead;
            if (lead == c_.size()) {
                c_.clear();
                floor_ = 0;
            } else if (lead > 0) {
                c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
                floor_ += static_cast<long>(lead);
            }
        }
    }

    long floor_ = 0;
    std::vector<FieldElement> c_;
    bool exact_ = true;
};

namespace laurent {

inline LaurentElement add(const FieldSpec& F, const LaurentElement& a, const LaurentElement& b) {
    const bool exact = a.exact() && b.exact();
    long lo;
    if (exact) {
        lo = std::min(a.floor(), b.floor());
    } else if (a.exact()) {
        lo = b.floor();
    } else if (b.exact()) {
        lo = a.floor();
    } else {
        lo = std::max(a.floor(), b.floor());
    }
    const long hi = std::max(a.top(), b.top());
    std::vector<FieldElement> v;
    for (long k = lo; k <= hi; ++k) v.push_back(F.add(a.coeff(k), b.coeff(k)));
    return LaurentElement(lo, std::move(v), exact);
}

inline LaurentElement neg(const FieldSpec& F, const LaurentElement& a) {
    std::vector<FieldElement> v;
    for (long k = a.floor(); k <= a.top(); ++k) v.push_back(F.neg(a.coeff(k)));
    return LaurentElement(a.floor(), std::move(v), a.exact());
}

inline LaurentElement sub(const FieldSpec& F, const LaurentElement& a, const LaurentElement& b) {
    return add(F, a, neg(F, b));
}

/// Product; the exact window of the result is [max(fa + top b, fb + top a), ...]
/// where an exact factor contributes no constraint.
inline LaurentElement mul(const FieldSpec& F, const LaurentElement& a, const LaurentElement& b) {
    if (a.is_certified_zero() || b.is_certified_zero()) return LaurentElement::exact_zero();
    const bool exact = a.exact() && b.exact();
    long lo = a.floor() + b.floor();
    if (!a.exact()) lo = std::max(lo, a.floor() + b.top());
    if (!b.exact()) lo = std::max(lo, b.floor() + a.top());
    const long hi = a.top() + b.top();
    if (hi < lo) return LaurentElement(lo, {}, exact);
    std::vector<FieldElement> v(static_cast<std::size_t>(hi - lo + 1));
    for (long i = a.floor(); i <= a.top(); ++i) {
        const FieldElement ai = a.coeff(i);
        if (ai.code == 0) continue;
        for (long j = b.floor(); j <= b.top(); ++j) {
            const long k = i + j;
            if (k < lo) continue;
            auto& slot = v[static_cast<std::size_t>(k - lo)];
            slot = F.add(slot, F.mul(ai, b.coeff(j)));
        }
    }
    return LaurentElement(lo, std::move(v), exact);
}

inline LaurentElement scale(const FieldSpec& F, FieldElement s, const LaurentElement& a) {
    if (s.code == 0) return LaurentElement::exact_zero();
    std::vector<FieldElement> v;
    for (long k = a.floor(); k <= a.top(); ++k) v.push_back(F.mul(s, a.coeff(k)));
    return LaurentElement(a.floor(), std::move(v), a.exact());
}

/// Multiplication by t^k.
inline LaurentElement shift(const LaurentElement& a, long k) {
    return LaurentElement(a.floor() + k, a.window(a.floor(), a.top()), a.exact());
}

/// Laurent expansion of a/r at the infinite place, exact on exponents >= floor.
inline LaurentElement expand_rational(const FieldSpec& F, const Polynomial& a, const Polynomial& r, long floor) {
    if (r.is_zero()) throw DomainError("expand_rational: zero denominator");
    if (a.is_zero()) return LaurentElement::exact_zero();
    // a t^N = quot * r + rem  =>  a/r = quot t^{-N} + rem/(r t^N), the tail has ord < -N
    const long N = std::max(0L, -floor);
    Polynomial shifted = poly::mul(F, a, Polynomial::monomial(F.one(), static_cast<int>(N)));
    auto [quot, rem] = poly::divmod(F, shifted, r);
    if (rem.is_zero()) {
        return LaurentElement(-N, quot.coeffs(), true);
    }
    LaurentElement e(-N, quot.coeffs(), false);
    if (floor > -N) return e.truncated(floor);
    return e;
}

inline Magnitude abs_value(const LaurentElement& x) {
    for (long k = x.top(); k >= x.floor(); --k)
        if (x.coeff(k).code != 0) return Magnitude::power(k);
    if (x.exact()) return Magnitude::of_zero();
    throw PrecisionError("absolute value undetermined: no nonzero coefficient at or above t^" +
                         std::to_string(x.floor()));
}

/// ||x|| = |sum_{i <= -1} x_i t^i|.
inline Magnitude fractional_norm(const LaurentElement& x) {
    for (long k = std::min(-1L, x.top()); k >= x.floor(); --k)
        if (x.coeff(k).code != 0) return Magnitude::power(k);
    if (x.exact()) return Magnitude::of_zero();
    throw PrecisionError("fractional norm undetermined above t^" + std::to_string(x.floor()));
}

/// Decides ||x|| < q^{-m}, reading only the exponents -1..-m.
inline bool fractional_norm_below(const LaurentElement& x, long m) {
    for (long k = -1; k >= -m; --k)
        if (x.coeff(k).code != 0) return false;
    return true;
}

/// psi(x) = e_q(x_{-1}).
inline CyclotomicValue psi(const FieldSpec& F, const LaurentElement& x) { return char_e_q(F, x.coeff(-1)); }

/// Polynomial part sum_{i >= 0} x_i t^i.
inline Polynomial integral_part(const LaurentElement& x) {
    std::vector<FieldElement> v;
    for (long k = 0; k <= x.top(); ++k) v.push_back(x.coeff(k));
    return Polynomial(std::move(v));
}

/// Fractional part sum_{i <= -1} x_i t^i, same floor.
inline LaurentElement fractional_part(const LaurentElement& x) {
    if (x.floor() > -1) return x.exact() ? LaurentElement::exact_zero() : LaurentElement(x.floor(), {}, false);
    return LaurentElement(x.floor(), x.window(x.floor(), -1), x.exact());
}

}  // namespace laurent

/// The ball {theta : |theta - center| < q^{-Y}}.
struct BallSpec {
    LaurentElement center;
    long radius_exponent = 0;  // Y
};

/// Haar measure q^{-Y}, normalized so that T has measure 1.
inline Rational ball_measure(std::uint32_t q, const BallSpec& b) {
    if (b.radius_exponent < 0) throw DomainError("ball_measure expects Y >= 0");
    return qpow(q, -b.radius_exponent);
}

}  // namespace fflab
