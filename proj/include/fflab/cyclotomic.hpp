#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <mpfr.h>

#include "finite_field.hpp"
#include "numeric.hpp"

namespace fflab {

/// Exact element of Q(zeta_p) in the power basis 1, zeta, ..., zeta^{p-2}.
/// The relation 1 + zeta + ... + zeta^{p-1} = 0 is applied eagerly, so the
/// coefficient vector is a unique normal form.
class CyclotomicValue {
public:
    CyclotomicValue() = default;
    explicit CyclotomicValue(std::uint32_t p) : p_(p), c_(p - 1) {}
    CyclotomicValue(std::uint32_t p, const Rational& r) : CyclotomicValue(p) {
        c_[0] = r;
        c_[0].canonicalize();
    }

    /// zeta_p^k for any integer k.
    static CyclotomicValue zeta(std::uint32_t p, long long k) {
        CyclotomicValue z(p);
        long long r = k % static_cast<long long>(p);
        if (r < 0) r += p;
        z.add_power(static_cast<std::uint32_t>(r), Rational(1));
        return z;
    }

    /// sum_k counts[k] zeta^k for k in [0, p).
    static CyclotomicValue from_histogram(std::uint32_t p, std::span<const Integer> counts) {
        CyclotomicValue v(p);
        for (std::uint32_t k = 0; k + 1 < p; ++k) v.c_[k] = Rational(counts[k] - counts[p - 1]);
        return v;
    }

    std::uint32_t p() const { return p_; }
    const std::vector<Rational>& coefficients() const { return c_; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (x != 0) return false;
        return true;
    }

    bool is_rational() const {
        for (std::size_t k = 1; k < c_.size(); ++k)
            if (c_[k] != 0) return false;
        return true;
    }

    Rational rational_value() const {
        if (!is_rational()) throw DomainError("cyclotomic value is not rational");
        return c_.empty() ? Rational(0) : c_[0];
    }

    CyclotomicValue& operator+=(const CyclotomicValue& o) {
        if (o.p_ == 0) return *this;
        adopt(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    CyclotomicValue& operator-=(const CyclotomicValue& o) {
        if (o.p_ == 0) return *this;
        adopt(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    CyclotomicValue& operator*=(Rational s) {
        s.canonicalize();
        for (auto& x : c_) x *= s;
        return *this;
    }

    friend CyclotomicValue operator+(CyclotomicValue a, const CyclotomicValue& b) { return a += b; }
    friend CyclotomicValue operator-(CyclotomicValue a, const CyclotomicValue& b) { return a -= b; }
    friend CyclotomicValue operator*(CyclotomicValue a, const Rational& s) { return a *= s; }
    friend CyclotomicValue operator-(CyclotomicValue a) { return a *= Rational(-1); }

    friend CyclotomicValue operator*(const CyclotomicValue& a, const CyclotomicValue& b) {
        if (a.p_ == 0) return a;
        if (b.p_ == 0) return b;
        if (a.p_ != b.p_) throw DomainError("cyclotomic values of different conductors");
        const std::uint32_t p = a.p_;
        std::vector<Rational> full(p);
        for (std::uint32_t i = 0; i + 1 < p; ++i) {
            if (a.c_[i] == 0) continue;
            for (std::uint32_t j = 0; j + 1 < p; ++j) {
                if (b.c_[j] == 0) continue;
                full[(i + j) % p] += a.c_[i] * b.c_[j];
            }
        }
        CyclotomicValue r(p);
        for (std::uint32_t k = 0; k + 1 < p; ++k) r.c_[k] = full[k] - full[p - 1];
        return r;
    }

    friend bool operator==(const CyclotomicValue& a, const CyclotomicValue& b) {
        if (a.p_ == b.p_) return a.c_ == b.c_;
        // an unset value compares as zero
        if (a.p_ == 0) return b.is_zero();
        if (b.p_ == 0) return a.is_zero();
        return false;
    }

    /// Complex conjugation zeta^k -> zeta^{p-k}.
    CyclotomicValue conj() const {
        if (p_ == 0) return *this;
        CyclotomicValue r(p_);
        for (std::uint32_t k = 0; k + 1 < p_; ++k) r.add_power((p_ - k) % p_, c_[k]);
        return r;
    }

    bool is_real() const { return *this == conj(); }

    /// "[c_0,...,c_{p-2}]" with exact rationals.
    std::string to_string() const {
        std::string s = "[";
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (k) s += ",";
            s += c_[k].get_str();
        }
        return s + "]";
    }

    static CyclotomicValue parse(std::uint32_t p, const std::string& text) {
        if (text.size() < 2 || text.front() != '[' || text.back() != ']')
            throw std::invalid_argument("bad cyclotomic literal: " + text);
        CyclotomicValue v(p);
        std::size_t k = 0, start = 1;
        while (start < text.size() - 1) {
            std::size_t end = text.find(',', start);
            if (end == std::string::npos) end = text.size() - 1;
            if (k >= v.c_.size()) throw std::invalid_argument("too many cyclotomic coefficients: " + text);
            v.c_[k++] = parse_rational(text.substr(start, end - start));
            start = end + 1;
        }
        if (k != v.c_.size()) throw std::invalid_argument("too few cyclotomic coefficients: " + text);
        return v;
    }

private:
    void adopt(const CyclotomicValue& o) {
        if (p_ == 0 && o.p_ != 0) *this = CyclotomicValue(o.p_);
        if (o.p_ != 0 && o.p_ != p_) throw DomainError("cyclotomic values of different conductors");
    }

    void add_power(std::uint32_t k, Rational x) {
        x.canonicalize();
        if (k + 1 < p_) {
            c_[k] += x;
        } else {
            for (auto& y : c_) y -= x;
        }
    }

    std::uint32_t p_ = 0;
    std::vector<Rational> c_;
};

/// e_q(a) = zeta_p^{tr(a)}.
inline CyclotomicValue char_e_q(const FieldSpec& F, FieldElement a) { return CyclotomicValue::zeta(F.p(), F.trace(a)); }

namespace detail {

/// Certified enclosure [lo, hi] of the real part of x under zeta -> exp(2 pi i/p).
/// Each cosine is rounded outward and every product and sum is rounded in the
/// safe direction, so the true value lies in the returned interval.
class RealEnclosure {
public:
    explicit RealEnclosure(mpfr_prec_t prec) {
        mpfr_inits2(prec, lo_, hi_, a_, b_, t_, u_, pi_lo_, pi_hi_, static_cast<mpfr_ptr>(nullptr));
    }
    ~RealEnclosure() { mpfr_clears(lo_, hi_, a_, b_, t_, u_, pi_lo_, pi_hi_, static_cast<mpfr_ptr>(nullptr)); }
    RealEnclosure(const RealEnclosure&) = delete;
    RealEnclosure& operator=(const RealEnclosure&) = delete;

    /// Returns -1 / +1 when the enclosure excludes zero, 0 when undecided.
    int sign(const CyclotomicValue& x) {
        const std::uint32_t p = x.p();
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
        mpfr_const_pi(pi_lo_, MPFR_RNDD);
        mpfr_const_pi(pi_hi_, MPFR_RNDU);
        for (std::uint32_t k = 0; k + 1 < p; ++k) {
            const Rational& c = x.coefficients()[k];
            if (c == 0) continue;
            cos_enclosure(k, p);  // a_ <= cos(2 pi k/p) <= b_
            // c * [a_, b_]
            mpfr_t clo, chi;
            mpfr_inits2(mpfr_get_prec(lo_), clo, chi, static_cast<mpfr_ptr>(nullptr));
            mpfr_set_q(clo, c.get_mpq_t(), MPFR_RNDD);
            mpfr_set_q(chi, c.get_mpq_t(), MPFR_RNDU);
            // product interval endpoints: min/max over the four corner products
            mpfr_t cand[4][2];
            mpfr_srcptr cs[2] = {clo, chi};
            mpfr_srcptr ys[2] = {a_, b_};
            for (int i = 0; i < 4; ++i) {
                mpfr_inits2(mpfr_get_prec(lo_), cand[i][0], cand[i][1], static_cast<mpfr_ptr>(nullptr));
                mpfr_mul(cand[i][0], cs[i / 2], ys[i % 2], MPFR_RNDD);
                mpfr_mul(cand[i][1], cs[i / 2], ys[i % 2], MPFR_RNDU);
            }
            mpfr_set(t_, cand[0][0], MPFR_RNDD);
            mpfr_set(u_, cand[0][1], MPFR_RNDU);
            for (int i = 1; i < 4; ++i) {
                mpfr_min(t_, t_, cand[i][0], MPFR_RNDD);
                mpfr_max(u_, u_, cand[i][1], MPFR_RNDU);
            }
            mpfr_add(lo_, lo_, t_, MPFR_RNDD);
            mpfr_add(hi_, hi_, u_, MPFR_RNDU);
            for (auto& c2 : cand) mpfr_clears(c2[0], c2[1], static_cast<mpfr_ptr>(nullptr));
            mpfr_clears(clo, chi, static_cast<mpfr_ptr>(nullptr));
        }
        if (mpfr_sgn(lo_) > 0) return 1;
        if (mpfr_sgn(hi_) < 0) return -1;
        return 0;
    }

    double midpoint() const {
        return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
    }

private:
    void cos_enclosure(std::uint32_t k, std::uint32_t p) {
        // angle lies in [t_, u_]; cos is 1-Lipschitz, so widen cos(t_) by the width
        mpfr_mul_ui(t_, pi_lo_, 2 * k, MPFR_RNDD);
        mpfr_div_ui(t_, t_, p, MPFR_RNDD);
        mpfr_mul_ui(u_, pi_hi_, 2 * k, MPFR_RNDU);
        mpfr_div_ui(u_, u_, p, MPFR_RNDU);
        mpfr_sub(u_, u_, t_, MPFR_RNDU);
        mpfr_cos(a_, t_, MPFR_RNDD);
        mpfr_cos(b_, t_, MPFR_RNDU);
        mpfr_sub(a_, a_, u_, MPFR_RNDD);
        mpfr_add(b_, b_, u_, MPFR_RNDU);
    }

    mpfr_t lo_, hi_, a_, b_, t_, u_, pi_lo_, pi_hi_;
};

}  // namespace detail

/// Exact sign of a real element of Q(zeta_p) under the standard embedding.
/// Zero is detected algebraically; otherwise the enclosure is refined until it
/// excludes zero, which terminates because a nonzero algebraic number has
/// nonzero absolute value.
inline int real_sign(const CyclotomicValue& y) {
    if (y.p() == 0 || y.is_zero()) return 0;
    if (!y.is_real()) throw DomainError("real_sign of a non-real cyclotomic value");
    if (y.is_rational()) return sgn(y.rational_value());
    for (mpfr_prec_t prec = 64;; prec *= 2) {
        detail::RealEnclosure enc(prec);
        if (int s = enc.sign(y)) return s;
    }
}

/// Approximate real value (for reporting only).
inline double approximate_real(const CyclotomicValue& y) {
    if (y.p() == 0) return 0.0;
    detail::RealEnclosure enc(128);
    enc.sign(y);
    return enc.midpoint();
}

enum class MagnitudeOrder { LessOrEqual, Greater };

/// Decides |x|^exponent <= bound exactly, |x| the complex absolute value.
/// Reduced to comparing (x * conj x)^exponent against bound^2 when bound >= 0.
inline MagnitudeOrder cyclo_mag_compare(const CyclotomicValue& x, const Rational& bound, unsigned exponent) {
    if (exponent == 0) throw DomainError("cyclo_mag_compare needs a positive exponent");
    if (bound < 0) return MagnitudeOrder::Greater;
    const std::uint32_t p = x.p() == 0 ? 2 : x.p();
    CyclotomicValue norm = x.p() == 0 ? CyclotomicValue(p) : x * x.conj();
    CyclotomicValue lhs(p, Rational(1));
    if (exponent % 2 == 0) {
        for (unsigned i = 0; i < exponent / 2; ++i) lhs = lhs * norm;
        CyclotomicValue diff = lhs - CyclotomicValue(p, bound);
        return real_sign(diff) <= 0 ? MagnitudeOrder::LessOrEqual : MagnitudeOrder::Greater;
    }
    for (unsigned i = 0; i < exponent; ++i) lhs = lhs * norm;
    CyclotomicValue diff = lhs - CyclotomicValue(p, bound * bound);
    return real_sign(diff) <= 0 ? MagnitudeOrder::LessOrEqual : MagnitudeOrder::Greater;
}

/// |x| as a double, for reporting measured ratios.
inline double approximate_abs(const CyclotomicValue& x) {
    if (x.p() == 0) return 0.0;
    const double n2 = approximate_real(x * x.conj());
    return n2 <= 0 ? 0.0 : std::sqrt(n2);
}

}  // namespace fflab
