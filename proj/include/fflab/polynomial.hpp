#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finite_field.hpp"

namespace fflab {

/// Element of F_q[t]; coefficients low to high with no trailing zeros (zero is empty).
/// Arithmetic goes through a FieldSpec, which the value does not carry.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<FieldElement> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial monomial(FieldElement c, int degree) {
        std::vector<FieldElement> v(static_cast<std::size_t>(degree) + 1);
        v.back() = c;
        return Polynomial(std::move(v));
    }
    static Polynomial constant(FieldElement c) { return Polynomial({c}); }
    static Polynomial t() { return Polynomial({FieldElement{0}, FieldElement{1}}); }

    bool is_zero() const { return c_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    FieldElement coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(i)] : FieldElement{0};
    }
    FieldElement leading() const { return c_.empty() ? FieldElement{0} : c_.back(); }
    const std::vector<FieldElement>& coeffs() const { return c_; }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim() {
        while (!c_.empty() && c_.back().code == 0) c_.pop_back();
    }
    std::vector<FieldElement> c_;
};

namespace poly {

inline Polynomial add(const FieldSpec& F, const Polynomial& a, const Polynomial& b) {
    std::vector<FieldElement> r(std::max(a.coeffs().size(), b.coeffs().size()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.add(a.coeff(int(i)), b.coeff(int(i)));
    return Polynomial(std::move(r));
}

inline Polynomial neg(const FieldSpec& F, const Polynomial& a) {
    std::vector<FieldElement> r(a.coeffs().size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.neg(a.coeffs()[i]);
    return Polynomial(std::move(r));
}

inline Polynomial sub(const FieldSpec& F, const Polynomial& a, const Polynomial& b) { return add(F, a, neg(F, b)); }

inline Polynomial scale(const FieldSpec& F, FieldElement s, const Polynomial& a) {
    std::vector<FieldElement> r(a.coeffs().size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.mul(s, a.coeffs()[i]);
    return Polynomial(std::move(r));
}

inline Polynomial mul(const FieldSpec& F, const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<FieldElement> r(a.coeffs().size() + b.coeffs().size() - 1);
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
        if (a.coeffs()[i].code == 0) continue;
        for (std::size_t j = 0; j < b.coeffs().size(); ++j)
            r[i + j] = F.add(r[i + j], F.mul(a.coeffs()[i], b.coeffs()[j]));
    }
    return Polynomial(std::move(r));
}

inline Polynomial pow(const FieldSpec& F, const Polynomial& a, unsigned k) {
    Polynomial r = Polynomial::constant(F.one());
    for (unsigned i = 0; i < k; ++i) r = mul(F, r, a);
    return r;
}

/// Euclidean division a = quot * b + rem with deg rem < deg b.
inline std::pair<Polynomial, Polynomial> divmod(const FieldSpec& F, const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    std::vector<FieldElement> rem = a.coeffs();
    const int db = b.degree();
    if (a.degree() < db) return {Polynomial{}, a};
    std::vector<FieldElement> quot(static_cast<std::size_t>(a.degree() - db) + 1);
    const FieldElement inv_lead = F.inv(b.leading());
    for (int k = a.degree(); k >= db; --k) {
        const FieldElement c = F.mul(rem[static_cast<std::size_t>(k)], inv_lead);
        quot[static_cast<std::size_t>(k - db)] = c;
        if (c.code == 0) continue;
        for (int i = 0; i <= db; ++i) {
            auto& slot = rem[static_cast<std::size_t>(k - db + i)];
            slot = F.sub(slot, F.mul(c, b.coeff(i)));
        }
    }
    rem.resize(static_cast<std::size_t>(db));
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

inline Polynomial monic(const FieldSpec& F, const Polynomial& a) {
    if (a.is_zero()) return a;
    return scale(F, F.inv(a.leading()), a);
}

/// Monic greatest common divisor; gcd(0, 0) is rejected.
inline Polynomial gcd(const FieldSpec& F, Polynomial a, Polynomial b) {
    if (a.is_zero() && b.is_zero()) throw DomainError("gcd(0, 0) is undefined");
    while (!b.is_zero()) {
        auto r = divmod(F, a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(F, a);
}

inline FieldElement eval(const FieldSpec& F, const Polynomial& a, FieldElement x) {
    FieldElement acc{0};
    for (int i = a.degree(); i >= 0; --i) acc = F.add(F.mul(acc, x), a.coeff(i));
    return acc;
}

/// Polynomial whose coefficients are the base-q digits of `index` (length `len`).
inline Polynomial from_index(std::uint64_t index, std::uint32_t q, int len) {
    std::vector<FieldElement> c(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        c[static_cast<std::size_t>(i)] = FieldElement{static_cast<std::uint32_t>(index % q)};
        index /= q;
    }
    return Polynomial(std::move(c));
}

inline Polynomial map_coefficients(const FieldEmbedding& emb, const Polynomial& a) {
    std::vector<FieldElement> c;
    c.reserve(a.coeffs().size());
    for (auto x : a.coeffs()) c.push_back(emb(x));
    return Polynomial(std::move(c));
}

inline std::string to_string(const FieldSpec& F, const Polynomial& a) {
    if (a.is_zero()) return "0";
    std::string s;
    auto elem = [&](FieldElement x) {
        if (F.f() == 1) return std::to_string(x.code);
        std::string r = "[";
        auto c = F.coordinates(x);
        for (std::size_t i = 0; i < c.size(); ++i) r += (i ? "," : "") + std::to_string(c[i]);
        return r + "]";
    };
    for (int i = a.degree(); i >= 0; --i) {
        if (a.coeff(i).code == 0) continue;
        if (!s.empty()) s += " + ";
        s += elem(a.coeff(i));
        if (i >= 1) s += "*t";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
}

}  // namespace poly
}  // namespace fflab
