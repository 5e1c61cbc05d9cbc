#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace fflab {

/// Element of F_q encoded by its power-basis coordinates as base-p digits:
/// code = sum_i coord_i * p^i.  Only meaningful together with its FieldSpec.
struct FieldElement {
    std::uint32_t code = 0;
    friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

namespace detail {

using FpPoly = std::vector<std::uint32_t>;  // low -> high, over F_p

inline void fp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline FpPoly fp_mod(FpPoly a, const FpPoly& m, std::uint32_t p) {
    fp_trim(a);
    const std::size_t dm = m.size() - 1;
    std::uint64_t inv_lead = 1;
    {
        // m is not necessarily monic here (gcd remainders)
        std::uint64_t b = m.back(), e = p - 2;
        while (e) {
            if (e & 1) inv_lead = inv_lead * b % p;
            b = b * b % p;
            e >>= 1;
        }
    }
    while (a.size() > dm) {
        const std::uint64_t c = a.back() * inv_lead % p;
        const std::size_t shift = a.size() - 1 - dm;
        for (std::size_t i = 0; i <= dm; ++i)
            a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + (p - c) * m[i]) % p);
        fp_trim(a);
    }
    return a;
}

inline FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t(a[i]) * b[j]) % p);
    return fp_mod(std::move(r), m, p);
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, std::uint32_t p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        FpPoly r = fp_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t k = 2; k * k <= n; ++k)
        if (n % k == 0) return false;
    return true;
}

/// Ben-Or irreducibility test for a monic modulus over F_p.
inline bool fp_irreducible(const FpPoly& m, std::uint32_t p) {
    const std::size_t f = m.size() - 1;
    if (f == 1) return true;
    FpPoly x{0, 1};
    FpPoly xp = x;
    for (std::size_t i = 1; i <= f / 2; ++i) {
        // xp <- xp^p mod m
        FpPoly acc{1};
        FpPoly base = xp;
        std::uint64_t e = p;
        while (e) {
            if (e & 1) acc = fp_mulmod(acc, base, m, p);
            base = fp_mulmod(base, base, m, p);
            e >>= 1;
        }
        xp = acc;
        FpPoly diff = xp;
        diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        fp_trim(diff);
        if (diff.empty()) return false;
        if (fp_gcd(m, diff, p).size() > 1) return false;
    }
    return true;
}

struct FieldTables {
    std::uint32_t p = 0, f = 0, q = 0;
    FpPoly modulus;                      // monic, degree f (empty for prime fields)
    std::vector<std::uint32_t> exp_table;  // generator powers, length 2(q-1)
    std::vector<std::uint32_t> log_table;  // length q, log_table[0] unused
    std::vector<std::uint16_t> add_table;  // q*q when q is small enough
    std::vector<std::uint32_t> neg_table;
    std::vector<std::uint32_t> trace_table;
    std::vector<std::uint32_t> pow_p;      // powers of p
};

}  // namespace detail

/// The finite field F_q, q = p^f, with an explicit modulus when f > 1.
/// Immutable; copies share the arithmetic tables.
class FieldSpec {
public:
    static FieldSpec prime(std::uint32_t p) { return FieldSpec(p, {}); }

    /// `modulus` lists the coefficients (low to high) of a monic irreducible
    /// polynomial over F_p; pass an empty vector (or degree one) for F_p itself.
    FieldSpec(std::uint32_t p, std::vector<std::uint32_t> modulus) {
        if (!detail::is_prime(p)) throw DomainError("field characteristic " + std::to_string(p) + " is not prime");
        auto t = std::make_shared<detail::FieldTables>();
        t->p = p;
        for (auto& c : modulus) c %= p;
        detail::fp_trim(modulus);
        if (modulus.size() <= 2) {
            t->f = 1;
            modulus.clear();
        } else {
            if (modulus.back() != 1) throw DomainError("field modulus must be monic");
            if (!detail::fp_irreducible(modulus, p)) throw DomainError("field modulus is reducible over F_p");
            t->f = static_cast<std::uint32_t>(modulus.size() - 1);
        }
        const std::uint64_t q = upow_checked(p, t->f);
        if (q == 0 || q > (1u << 20)) throw DomainError("field too large for table arithmetic (q <= 2^20)");
        t->q = static_cast<std::uint32_t>(q);
        t->modulus = std::move(modulus);
        t->pow_p.resize(t->f + 1, 1);
        for (std::uint32_t i = 1; i <= t->f; ++i) t->pow_p[i] = t->pow_p[i - 1] * p;
        tables_ = std::move(t);
        build_tables();
    }

    std::uint32_t p() const { return tables_->p; }
    std::uint32_t f() const { return tables_->f; }
    std::uint32_t q() const { return tables_->q; }
    const std::vector<std::uint32_t>& modulus() const { return tables_->modulus; }

    FieldElement zero() const { return {0}; }
    FieldElement one() const { return {1}; }
    FieldElement element(std::uint32_t code) const { return {code}; }

    FieldElement from_int(long long v) const {
        long long r = v % static_cast<long long>(p());
        if (r < 0) r += p();
        return {static_cast<std::uint32_t>(r)};
    }

    FieldElement from_coordinates(std::span<const std::uint32_t> coords) const {
        if (coords.size() > f()) throw DomainError("too many power-basis coordinates");
        std::uint32_t code = 0;
        for (std::size_t i = 0; i < coords.size(); ++i) code += (coords[i] % p()) * tables_->pow_p[i];
        return {code};
    }

    std::vector<std::uint32_t> coordinates(FieldElement x) const {
        std::vector<std::uint32_t> c(f());
        for (std::uint32_t i = 0; i < f(); ++i) {
            c[i] = x.code % p();
            x.code /= p();
        }
        return c;
    }

    FieldElement add(FieldElement a, FieldElement b) const {
        const auto& t = *tables_;
        if (!t.add_table.empty()) return {t.add_table[std::size_t(a.code) * t.q + b.code]};
        return {add_digits(a.code, b.code)};
    }
    FieldElement neg(FieldElement a) const { return {tables_->neg_table[a.code]}; }
    FieldElement sub(FieldElement a, FieldElement b) const { return add(a, neg(b)); }

    FieldElement mul(FieldElement a, FieldElement b) const {
        if (a.code == 0 || b.code == 0) return {0};
        const auto& t = *tables_;
        return {t.exp_table[t.log_table[a.code] + t.log_table[b.code]]};
    }

    FieldElement inv(FieldElement a) const {
        if (a.code == 0) throw DomainError("inverse of zero in F_q");
        const auto& t = *tables_;
        return {t.exp_table[(t.q - 1 - t.log_table[a.code]) % (t.q - 1)]};
    }

    FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }

    FieldElement pow(FieldElement a, long long k) const {
        if (a.code == 0) {
            if (k == 0) return one();
            if (k < 0) throw DomainError("negative power of zero");
            return zero();
        }
        const auto& t = *tables_;
        const long long ord = t.q - 1;
        long long e = (static_cast<long long>(t.log_table[a.code]) * (k % ord)) % ord;
        if (e < 0) e += ord;
        return {t.exp_table[static_cast<std::size_t>(e)]};
    }

    FieldElement frobenius(FieldElement a) const { return pow(a, p()); }

    /// Absolute trace F_q -> F_p, returned as an integer in [0, p).
    std::uint32_t trace(FieldElement a) const { return tables_->trace_table[a.code]; }

    /// A fixed generator of the multiplicative group.
    FieldElement generator() const { return {tables_->exp_table[1 % std::max<std::size_t>(1, tables_->exp_table.size())]}; }

    bool operator==(const FieldSpec& o) const {
        return tables_ == o.tables_ || (p() == o.p() && modulus() == o.modulus());
    }

    std::string describe() const {
        std::ostringstream os;
        os << "F_" << q();
        if (f() > 1) {
            os << " (modulus";
            for (auto c : modulus()) os << ' ' << c;
            os << ")";
        }
        return os.str();
    }

    /// Parses an integer representative "c" or a power-basis vector "[c0,c1,...]".
    FieldElement parse(const std::string& text) const {
        std::string s;
        for (char ch : text)
            if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
        if (s.empty()) throw std::invalid_argument("empty field element");
        if (s.front() == '[') {
            if (s.back() != ']') throw std::invalid_argument("unterminated coordinate vector: " + text);
            std::vector<std::uint32_t> coords;
            std::stringstream ss(s.substr(1, s.size() - 2));
            std::string item;
            while (std::getline(ss, item, ',')) {
                long long v = std::stoll(item);
                coords.push_back(from_int(v).code);
            }
            return from_coordinates(coords);
        }
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad field element: " + text);
        return from_int(v);
    }

private:
    std::uint32_t add_digits(std::uint32_t a, std::uint32_t b) const {
        const auto& t = *tables_;
        std::uint32_t r = 0;
        for (std::uint32_t i = 0; i < t.f; ++i) {
            r += ((a % t.p + b % t.p) % t.p) * t.pow_p[i];
            a /= t.p;
            b /= t.p;
        }
        return r;
    }

    std::uint32_t mul_slow(std::uint32_t a, std::uint32_t b) const {
        const auto& t = *tables_;
        if (t.f == 1) return static_cast<std::uint32_t>(std::uint64_t(a) * b % t.p);
        detail::FpPoly pa(t.f), pb(t.f);
        for (std::uint32_t i = 0; i < t.f; ++i) {
            pa[i] = a % t.p;
            a /= t.p;
            pb[i] = b % t.p;
            b /= t.p;
        }
        detail::fp_trim(pa);
        detail::fp_trim(pb);
        auto r = detail::fp_mulmod(pa, pb, t.modulus, t.p);
        std::uint32_t code = 0;
        for (std::size_t i = 0; i < r.size(); ++i) code += r[i] * t.pow_p[i];
        return code;
    }

    void build_tables() {
        auto& t = *tables_;
        const std::uint32_t q = t.q;
        t.neg_table.resize(q);
        for (std::uint32_t a = 0; a < q; ++a) {
            std::uint32_t r = 0, x = a;
            for (std::uint32_t i = 0; i < t.f; ++i) {
                r += ((t.p - x % t.p) % t.p) * t.pow_p[i];
                x /= t.p;
            }
            t.neg_table[a] = r;
        }
        if (q <= 1024) {
            t.add_table.resize(std::size_t(q) * q);
            for (std::uint32_t a = 0; a < q; ++a)
                for (std::uint32_t b = 0; b < q; ++b)
                    t.add_table[std::size_t(a) * q + b] = static_cast<std::uint16_t>(add_digits(a, b));
        }
        // primitive element search
        t.log_table.assign(q, 0);
        t.exp_table.assign(2 * std::size_t(q - 1), 0);
        if (q == 2) {
            t.exp_table = {1, 1};
        } else {
            for (std::uint32_t g = 2; g < q; ++g) {
                std::vector<char> seen(q, 0);
                std::uint32_t x = 1;
                std::uint32_t order = 0;
                do {
                    seen[x] = 1;
                    x = mul_slow(x, g);
                    ++order;
                } while (x != 1 && order < q);
                if (order == q - 1) {
                    x = 1;
                    for (std::uint32_t i = 0; i < q - 1; ++i) {
                        t.exp_table[i] = t.exp_table[i + q - 1] = x;
                        t.log_table[x] = i;
                        x = mul_slow(x, g);
                    }
                    break;
                }
            }
            if (t.exp_table[1] == 0) throw DomainError("no primitive element found; modulus not irreducible?");
        }
        t.trace_table.resize(q);
        for (std::uint32_t a = 0; a < q; ++a) {
            FieldElement x{a}, s{0};
            for (std::uint32_t i = 0; i < t.f; ++i) {
                s = add(s, x);
                x = frobenius(x);
            }
            if (s.code >= t.p) throw DomainError("trace left the prime field; inconsistent tables");
            t.trace_table[a] = s.code;
        }
    }

    // written only during construction
    std::shared_ptr<detail::FieldTables> tables_;
};

/// Embedding of a subfield F_q into an extension F_{q^l}, both given by explicit moduli.
/// The image of the base generator is the smallest-code root of the base modulus.
class FieldEmbedding {
public:
    FieldEmbedding(FieldSpec base, FieldSpec ext) : base_(std::move(base)), ext_(std::move(ext)) {
        if (base_.p() != ext_.p() || ext_.f() % base_.f() != 0)
            throw DomainError("extension " + ext_.describe() + " does not contain " + base_.describe());
        map_.resize(base_.q());
        if (base_.f() == 1) {
            for (std::uint32_t a = 0; a < base_.q(); ++a) map_[a] = ext_.from_int(a);
            return;
        }
        const auto& m = base_.modulus();
        FieldElement root{0};
        bool found = false;
        for (std::uint32_t c = 0; c < ext_.q() && !found; ++c) {
            FieldElement x{c}, acc{0};
            for (std::size_t i = m.size(); i-- > 0;) acc = ext_.add(ext_.mul(acc, x), ext_.from_int(m[i]));
            if (acc.code == 0) {
                root = x;
                found = true;
            }
        }
        if (!found) throw DomainError("base modulus has no root in the extension");
        for (std::uint32_t a = 0; a < base_.q(); ++a) {
            auto coords = base_.coordinates({a});
            FieldElement acc{0}, pw = ext_.one();
            for (auto c : coords) {
                acc = ext_.add(acc, ext_.mul(ext_.from_int(c), pw));
                pw = ext_.mul(pw, root);
            }
            map_[a] = acc;
        }
    }

    const FieldSpec& base() const { return base_; }
    const FieldSpec& extension() const { return ext_; }
    FieldElement operator()(FieldElement a) const { return map_.at(a.code); }

private:
    FieldSpec base_, ext_;
    std::vector<FieldElement> map_;
};

}  // namespace fflab
