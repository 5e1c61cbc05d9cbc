#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "laurent.hpp"
#include "polynomial.hpp"

namespace fflab {

/// Exponent vector -> coefficient.
using MonomialMap = std::map<std::vector<int>, FieldElement>;

/// Ring adapters so one evaluator serves F_q, F_q[t] and K_infty.
struct FieldRing {
    const FieldSpec& F;
    using value_type = FieldElement;
    FieldElement zero() const { return F.zero(); }
    FieldElement one() const { return F.one(); }
    FieldElement add(FieldElement a, FieldElement b) const { return F.add(a, b); }
    FieldElement mul(FieldElement a, FieldElement b) const { return F.mul(a, b); }
    FieldElement scale(FieldElement s, FieldElement a) const { return F.mul(s, a); }
};

struct PolyRing {
    const FieldSpec& F;
    using value_type = Polynomial;
    Polynomial zero() const { return {}; }
    Polynomial one() const { return Polynomial::constant(F.one()); }
    Polynomial add(const Polynomial& a, const Polynomial& b) const { return poly::add(F, a, b); }
    Polynomial mul(const Polynomial& a, const Polynomial& b) const { return poly::mul(F, a, b); }
    Polynomial scale(FieldElement s, const Polynomial& a) const { return poly::scale(F, s, a); }
};

struct LaurentRing {
    const FieldSpec& F;
    using value_type = LaurentElement;
    LaurentElement zero() const { return LaurentElement::exact_zero(); }
    LaurentElement one() const { return LaurentElement::monomial(F.one(), 0); }
    LaurentElement add(const LaurentElement& a, const LaurentElement& b) const { return laurent::add(F, a, b); }
    LaurentElement mul(const LaurentElement& a, const LaurentElement& b) const { return laurent::mul(F, a, b); }
    LaurentElement scale(FieldElement s, const LaurentElement& a) const { return laurent::scale(F, s, a); }
};

/// A degree-d form in n variables held as a full symmetric tensor
/// c[i_1 + i_2 n + ... ] (0-based indices), plus its monomial list.
class HypersurfaceForm {
public:
    HypersurfaceForm(FieldSpec F, int n, int d, std::vector<FieldElement> tensor, MonomialMap monomials)
        : F_(std::move(F)), n_(n), d_(d), c_(std::move(tensor)), monomials_(std::move(monomials)) {}

    const FieldSpec& field() const { return F_; }
    int n() const { return n_; }
    int d() const { return d_; }
    const MonomialMap& monomials() const { return monomials_; }

    /// c_{i_1...i_d} for 0-based indices in any order.
    FieldElement coefficient(std::span<const int> idx) const {
        if (static_cast<int>(idx.size()) != d_) throw DomainError("tensor index of wrong order");
        std::size_t k = 0;
        for (std::size_t j = idx.size(); j-- > 0;) {
            if (idx[j] < 0 || idx[j] >= n_) throw DomainError("tensor index out of range");
            k = k * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[j]);
        }
        return c_[k];
    }

    const std::vector<FieldElement>& tensor() const { return c_; }

private:
    FieldSpec F_;
    int n_, d_;
    std::vector<FieldElement> c_;
    MonomialMap monomials_;
};

namespace forms {

/// Symmetric tensor whose ordered-tuple sum reproduces the monomial form.
inline HypersurfaceForm symmetrize(const FieldSpec& F, const MonomialMap& monomials, int n, int d) {
    if (d < 1 || n < 1) throw DomainError("form needs n >= 1 and d >= 1");
    if (F.p() <= static_cast<std::uint32_t>(d))
        throw DomainError("characteristic " + std::to_string(F.p()) + " must exceed the degree " + std::to_string(d));
    std::size_t size = 1;
    for (int i = 0; i < d; ++i) size *= static_cast<std::size_t>(n);
    std::vector<FieldElement> c(size);
    MonomialMap clean;
    for (const auto& [expo, coef] : monomials) {
        if (static_cast<int>(expo.size()) != n) throw DomainError("monomial has the wrong number of variables");
        int deg = 0;
        for (int x : expo) {
            if (x < 0) throw DomainError("negative exponent");
            deg += x;
        }
        if (deg != d) throw DomainError("monomial of degree " + std::to_string(deg) + " in a degree-" + std::to_string(d) + " form");
        if (coef.code == 0) continue;
        clean[expo] = F.add(clean.count(expo) ? clean[expo] : F.zero(), coef);
    }
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < size; ++k) {
        std::size_t r = k;
        std::vector<int> expo(static_cast<std::size_t>(n), 0);
        for (int j = 0; j < d; ++j) {
            idx[static_cast<std::size_t>(j)] = static_cast<int>(r % static_cast<std::size_t>(n));
            r /= static_cast<std::size_t>(n);
            expo[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])]++;
        }
        auto it = clean.find(expo);
        if (it == clean.end()) continue;
        // multinomial d! / prod e_i! counts the ordered tuples of this monomial
        std::uint64_t mult = 1;
        int placed = 0;
        for (int e : expo)
            for (int j = 1; j <= e; ++j) mult = mult * static_cast<std::uint64_t>(++placed) / static_cast<std::uint64_t>(j);
        c[k] = F.div(it->second, F.from_int(static_cast<long long>(mult % F.p())));
    }
    return HypersurfaceForm(F, n, d, std::move(c), std::move(clean));
}

/// F(x) from the monomial list.
template <class Ring>
typename Ring::value_type eval(const Ring& R, const HypersurfaceForm& form, std::span<const typename Ring::value_type> x) {
    if (static_cast<int>(x.size()) != form.n()) throw DomainError("eval_form: expected " + std::to_string(form.n()) + " values");
    auto acc = R.zero();
    for (const auto& [expo, coef] : form.monomials()) {
        auto term = R.one();
        for (std::size_t i = 0; i < expo.size(); ++i)
            for (int j = 0; j < expo[i]; ++j) term = R.mul(term, x[i]);
        acc = R.add(acc, R.scale(coef, term));
    }
    return acc;
}

inline FieldElement eval(const HypersurfaceForm& form, std::span<const FieldElement> x) {
    return eval(FieldRing{form.field()}, form, x);
}

inline Polynomial eval(const HypersurfaceForm& form, std::span<const Polynomial> x) {
    return eval(PolyRing{form.field()}, form, x);
}

/// Psi_i(u_1, ..., u_{d-1}) = sum c_{i_1 ... i_{d-1} i} u_1[i_1] ... u_{d-1}[i_{d-1}], i 0-based.
template <class Ring>
typename Ring::value_type eval_multilinear(const Ring& R, const HypersurfaceForm& form, int i,
                                           std::span<const std::vector<typename Ring::value_type>> u) {
    const int n = form.n(), d = form.d();
    if (static_cast<int>(u.size()) != d - 1) throw DomainError("Psi takes d-1 vector arguments");
    for (const auto& v : u)
        if (static_cast<int>(v.size()) != n) throw DomainError("Psi argument of wrong length");
    if (i < 0 || i >= n) throw DomainError("Psi index out of range");
    // contract slots one at a time: partial[k] holds the tensor with the first s slots filled
    std::size_t remaining = 1;
    for (int j = 0; j < d - 1; ++j) remaining *= static_cast<std::size_t>(n);
    const auto& c = form.tensor();
    std::vector<typename Ring::value_type> partial(remaining, R.zero());
    // last tensor slot fixed to i: entries are c[k + i n^{d-1}]
    for (std::size_t k = 0; k < remaining; ++k) {
        const FieldElement ck = c[k + static_cast<std::size_t>(i) * remaining];
        if (ck.code != 0) partial[k] = R.scale(ck, R.one());
    }
    for (int s = 0; s < d - 1; ++s) {
        const std::size_t next = remaining / static_cast<std::size_t>(n);
        std::vector<typename Ring::value_type> out(next, R.zero());
        for (std::size_t k = 0; k < remaining; ++k) {
            const std::size_t slot = k % static_cast<std::size_t>(n);
            out[k / static_cast<std::size_t>(n)] = R.add(out[k / static_cast<std::size_t>(n)], R.mul(partial[k], u[static_cast<std::size_t>(s)][slot]));
        }
        partial = std::move(out);
        remaining = next;
    }
    return partial[0];
}

inline FieldElement eval_multilinear(const HypersurfaceForm& form, int i, std::span<const std::vector<FieldElement>> u) {
    return eval_multilinear(FieldRing{form.field()}, form, i, u);
}

/// Smallest monic irreducible polynomial of degree `deg` over F_p, ordered by
/// coefficient vector read from the top; deterministic, so reproducible.
inline std::vector<std::uint32_t> first_irreducible(std::uint32_t p, std::uint32_t deg) {
    std::vector<std::uint32_t> m(deg + 1, 0);
    m[deg] = 1;
    const std::uint64_t total = upow_checked(p, deg);
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t r = code;
        for (std::uint32_t i = 0; i < deg; ++i) {
            m[i] = static_cast<std::uint32_t>(r % p);
            r /= p;
        }
        if (deg == 1 || detail::fp_irreducible(m, p)) return m;
    }
    throw DomainError("no irreducible polynomial found");
}

/// The same form read over an extension through an embedding of its field.
inline HypersurfaceForm base_change(const HypersurfaceForm& form, const FieldEmbedding& emb) {
    MonomialMap lifted;
    for (const auto& [e, c] : form.monomials()) lifted[e] = emb(c);
    return symmetrize(emb.extension(), lifted, form.n(), form.d());
}

/// F_{q^k} over the field of F, by the smallest irreducible of degree f k over F_p.
inline FieldSpec extension_field(const FieldSpec& F, int k) {
    if (k < 1) throw DomainError("extension degree must be >= 1");
    if (k == 1) return F;
    return FieldSpec(F.p(), first_irreducible(F.p(), F.f() * static_cast<std::uint32_t>(k)));
}

struct SmoothnessProbe {
    bool singular_found = false;
    int degree = 0;                            // k of the field F_{q^k} holding the witness
    std::vector<std::uint32_t> witness_codes;  // coordinates in that field
    std::uint64_t points_checked = 0;
};

/// Searches x != 0 over F_{q^k}, k <= k_max, with F(x) = 0 and grad F(x) = 0.
/// Points are taken projectively (first nonzero coordinate 1).
inline SmoothnessProbe smoothness_probe(const HypersurfaceForm& form, int k_max, std::uint64_t max_points = 50'000'000) {
    if (k_max < 1) throw DomainError("smoothness probe needs k_max >= 1");
    const FieldSpec& base = form.field();
    const int n = form.n(), d = form.d();
    SmoothnessProbe out;
    for (int k = 1; k <= k_max; ++k) {
        const std::uint32_t fk = base.f() * static_cast<std::uint32_t>(k);
        const std::uint64_t qk = upow_checked(base.p(), fk);
        const std::uint64_t pts = upow_checked(qk, static_cast<unsigned>(n));
        if (qk == 0 || pts == 0 || pts > max_points) throw BudgetExceeded("smoothness probe beyond the feasibility guard at k=" + std::to_string(k));
        FieldSpec ext = extension_field(base, k);
        auto G = base_change(form, FieldEmbedding(base, ext));
        std::vector<FieldElement> x(static_cast<std::size_t>(n));
        for (int lead = 0; lead < n; ++lead) {
            const std::uint64_t tail = upow_checked(qk, static_cast<unsigned>(n - lead - 1));
            for (std::uint64_t code = 0; code < tail; ++code) {
                std::fill(x.begin(), x.end(), ext.zero());
                x[static_cast<std::size_t>(lead)] = ext.one();
                std::uint64_t r = code;
                for (int j = lead + 1; j < n; ++j) {
                    x[static_cast<std::size_t>(j)] = {static_cast<std::uint32_t>(r % qk)};
                    r /= qk;
                }
                ++out.points_checked;
                if (eval(G, x).code != 0) continue;
                bool grad_zero = true;
                std::vector<std::vector<FieldElement>> args(static_cast<std::size_t>(d - 1), x);
                for (int i = 0; i < n && grad_zero; ++i)
                    if (eval_multilinear(G, i, args).code != 0) grad_zero = false;
                if (grad_zero) {
                    out.singular_found = true;
                    out.degree = k;
                    for (auto v : x) out.witness_codes.push_back(v.code);
                    return out;
                }
            }
        }
    }
    return out;
}

class FormFileError : public std::invalid_argument {
public:
    FormFileError(int line, const std::string& what)
        : std::invalid_argument("form file line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// One monomial per line: "e_1 e_2 ... e_n : c", '#' starts a comment.
/// When n or d is 0 it is taken from the first monomial.
inline HypersurfaceForm parse_form(const FieldSpec& F, std::istream& in, int n = 0, int d = 0) {
    MonomialMap monos;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        std::string line = raw.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw FormFileError(line_no, "missing ':' between exponents and coefficient");
        std::istringstream es(line.substr(0, colon));
        std::vector<int> expo;
        std::string tok;
        while (es >> tok) {
            try {
                std::size_t used = 0;
                int v = std::stoi(tok, &used);
                if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
                expo.push_back(v);
            } catch (const std::exception&) {
                throw FormFileError(line_no, "bad exponent '" + tok + "'");
            }
        }
        int deg = 0;
        for (int e : expo) deg += e;
        if (n == 0) n = static_cast<int>(expo.size());
        if (d == 0) d = deg;
        if (static_cast<int>(expo.size()) != n)
            throw FormFileError(line_no, "expected " + std::to_string(n) + " exponents, found " + std::to_string(expo.size()));
        if (deg != d) throw FormFileError(line_no, "exponents sum to " + std::to_string(deg) + ", expected degree " + std::to_string(d));
        FieldElement c;
        try {
            c = F.parse(line.substr(colon + 1));
        } catch (const std::exception& e) {
            throw FormFileError(line_no, std::string("bad coefficient: ") + e.what());
        }
        monos[expo] = F.add(monos.count(expo) ? monos[expo] : F.zero(), c);
    }
    if (monos.empty()) throw FormFileError(line_no, "no monomials");
    try {
        return symmetrize(F, monos, n, d);
    } catch (const DomainError& e) {
        throw FormFileError(line_no, e.what());
    }
}

inline HypersurfaceForm load_form(const FieldSpec& F, const std::string& path, int n = 0, int d = 0) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open form file " + path);
    return parse_form(F, in, n, d);
}

/// Diagonal form sum_i coeffs[i] x_i^d.
inline HypersurfaceForm diagonal(const FieldSpec& F, int d, const std::vector<long long>& coeffs) {
    MonomialMap m;
    const int n = static_cast<int>(coeffs.size());
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = d;
        m[e] = F.from_int(coeffs[static_cast<std::size_t>(i)]);
    }
    return symmetrize(F, m, n, d);
}

}  // namespace forms
}  // namespace fflab
