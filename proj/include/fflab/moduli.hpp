#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binary_form.hpp"
#include "circle.hpp"

namespace fflab {

/// Counts over F_{q^l} for one extension degree.
struct CountReport {
    int ell = 1;
    std::uint64_t q_ell = 0;
    Integer raw_cone;        // nonzero tuples with F(f) = 0, common factors allowed
    Integer morphisms;       // coprime tuples up to scalar
    Integer coprime_tuples;  // coprime nonzero tuples
    long mu = 0, mu_hat = 0;
    Rational ratio_mu_hat, ratio_mu;
};

namespace moduli {

/// Tuple (f_1, ..., f_n) of binary forms of degree e; c[k][i] is the u^{e-k} v^k
/// coefficient of f_i.
using Tuple = std::vector<std::vector<FieldElement>>;

inline std::vector<BinaryForm> to_forms(const Tuple& c, int n) {
    const int e = static_cast<int>(c.size()) - 1;
    std::vector<BinaryForm> out;
    for (int i = 0; i < n; ++i) {
        std::vector<FieldElement> co;
        for (int k = 0; k <= e; ++k) co.push_back(c[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
        out.emplace_back(e, std::move(co));
    }
    return out;
}

/// f_i(u, 1) as polynomials in u.
inline std::vector<Polynomial> dehomogenize(const Tuple& c, int n) {
    const int e = static_cast<int>(c.size()) - 1;
    std::vector<Polynomial> x;
    for (int i = 0; i < n; ++i) {
        std::vector<FieldElement> co(static_cast<std::size_t>(e) + 1);
        for (int k = 0; k <= e; ++k) co[static_cast<std::size_t>(e - k)] = c[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        x.push_back(Polynomial(std::move(co)));
    }
    return x;
}

/// F(f) as a binary form of degree de vanishes iff F(f(u, 1)) does: the
/// coefficients are the same list.
inline bool composes_to_zero(const HypersurfaceForm& G, const Tuple& c) {
    return forms::eval(G, dehomogenize(c, G.n())).is_zero();
}

inline FieldElement digit_element(std::uint64_t& r, std::uint32_t q) {
    FieldElement x{static_cast<std::uint32_t>(r % q)};
    r /= q;
    return x;
}

struct Tally {
    std::uint64_t nonzero = 0;        // nonzero tuples with F(f) = 0
    std::uint64_t coprime_orbits = 0;  // of those, coprime ones up to scalar
    std::uint64_t candidates = 0;      // tuples tested
};

/// Leading vectors c_0 != 0 with F(c_0) = 0, first nonzero coordinate 1.
inline std::vector<std::vector<FieldElement>> normalized_cone_points(const HypersurfaceForm& G, Budget* budget) {
    const auto& F = G.field();
    const std::uint32_t q = F.q();
    const int n = G.n();
    std::vector<std::vector<FieldElement>> pts;
    for (int lead = 0; lead < n; ++lead) {
        const std::uint64_t tail = upow_checked(q, static_cast<unsigned>(n - lead - 1));
        if (budget) budget->charge(tail);
        for (std::uint64_t code = 0; code < tail; ++code) {
            std::vector<FieldElement> x(static_cast<std::size_t>(n));
            x[static_cast<std::size_t>(lead)] = F.one();
            std::uint64_t r = code;
            for (int j = lead + 1; j < n; ++j) x[static_cast<std::size_t>(j)] = digit_element(r, q);
            if (forms::eval(G, x).code == 0) pts.push_back(std::move(x));
        }
    }
    return pts;
}

/// Everything with a given normalized leading vector c_0.  The u^{(d-1)e} v^e
/// coefficient of F(f) is affine in the last vector c_e, so c_e runs over the
/// solutions of one linear equation; the middle vectors are free.
inline Tally tally_leading(const HypersurfaceForm& G, int e, const std::vector<FieldElement>& c0, bool want_coprime, Budget* budget) {
    const auto& F = G.field();
    const std::uint32_t q = F.q();
    const int n = G.n(), d = G.d();
    Tally t;
    if (e == 0) {
        t.nonzero = 1;
        t.coprime_orbits = 1;
        t.candidates = 1;
        return t;
    }
    Tuple c(static_cast<std::size_t>(e) + 1, std::vector<FieldElement>(static_cast<std::size_t>(n)));
    c[0] = c0;
    const int watch = d * e - e;  // power of u carrying the affine condition
    const std::uint64_t middle = upow_checked(q, static_cast<unsigned>(n * (e - 1)));
    if (middle == 0) throw BudgetExceeded("middle coefficients overflow");
    for (std::uint64_t m = 0; m < middle; ++m) {
        std::uint64_t r = m;
        for (int k = 1; k < e; ++k)
            for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = digit_element(r, q);
        auto& last = c[static_cast<std::size_t>(e)];
        std::fill(last.begin(), last.end(), F.zero());
        const FieldElement h0 = forms::eval(G, dehomogenize(c, n)).coeff(watch);
        std::vector<FieldElement> slope(static_cast<std::size_t>(n));
        int pivot = -1;
        for (int i = 0; i < n; ++i) {
            last[static_cast<std::size_t>(i)] = F.one();
            slope[static_cast<std::size_t>(i)] = F.sub(forms::eval(G, dehomogenize(c, n)).coeff(watch), h0);
            last[static_cast<std::size_t>(i)] = F.zero();
            if (pivot < 0 && slope[static_cast<std::size_t>(i)].code) pivot = i;
        }
        if (pivot < 0 && h0.code) continue;
        const unsigned free_coords = static_cast<unsigned>(pivot < 0 ? n : n - 1);
        const std::uint64_t span = upow_checked(q, free_coords);
        if (budget) budget->charge(span);
        for (std::uint64_t code = 0; code < span; ++code) {
            std::uint64_t rr = code;
            FieldElement acc = h0;
            for (int i = 0; i < n; ++i) {
                if (i == pivot) continue;
                last[static_cast<std::size_t>(i)] = digit_element(rr, q);
                acc = F.add(acc, F.mul(slope[static_cast<std::size_t>(i)], last[static_cast<std::size_t>(i)]));
            }
            if (pivot >= 0) last[static_cast<std::size_t>(pivot)] = F.neg(F.div(acc, slope[static_cast<std::size_t>(pivot)]));
            ++t.candidates;
            // F(c_e) is the v^{de} coefficient
            if (forms::eval(G, last).code != 0 || !composes_to_zero(G, c)) continue;
            ++t.nonzero;
            if (want_coprime) {
                auto fs = to_forms(c, n);
                if (forms_coprime(F, fs)) ++t.coprime_orbits;
            }
        }
    }
    return t;
}

struct ConeCounts {
    Integer nonzero;         // all nonzero tuples of degree <= e forms with F(f) = 0
    Integer coprime_orbits;  // morphisms: coprime tuples up to scalar
    std::uint64_t candidates = 0;
};

/// Tuples with c_0 = 0 are v times a degree e-1 tuple with the same property,
/// so the count recurses on e; the orbit representatives with c_0 != 0 carry
/// weight q-1.
inline ConeCounts cone_counts(const HypersurfaceForm& G, int e, bool want_coprime, unsigned workers = 1, Budget* budget = nullptr) {
    if (e < 0) throw DomainError("curve degree must be >= 0");
    const std::uint32_t q = G.field().q();
    ConeCounts out;
    out.nonzero = 0;
    out.coprime_orbits = 0;
    const auto leads = normalized_cone_points(G, budget);
    for (int k = e; k >= 0; --k) {
        const bool coprime_here = want_coprime && k == e;
        const Tally sum = parallel_reduce<Tally>(leads.size(), workers, Tally{}, [&](std::uint64_t i) {
            return tally_leading(G, k, leads[i], coprime_here, budget);
        }, [](Tally a, const Tally& b) {
            a.nonzero += b.nonzero;
            a.coprime_orbits += b.coprime_orbits;
            a.candidates += b.candidates;
            return a;
        });
        out.nonzero += Integer(std::to_string(sum.nonzero)) * (q - 1);
        if (coprime_here) out.coprime_orbits = Integer(std::to_string(sum.coprime_orbits));
        out.candidates += sum.candidates;
    }
    return out;
}

/// The form over F_{q^l}; `modulus` overrides the default extension modulus.
inline HypersurfaceForm form_over(const HypersurfaceForm& form, int ell, const std::optional<std::vector<std::uint32_t>>& modulus = {}) {
    const FieldSpec& F = form.field();
    if (ell == 1 && !modulus) return form;
    FieldSpec ext = modulus ? FieldSpec(F.p(), *modulus) : forms::extension_field(F, ell);
    if (ext.f() != F.f() * static_cast<std::uint32_t>(ell)) throw DomainError("extension modulus has the wrong degree");
    return forms::base_change(form, FieldEmbedding(F, ext));
}

/// Nonzero tuples of degree-e forms over F_{q^l} with F(f) = 0.
inline Integer count_cone(const CountingProblem& prob, int ell = 1, unsigned workers = 1, Budget* budget = nullptr) {
    return cone_counts(form_over(prob.form(), ell), prob.e(), false, workers, budget).nonzero;
}

/// Morphisms of degree e: coprime tuples with F(f) = 0 up to scalar.
inline Integer count_morphisms(const CountingProblem& prob, int ell = 1, unsigned workers = 1, Budget* budget = nullptr) {
    return cone_counts(form_over(prob.form(), ell), prob.e(), true, workers, budget).coprime_orbits;
}

inline Rational power_ratio(const Integer& num, std::uint64_t q, long exponent) {
    Integer p = 1;
    for (long i = 0; i < std::abs(exponent); ++i) p *= Integer(std::to_string(q));
    Rational r = exponent >= 0 ? Rational(num, p) : Rational(num * p, Integer(1));
    r.canonicalize();
    return r;
}

inline std::vector<CountReport> langweil_report(const CountingProblem& prob, int ell_max, unsigned workers = 1, Budget* budget = nullptr) {
    if (ell_max < 1) throw DomainError("langweil_report needs ell_max >= 1");
    std::vector<CountReport> rows;
    for (int ell = 1; ell <= ell_max; ++ell) {
        auto G = form_over(prob.form(), ell);
        auto c = cone_counts(G, prob.e(), true, workers, budget);
        CountReport r;
        r.ell = ell;
        r.q_ell = G.field().q();
        r.raw_cone = c.nonzero;
        r.morphisms = c.coprime_orbits;
        r.coprime_tuples = c.coprime_orbits * (r.q_ell - 1);
        r.mu = prob.mu();
        r.mu_hat = prob.mu_hat();
        r.ratio_mu = power_ratio(r.morphisms, r.q_ell, r.mu);
        r.ratio_mu_hat = power_ratio(r.morphisms, r.q_ell, r.mu_hat);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Lines of P^{n-1} lying on {F = 0}: every 2-dimensional subspace in reduced
/// echelon form, tested at all of its q+1 points.
inline std::uint64_t count_lines(const HypersurfaceForm& G, Budget* budget = nullptr) {
    const auto& F = G.field();
    const std::uint32_t q = F.q();
    const int n = G.n();
    std::uint64_t lines = 0;
    std::vector<FieldElement> P(static_cast<std::size_t>(n)), Q(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            // P: 1 at i, 0 at j and before i; Q: 1 at j, 0 before j
            const unsigned fp = static_cast<unsigned>(n - i - 2), fq = static_cast<unsigned>(n - j - 1);
            const std::uint64_t np = upow_checked(q, fp), nq = upow_checked(q, fq);
            if (budget) budget->charge(np * nq);
            for (std::uint64_t a = 0; a < np; ++a)
                for (std::uint64_t b = 0; b < nq; ++b) {
                    std::fill(P.begin(), P.end(), F.zero());
                    std::fill(Q.begin(), Q.end(), F.zero());
                    P[static_cast<std::size_t>(i)] = F.one();
                    Q[static_cast<std::size_t>(j)] = F.one();
                    std::uint64_t r = a;
                    for (int k = i + 1; k < n; ++k)
                        if (k != j) P[static_cast<std::size_t>(k)] = digit_element(r, q);
                    r = b;
                    for (int k = j + 1; k < n; ++k) Q[static_cast<std::size_t>(k)] = digit_element(r, q);
                    bool on = forms::eval(G, Q).code == 0;
                    for (std::uint32_t s = 0; s < q && on; ++s) {
                        for (int k = 0; k < n; ++k)
                            x[static_cast<std::size_t>(k)] = F.add(P[static_cast<std::size_t>(k)], F.mul(FieldElement{s}, Q[static_cast<std::size_t>(k)]));
                        on = forms::eval(G, x).code == 0;
                    }
                    if (on) ++lines;
                }
        }
    return lines;
}

/// #PGL_2(F_q) = q^3 - q.
inline Integer pgl2_order(std::uint64_t q) {
    Integer Q(std::to_string(q));
    return Q * Q * Q - Q;
}

/// The pencil criterion: the forms have no common zero iff
/// Res(sum lambda_i f_i, sum mu_i f_i) is not identically zero in (lambda, mu).
/// Each variable has degree <= e, so the polynomial is nonzero iff it is nonzero
/// somewhere on S^{2n} for any S of size e+1.
inline bool pencil_resultant_coprime(const FieldSpec& F, std::span<const BinaryForm> fs) {
    if (fs.empty()) throw DomainError("empty tuple");
    const int e = fs.front().degree;
    for (const auto& f : fs)
        if (f.degree != e) throw DomainError("forms of mixed degree");
    if (e == 0) {
        for (const auto& f : fs)
            if (!f.is_zero()) return true;
        return false;
    }
    if (F.q() < static_cast<std::uint32_t>(e) + 1) throw DomainError("field too small for the pencil grid");
    const int n = static_cast<int>(fs.size());
    const std::uint32_t s = static_cast<std::uint32_t>(e) + 1;
    const std::uint64_t grid = upow_checked(s, static_cast<unsigned>(2 * n));
    if (grid == 0) throw BudgetExceeded("pencil grid overflows");
    for (std::uint64_t code = 0; code < grid; ++code) {
        std::uint64_t r = code;
        std::vector<FieldElement> A(static_cast<std::size_t>(e) + 1), B(static_cast<std::size_t>(e) + 1);
        for (int i = 0; i < n; ++i) {
            const FieldElement lam{static_cast<std::uint32_t>(r % s)};
            r /= s;
            const FieldElement mu{static_cast<std::uint32_t>(r % s)};
            r /= s;
            for (int k = 0; k <= e; ++k) {
                A[static_cast<std::size_t>(k)] = F.add(A[static_cast<std::size_t>(k)], F.mul(lam, fs[static_cast<std::size_t>(i)].coeffs[static_cast<std::size_t>(k)]));
                B[static_cast<std::size_t>(k)] = F.add(B[static_cast<std::size_t>(k)], F.mul(mu, fs[static_cast<std::size_t>(i)].coeffs[static_cast<std::size_t>(k)]));
            }
        }
        if (resultant(F, BinaryForm(e, A), BinaryForm(e, B)).code) return true;
    }
    return false;
}

}  // namespace moduli
}  // namespace fflab
