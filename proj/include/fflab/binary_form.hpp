#pragma once

#include <span>
#include <vector>

#include "linalg.hpp"
#include "polynomial.hpp"

namespace fflab {

/// Homogeneous form of formal degree e in (u, v): sum_k c_k u^{e-k} v^k.
struct BinaryForm {
    int degree = 0;
    std::vector<FieldElement> coeffs;  // size degree + 1

    BinaryForm() = default;
    BinaryForm(int e, std::vector<FieldElement> c) : degree(e), coeffs(std::move(c)) {
        if (e < 0 || coeffs.size() != static_cast<std::size_t>(e) + 1)
            throw DomainError("binary form of degree e needs e+1 coefficients");
    }

    bool is_zero() const {
        for (auto c : coeffs)
            if (c.code) return false;
        return true;
    }

    /// f(u, 1) as a polynomial in u.
    Polynomial dehomogenize_v() const {
        std::vector<FieldElement> c(coeffs.size());
        for (int k = 0; k <= degree; ++k) c[static_cast<std::size_t>(degree - k)] = coeffs[static_cast<std::size_t>(k)];
        return Polynomial(std::move(c));
    }

    /// Vanishes at the point (u:v) = (1:0).
    bool vanishes_at_u_axis() const { return coeffs.front().code == 0; }
};

inline BinaryForm mul(const FieldSpec& F, const BinaryForm& a, const BinaryForm& b) {
    std::vector<FieldElement> c(static_cast<std::size_t>(a.degree + b.degree) + 1);
    for (int i = 0; i <= a.degree; ++i)
        for (int j = 0; j <= b.degree; ++j)
            c[static_cast<std::size_t>(i + j)] =
                F.add(c[static_cast<std::size_t>(i + j)], F.mul(a.coeffs[static_cast<std::size_t>(i)], b.coeffs[static_cast<std::size_t>(j)]));
    return {a.degree + b.degree, std::move(c)};
}

/// Sylvester resultant of two binary forms of their formal degrees.
/// Sign convention: the deg(g) rows built from f come first, each row lists
/// coefficients from u^{top} down to v^{top}.  Zero iff the forms share a
/// projective zero over the algebraic closure (or one of them is the zero form).
inline FieldElement resultant(const FieldSpec& F, const BinaryForm& f, const BinaryForm& g) {
    const int m = f.degree, n = g.degree;
    if (m < 0 || n < 0) throw DomainError("resultant of forms with negative degree");
    if (m + n == 0) throw DomainError("resultant of two constant forms is degenerate");
    const std::size_t N = static_cast<std::size_t>(m + n);
    FqMatrix S(N, N);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) S(static_cast<std::size_t>(r), static_cast<std::size_t>(r + k)) = f.coeffs[static_cast<std::size_t>(k)];
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k)
            S(static_cast<std::size_t>(n + r), static_cast<std::size_t>(r + k)) = g.coeffs[static_cast<std::size_t>(k)];
    return S.determinant(F);
}

/// True iff the forms have no common zero on P^1 over the algebraic closure.
/// Decided through the gcd of the dehomogenized forms plus the point (1:0).
inline bool forms_coprime(const FieldSpec& F, std::span<const BinaryForm> forms) {
    bool all_vanish_at_infinity = true;
    Polynomial g;
    bool any_nonzero = false;
    for (const auto& f : forms) {
        if (!f.vanishes_at_u_axis()) all_vanish_at_infinity = false;
        auto d = f.dehomogenize_v();
        if (d.is_zero()) continue;
        g = any_nonzero ? poly::gcd(F, g, d) : poly::monic(F, d);
        any_nonzero = true;
        if (g.degree() == 0 && !all_vanish_at_infinity) return true;
    }
    if (!any_nonzero) return false;
    return !all_vanish_at_infinity && g.degree() == 0;
}

}  // namespace fflab
