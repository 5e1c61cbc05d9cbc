#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <optional>
#include <string>
#include <map>
#include <random>
#include <vector>

#include "laurent.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

namespace fflab {

/// Row-major square matrix over K_infinity.
using LaurentMatrix = std::vector<std::vector<LaurentElement>>;

namespace latgon {

inline LaurentMatrix transpose(const LaurentMatrix& A) {
    LaurentMatrix T(A.empty() ? 0 : A[0].size(), std::vector<LaurentElement>(A.size()));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A[i].size(); ++j) T[j][i] = A[i][j];
    return T;
}

inline LaurentMatrix multiply(const FieldSpec& F, const LaurentMatrix& A, const LaurentMatrix& B) {
    const std::size_t r = A.size(), c = B.empty() ? 0 : B[0].size();
    LaurentMatrix C(r, std::vector<LaurentElement>(c, LaurentElement::exact_zero()));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            for (std::size_t k = 0; k < B.size(); ++k) C[i][j] = laurent::add(F, C[i][j], laurent::mul(F, A[i][k], B[k][j]));
    return C;
}

/// Compares with the identity on every known coefficient.
inline bool is_identity_on_window(const LaurentMatrix& A) {
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A[i].size(); ++j) {
            const auto& x = A[i][j];
            for (long k = x.floor(); k <= std::max(x.top(), 0L); ++k)
                if (x.coeff(k).code != (i == j && k == 0 ? 1u : 0u)) return false;
        }
    return true;
}

// largest q-exponent in a row, LONG_MIN for a zero row
inline long row_order(const std::vector<LaurentElement>& row) {
    long best = LONG_MIN;
    for (const auto& x : row) {
        const auto m = laurent::abs_value(x);
        if (!m.zero) best = std::max(best, m.exponent);
    }
    return best;
}

}  // namespace latgon

/// {Lambda u : u in O^N}. The inverse bounds |u| in terms of |x| for enumeration.
class FunctionFieldLattice {
public:
    FunctionFieldLattice(FieldSpec F, LaurentMatrix generator, LaurentMatrix inverse)
        : F_(std::move(F)), gen_(std::move(generator)), inv_(std::move(inverse)) {
        const std::size_t N = gen_.size();
        if (N == 0) throw DomainError("lattice of dimension 0");
        for (const auto& row : gen_)
            if (row.size() != N) throw DomainError("generator must be square");
        if (inv_.size() != N) throw DomainError("inverse has the wrong size");
        for (const auto& row : inv_)
            if (row.size() != N) throw DomainError("inverse has the wrong size");
        if (!latgon::is_identity_on_window(latgon::multiply(F_, gen_, inv_)))
            throw DomainError("supplied inverse does not invert the generator on the window");
    }

    static FunctionFieldLattice identity(const FieldSpec& F, std::size_t N) {
        LaurentMatrix I(N, std::vector<LaurentElement>(N, LaurentElement::exact_zero()));
        for (std::size_t i = 0; i < N; ++i) I[i][i] = LaurentElement::monomial(F.one(), 0);
        return FunctionFieldLattice(F, I, I);
    }

    const FieldSpec& field() const { return F_; }
    std::size_t dim() const { return gen_.size(); }
    const LaurentMatrix& generator() const { return gen_; }
    const LaurentMatrix& inverse() const { return inv_; }

    /// Lambda u.
    std::vector<LaurentElement> apply(const std::vector<Polynomial>& u) const {
        std::vector<LaurentElement> x(dim(), LaurentElement::exact_zero());
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                x[i] = laurent::add(F_, x[i], laurent::mul(F_, gen_[i][j], LaurentElement::from_polynomial(u[j])));
        return x;
    }

private:
    FieldSpec F_;
    LaurentMatrix gen_, inv_;
};

/// M_m and its adjoint Lambda_m built from a symmetric gamma.
class SpecialLatticePair {
public:
    SpecialLatticePair(FieldSpec F, LaurentMatrix gamma, int m) : F_(std::move(F)), gamma_(std::move(gamma)), m_(m) {
        n_ = gamma_.size();
        if (n_ == 0) throw DomainError("gamma must be non-empty");
        for (std::size_t i = 0; i < n_; ++i) {
            if (gamma_[i].size() != n_) throw DomainError("gamma must be square");
            for (std::size_t j = 0; j < i; ++j)
                if (!laurent::sub(F_, gamma_[i][j], gamma_[j][i]).is_certified_zero() &&
                    !laurent::abs_value(laurent::sub(F_, gamma_[i][j], gamma_[j][i])).zero)
                    throw DomainError("gamma must be symmetric");
        }
    }

    const FieldSpec& field() const { return F_; }
    std::size_t n() const { return n_; }
    int m() const { return m_; }
    const LaurentMatrix& gamma() const { return gamma_; }

    /// [[t^{-m} I, 0], [t^m gamma, t^m I]]
    LaurentMatrix M_matrix() const {
        LaurentMatrix A = zero(2 * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            A[i][i] = tm(-m_);
            A[n_ + i][n_ + i] = tm(m_);
            for (std::size_t j = 0; j < n_; ++j) A[n_ + i][j] = laurent::shift(gamma_[i][j], m_);
        }
        return A;
    }

    /// [[t^m I, -t^m gamma], [0, t^{-m} I]]
    LaurentMatrix Lambda_matrix() const {
        LaurentMatrix A = zero(2 * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            A[i][i] = tm(m_);
            A[n_ + i][n_ + i] = tm(-m_);
            for (std::size_t j = 0; j < n_; ++j) A[i][n_ + j] = laurent::neg(F_, laurent::shift(gamma_[i][j], m_));
        }
        return A;
    }

    /// Lambda^T M = I, so M^{-1} = Lambda^T and Lambda^{-1} = M^T.
    FunctionFieldLattice M() const { return FunctionFieldLattice(F_, M_matrix(), latgon::transpose(Lambda_matrix())); }
    FunctionFieldLattice Lambda() const { return FunctionFieldLattice(F_, Lambda_matrix(), latgon::transpose(M_matrix())); }

    bool duality_holds() const {
        return latgon::is_identity_on_window(latgon::multiply(F_, latgon::transpose(Lambda_matrix()), M_matrix()));
    }

private:
    LaurentElement tm(long k) const { return LaurentElement::monomial(F_.one(), k); }
    static LaurentMatrix zero(std::size_t N) { return LaurentMatrix(N, std::vector<LaurentElement>(N, LaurentElement::exact_zero())); }

    FieldSpec F_;
    LaurentMatrix gamma_;
    int m_;
    std::size_t n_;
};

/// Minima q^{R_1} <= ... <= q^{R_N}. Non-strict: R_nu is the least R with nu
/// independent vectors of |x| <= q^R. Strict replaces <= by <.
struct MinimaProfile {
    std::vector<long> R;
    bool strict = false;
};

namespace latgon {

inline long ceil_rational(const Rational& z) {
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), z.get_num_mpz_t(), z.get_den_mpz_t());
    return c.get_si();
}

inline long floor_rational(const Rational& z) {
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), z.get_num_mpz_t(), z.get_den_mpz_t());
    return f.get_si();
}

inline Rational frac(const Rational& z) { return z - Rational(floor_rational(z)); }

namespace detail {

// Coefficient vectors of u_j (deg < D_j) whose image has |Lambda u| < q^Z form an
// F_q-space; returns a basis of it as polynomial vectors, or only its dimension.
struct BallSpace {
    std::vector<long> D;
    FqMatrix conditions;
    std::size_t unknowns = 0;
};

inline BallSpace ball_space(const FunctionFieldLattice& L, long Z) {
    const auto& F = L.field();
    const std::size_t N = L.dim();
    BallSpace s;
    // |u_j| <= max_i |inv_ji| |x| < q^{Z + ord_j}
    for (std::size_t j = 0; j < N; ++j) {
        const long o = row_order(L.inverse()[j]);
        if (o == LONG_MIN) throw DomainError("inverse has a zero row");
        s.D.push_back(std::max(0L, Z + o));
    }
    std::vector<std::size_t> offset(N + 1, 0);
    for (std::size_t j = 0; j < N; ++j) offset[j + 1] = offset[j] + static_cast<std::size_t>(s.D[j]);
    s.unknowns = offset[N];
    std::vector<std::vector<FieldElement>> rows;
    for (std::size_t i = 0; i < N; ++i) {
        long top = LONG_MIN;
        for (std::size_t j = 0; j < N; ++j) {
            const auto& g = L.generator()[i][j];
            if (g.is_certified_zero() || s.D[j] == 0) continue;
            top = std::max(top, g.top() + s.D[j] - 1);
        }
        for (long k = Z; k <= top; ++k) {
            std::vector<FieldElement> row(s.unknowns);
            bool any = false;
            for (std::size_t j = 0; j < N; ++j) {
                const auto& g = L.generator()[i][j];
                if (g.is_certified_zero()) continue;
                for (long l = 0; l < s.D[j]; ++l) {
                    const FieldElement c = g.coeff(k - l);
                    row[offset[j] + static_cast<std::size_t>(l)] = c;
                    any |= c.code != 0;
                }
            }
            if (any) rows.push_back(std::move(row));
        }
    }
    s.conditions = FqMatrix(rows.size(), s.unknowns);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < s.unknowns; ++c) s.conditions(r, c) = rows[r][c];
    (void)F;
    return s;
}

// rank over F_q(t) of polynomial column vectors, by fraction-free elimination
inline std::size_t k_rank(const FieldSpec& F, std::vector<std::vector<Polynomial>> cols) {
    if (cols.empty()) return 0;
    const std::size_t N = cols[0].size();
    std::size_t rank = 0;
    for (std::size_t i = 0; i < N && rank < cols.size(); ++i) {
        std::size_t piv = rank;
        while (piv < cols.size() && cols[piv][i].is_zero()) ++piv;
        if (piv == cols.size()) continue;
        std::swap(cols[rank], cols[piv]);
        const Polynomial p = cols[rank][i];
        for (std::size_t c = rank + 1; c < cols.size(); ++c) {
            const Polynomial f = cols[c][i];
            if (f.is_zero()) continue;
            Polynomial g = poly::gcd(F, p, f);
            auto pa = poly::divmod(F, p, g).first, fa = poly::divmod(F, f, g).first;
            for (std::size_t k = 0; k < N; ++k)
                cols[c][k] = poly::sub(F, poly::mul(F, pa, cols[c][k]), poly::mul(F, fa, cols[rank][k]));
        }
        ++rank;
    }
    return rank;
}

}  // namespace detail

/// #{x in L : |x| < q^Z}; Z enters through its ceiling.
inline Integer count_lattice_points(const FunctionFieldLattice& L, const Rational& Z) {
    auto s = detail::ball_space(L, ceil_rational(Z));
    const std::size_t dim = s.unknowns - s.conditions.rank(L.field());
    return ipow(L.field().q(), static_cast<unsigned>(dim));
}

/// Minima as the least R at which the ball {|x| <= q^R} spans nu dimensions over K.
inline MinimaProfile minima_by_enumeration(const FunctionFieldLattice& L, bool strict = false) {
    const auto& F = L.field();
    const std::size_t N = L.dim();
    long lo = LONG_MAX, hi = LONG_MIN;
    for (std::size_t j = 0; j < N; ++j) lo = std::min(lo, -row_order(L.inverse()[j]) - 1);
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<LaurentElement> col;
        for (std::size_t k = 0; k < N; ++k) col.push_back(L.generator()[k][i]);
        hi = std::max(hi, row_order(col));
    }
    MinimaProfile prof;
    prof.strict = strict;
    std::size_t have = 0;
    for (long R = lo; R <= hi && have < N; ++R) {
        auto s = detail::ball_space(L, R + 1);
        auto basis = s.conditions.kernel(F);
        std::vector<std::vector<Polynomial>> cols;
        for (const auto& v : basis) {
            std::vector<Polynomial> u;
            std::size_t off = 0;
            for (std::size_t j = 0; j < N; ++j) {
                std::vector<FieldElement> c(v.begin() + static_cast<long>(off), v.begin() + static_cast<long>(off + static_cast<std::size_t>(s.D[j])));
                off += static_cast<std::size_t>(s.D[j]);
                u.push_back(Polynomial(c));
            }
            cols.push_back(std::move(u));
        }
        const std::size_t r = detail::k_rank(F, cols);
        while (have < r) {
            prof.R.push_back(strict ? R + 1 : R);
            ++have;
        }
    }
    if (have < N) throw DomainError("lattice is degenerate: minima not reached by the basis norm");
    return prof;
}

struct ReducedBasis {
    /// columns of the reduced basis
    std::vector<std::vector<LaurentElement>> columns;
    MinimaProfile profile;
    std::size_t steps = 0;
};

/// Column reduction over O: while the leading coefficient vectors are dependent,
/// cancel the leading vector of the widest column involved.
inline ReducedBasis successive_minima(const FunctionFieldLattice& L, bool strict = false, std::size_t max_steps = 100000) {
    const auto& F = L.field();
    const std::size_t N = L.dim();
    ReducedBasis out;
    auto& cols = out.columns;
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<LaurentElement> c;
        for (std::size_t i = 0; i < N; ++i) c.push_back(L.generator()[i][j]);
        cols.push_back(std::move(c));
    }
    auto order = [&](std::size_t j) {
        try {
            const long o = row_order(cols[j]);
            if (o == LONG_MIN) throw DomainError("basis column " + std::to_string(j) + " vanished: generator is singular");
            return o;
        } catch (const PrecisionError& e) {
            throw PrecisionError("pivot of column " + std::to_string(j) + " undetermined after " + std::to_string(out.steps) + " steps: " + e.what());
        }
    };
    while (true) {
        std::vector<long> r(N);
        for (std::size_t j = 0; j < N; ++j) r[j] = order(j);
        FqMatrix lc(N, N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) lc(i, j) = cols[j][i].coeff(r[j]);
        auto ker = lc.kernel(F);
        if (ker.empty()) {
            std::sort(r.begin(), r.end());
            if (strict)
                for (auto& x : r) ++x;
            out.profile = {r, strict};
            return out;
        }
        if (++out.steps > max_steps) throw BudgetExceeded("reduction did not finish in " + std::to_string(max_steps) + " steps");
        const auto& c = ker[0];
        std::size_t j0 = N;
        for (std::size_t j = 0; j < N; ++j)
            if (c[j].code && (j0 == N || r[j] > r[j0])) j0 = j;
        const FieldElement inv = F.inv(c[j0]);
        for (std::size_t j = 0; j < N; ++j) {
            if (j == j0 || c[j].code == 0) continue;
            const FieldElement s = F.mul(c[j], inv);
            for (std::size_t i = 0; i < N; ++i)
                cols[j0][i] = laurent::add(F, cols[j0][i], laurent::scale(F, s, laurent::shift(cols[j][i], r[j0] - r[j])));
        }
    }
}

/// q-exponent of #{|x| < q^Z} from a non-strict profile: sum_j max(0, Z - R_j).
inline long predicted_count_exponent(const MinimaProfile& p, long Z) {
    long s = 0;
    for (long R : p.R) s += std::max(0L, Z - (p.strict ? R - 1 : R));
    return s;
}

inline bool minima_symmetric(const MinimaProfile& p) {
    const std::size_t N = p.R.size();
    for (std::size_t v = 0; v < N; ++v)
        if (p.R[v] + p.R[N - 1 - v] != 0) return false;
    return true;
}

struct RatioReport {
    bool pass = false;
    Integer M1, M2;
    /// the proof's three-case formula, as a q-exponent of M1/M2
    long formula_exponent = 0;
    bool formula_matches = false;
    int formula_case = 0;
};

/// Symmetric n x n gamma with exact entries supported on exponents [lo, hi];
/// digits are rng() mod q, so a seed fixes the instance on every platform.
inline LaurentMatrix random_gamma(std::mt19937_64& rng, const FieldSpec& F, std::size_t n, long lo = -3, long hi = 3) {
    LaurentMatrix g(n, std::vector<LaurentElement>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            std::map<long, FieldElement> terms;
            for (long k = lo; k <= hi; ++k) terms[k] = {static_cast<std::uint32_t>(rng() % F.q())};
            g[i][j] = g[j][i] = LaurentElement::from_terms(terms, lo, true);
        }
    return g;
}

/// M_m(Z_1)/M_m(Z_2) >= q^{n(Z_1 - Z_2)} for integers Z_1 <= Z_2 <= 0.
inline RatioReport check_ratio_lemma(const SpecialLatticePair& pair, long Z1, long Z2, bool strict = false) {
    if (!(Z1 <= Z2 && Z2 <= 0)) throw DomainError("ratio lemma needs Z_1 <= Z_2 <= 0");
    const auto L = pair.M();
    const std::uint32_t q = pair.field().q();
    RatioReport rep;
    rep.M1 = count_lattice_points(L, Z1);
    rep.M2 = count_lattice_points(L, Z2);
    const long n = static_cast<long>(pair.n());
    rep.pass = rep.M1 * ipow(q, static_cast<unsigned>(n * (Z2 - Z1))) >= rep.M2;

    auto prof = successive_minima(L, strict).profile;
    auto R = prof.R;
    if (strict)
        for (auto& x : R) --x;  // the case split is phrased for the non-strict minima
    auto below = [&](long Z) {
        long k = 0;
        while (k < static_cast<long>(R.size()) && R[static_cast<std::size_t>(k)] < Z) ++k;
        return k;
    };
    const long mu = below(Z1), nu = below(Z2);
    long e = 0;
    if (Z2 < R[0]) {
        rep.formula_case = 1;
    } else if (Z1 < R[0]) {
        rep.formula_case = 2;
        for (long j = 0; j < nu; ++j) e += R[static_cast<std::size_t>(j)] - Z1;
        e += nu * (Z1 - Z2);
    } else {
        rep.formula_case = 3;
        for (long j = mu; j < nu; ++j) e += R[static_cast<std::size_t>(j)] - Z1;
        e += nu * (Z1 - Z2);
    }
    rep.formula_exponent = e;
    const Integer Q = ipow(q, static_cast<unsigned>(std::abs(e)));
    rep.formula_matches = e >= 0 ? rep.M1 == rep.M2 * Q : rep.M1 * Q == rep.M2;
    return rep;
}

/// N(a, Z): |u_j| < q^{a+Z} and |L_j(u) + u_{j+n}| < q^{Z-a}. For each admissible
/// (u_1..u_n) there are q^{max(0, c)} choices of u_{j+n}, c = ceil(Z - a); when c < 0
/// the fractional parts of L_j(u) must also vanish on exponents c..-1.
inline Integer count_NaZ(const FieldSpec& F, const LaurentMatrix& gamma, const Rational& a, const Rational& Z) {
    const std::size_t n = gamma.size();
    const long D = std::max(0L, ceil_rational(a + Z));
    const long c = ceil_rational(Z - a);
    const std::uint32_t q = F.q();
    const std::size_t unknowns = n * static_cast<std::size_t>(D);
    std::size_t rank = 0;
    if (c < 0 && unknowns > 0) {
        std::vector<std::vector<FieldElement>> rows;
        for (std::size_t j = 0; j < n; ++j)
            for (long k = c; k <= -1; ++k) {
                std::vector<FieldElement> row(unknowns);
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& g = gamma[j][i];
                    if (g.is_certified_zero()) continue;
                    for (long l = 0; l < D; ++l) row[i * static_cast<std::size_t>(D) + static_cast<std::size_t>(l)] = g.coeff(k - l);
                }
                rows.push_back(std::move(row));
            }
        FqMatrix M(rows.size(), unknowns);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t k = 0; k < unknowns; ++k) M(r, k) = rows[r][k];
        rank = M.rank(F);
    }
    const long dim = static_cast<long>(unknowns - rank) + static_cast<long>(n) * std::max(0L, c);
    return ipow(q, static_cast<unsigned>(dim));
}

struct SandwichReport {
    bool pass = false;
    Integer lower, value, upper;
};

/// M_m(Z - {a}) <= N(a, Z) <= M_m(Z + {a}) with m = floor(a).
inline SandwichReport check_sandwich(const FieldSpec& F, const LaurentMatrix& gamma, const Rational& a, const Rational& Z) {
    const int m = static_cast<int>(floor_rational(a));
    SpecialLatticePair pair(F, gamma, m);
    auto L = pair.M();
    SandwichReport r;
    r.value = count_NaZ(F, gamma, a, Z);
    r.lower = count_lattice_points(L, Z - frac(a));
    r.upper = count_lattice_points(L, Z + frac(a));
    r.pass = r.lower <= r.value && r.value <= r.upper;
    return r;
}

struct CapeReport {
    bool pass = false;
    Integer N1, N2;
    long K = 0;
};

/// N(a, Z_1)/N(a, Z_2) >= q^{Kn}, K = ceil(Z_1 - {a}) - ceil(Z_2 + {a}).
inline CapeReport check_cape(const FieldSpec& F, const LaurentMatrix& gamma, const Rational& a, const Rational& Z1, const Rational& Z2) {
    if (!(Z1 <= Z2 && Z2 <= 0)) throw DomainError("cape lemma needs Z_1 <= Z_2 <= 0");
    CapeReport r;
    r.N1 = count_NaZ(F, gamma, a, Z1);
    r.N2 = count_NaZ(F, gamma, a, Z2);
    r.K = ceil_rational(Z1 - frac(a)) - ceil_rational(Z2 + frac(a));
    const long e = r.K * static_cast<long>(gamma.size());
    const Integer Q = ipow(F.q(), static_cast<unsigned>(std::abs(e)));
    r.pass = e >= 0 ? r.N1 >= r.N2 * Q : r.N1 * Q >= r.N2;
    return r;
}

}  // namespace latgon
}  // namespace fflab
