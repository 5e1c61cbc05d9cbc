#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circle.hpp"
#include "linalg.hpp"

namespace fflab {

enum class WeylKind { N, N_eta, M_v, CurlyN, U_eta };

inline const char* weyl_kind_name(WeylKind k) {
    switch (k) {
        case WeylKind::N: return "N";
        case WeylKind::N_eta: return "N_eta";
        case WeylKind::M_v: return "M_v";
        case WeylKind::CurlyN: return "curlyN";
        case WeylKind::U_eta: return "U_eta";
    }
    return "?";
}

/// A counting problem on tuples (u_1, ..., u_{d-1}) with |u_j| < q^{boxes[j]}.
/// threshold m asks ||alpha Psi_i(u)|| < q^{-m}; exact_zero asks Psi_i(u) = 0.
struct WeylSystem {
    std::vector<int> boxes;
    int m = 0;
    bool exact_zero = false;
};

struct WeylCount {
    WeylKind kind = WeylKind::N;
    /// (e+1)eta for N_eta and U_eta, v for M_v, kappa for curlyN
    int parameter = 0;
    Integer value;
};

namespace weyl {

namespace detail {

using Coeffs = std::vector<FieldElement>;

// Contracts tensor slots 0..d-3 against the prefix vectors; returns A[i][k] with
// Psi_i(u_1, ..., u_{d-2}, w) = sum_k A[i][k] w_k. Each A[i][k] has `len` coefficients.
inline std::vector<Coeffs> contract(const HypersurfaceForm& G, const std::vector<std::vector<Coeffs>>& prefix, std::size_t len) {
    const auto& F = G.field();
    const std::size_t n = static_cast<std::size_t>(G.n());
    // cur[idx over remaining slots] as polynomials; start with the constant tensor
    std::vector<Coeffs> cur(G.tensor().size(), Coeffs(len));
    for (std::size_t k = 0; k < cur.size(); ++k) cur[k][0] = G.tensor()[k];
    std::size_t cur_deg = 0;
    for (const auto& u : prefix) {
        // slot 0 is the fastest-varying index
        std::vector<Coeffs> next(cur.size() / n, Coeffs(len));
        std::size_t udeg = 0;
        for (const auto& c : u) udeg = std::max(udeg, c.size());
        for (std::size_t rest = 0; rest < next.size(); ++rest)
            for (std::size_t a = 0; a < n; ++a) {
                const Coeffs& src = cur[rest * n + a];
                const Coeffs& ua = u[a];
                for (std::size_t x = 0; x <= cur_deg && x < len; ++x) {
                    if (src[x].code == 0) continue;
                    for (std::size_t y = 0; y < ua.size() && x + y < len; ++y)
                        if (ua[y].code) next[rest][x + y] = F.add(next[rest][x + y], F.mul(src[x], ua[y]));
                }
            }
        cur_deg += udeg ? udeg - 1 : 0;
        cur = std::move(next);
    }
    // cur is indexed k + n*i
    return cur;
}

inline std::size_t kernel_dim(const FieldSpec& F, FqMatrix& M) {
    return M.cols() - M.rank(F);
}

}  // namespace detail

/// Exact count of the system. Enumerates every slot except the widest and
/// counts the widest slot as the kernel of the linear conditions it must meet.
/// alpha must be known down to exponent -(m + sum_j (boxes[j] - 1)).
inline Integer count_system(const HypersurfaceForm& G, const LaurentElement& alpha, WeylSystem sys, unsigned workers = 1, Budget* budget = nullptr) {
    const auto& F = G.field();
    const int n = G.n(), d = G.d();
    const std::uint32_t q = F.q();
    if (static_cast<int>(sys.boxes.size()) != d - 1) throw DomainError("need one box per slot u_1..u_{d-1}");
    for (int b : sys.boxes)
        if (b < 0) throw DomainError("box exponents must be non-negative");
    if (d < 2) throw DomainError("Weyl counts need d >= 2");
    int total_box = 0;
    for (int b : sys.boxes) total_box += b;
    if (!sys.exact_zero && sys.m <= 0) return ipow(q, static_cast<unsigned>(n * total_box));

    // Psi is symmetric in its slots, so the widest box can go last.
    std::sort(sys.boxes.begin(), sys.boxes.end());
    const int b_last = sys.boxes.back();
    if (b_last == 0) return 1;
    std::vector<int> pre(sys.boxes.begin(), sys.boxes.end() - 1);
    int pre_deg = 0, pre_digits = 0;
    for (int b : pre) {
        if (b == 0) return ipow(q, static_cast<unsigned>(n * total_box));  // u_j = 0 kills Psi
        pre_deg += b - 1;
        pre_digits += n * b;
    }
    const std::uint64_t prefixes = upow_checked(q, static_cast<unsigned>(pre_digits));
    if (prefixes == 0) throw BudgetExceeded("prefix space q^" + std::to_string(pre_digits) + " overflows");
    if (budget) budget->require(prefixes, "Weyl count");

    const std::size_t len = static_cast<std::size_t>(pre_deg + 1);
    const std::size_t cols = static_cast<std::size_t>(n * b_last);
    std::vector<FieldElement> a;
    if (!sys.exact_zero) {
        const long depth = sys.m + (b_last - 1) + pre_deg;
        for (long s = 0; s < depth; ++s) a.push_back(alpha.coeff(-1 - s));
    }
    const std::size_t rows = sys.exact_zero ? static_cast<std::size_t>(n) * (len + static_cast<std::size_t>(b_last) - 1)
                                            : static_cast<std::size_t>(n) * static_cast<std::size_t>(sys.m);

    // Scaling the whole prefix by a unit scales the matrix, so only prefixes whose
    // first nonzero digit is 1 are visited, with weight q-1.
    const std::uint64_t chunks = std::min<std::uint64_t>(prefixes, 512);
    using Hist = std::vector<std::uint64_t>;
    auto body = [&](std::uint64_t c) {
        Hist hist(cols + 1, 0);
        const std::uint64_t lo = c * prefixes / chunks, hi = (c + 1) * prefixes / chunks;
        std::uint64_t visited = 0;
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            std::uint64_t rest = idx;
            std::vector<std::vector<detail::Coeffs>> u;
            std::uint32_t lead = 0;
            for (int b : pre) {
                std::vector<detail::Coeffs> slot;
                for (int k = 0; k < n; ++k) {
                    detail::Coeffs poly(static_cast<std::size_t>(b));
                    for (auto& x : poly) {
                        x = {static_cast<std::uint32_t>(rest % q)};
                        rest /= q;
                        if (!lead && x.code) lead = x.code;
                    }
                    slot.push_back(std::move(poly));
                }
                u.push_back(std::move(slot));
            }
            if (lead > 1) continue;
            const std::uint64_t weight = lead ? q - 1 : 1;
            ++visited;
            auto A = detail::contract(G, u, len);
            FqMatrix M(rows, cols);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    const auto& aik = A[static_cast<std::size_t>(k + n * i)];
                    for (int l = 0; l < b_last; ++l) {
                        const std::size_t col = static_cast<std::size_t>(k * b_last + l);
                        if (sys.exact_zero) {
                            for (std::size_t h = 0; h < len; ++h)
                                M(static_cast<std::size_t>(i) * (len + b_last - 1) + h + static_cast<std::size_t>(l), col) = aik[h];
                        } else {
                            // coefficient at t^{-1-j} of alpha * aik * t^l
                            for (int j = 0; j < sys.m; ++j) {
                                FieldElement s = F.zero();
                                for (std::size_t h = 0; h < len; ++h)
                                    if (aik[h].code) s = F.add(s, F.mul(a[static_cast<std::size_t>(j + l) + h], aik[h]));
                                M(static_cast<std::size_t>(i * sys.m + j), col) = s;
                            }
                        }
                    }
                }
            hist[detail::kernel_dim(F, M)] += weight;
        }
        if (budget) budget->charge(visited);
        return hist;
    };
    Hist hist = parallel_reduce<Hist>(chunks, workers, Hist(cols + 1, 0), body, [](Hist acc, Hist h) {
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += h[k];
        return acc;
    });
    Integer total = 0;
    for (std::size_t k = 0; k < hist.size(); ++k)
        if (hist[k]) total += Integer(std::to_string(hist[k])) * ipow(q, static_cast<unsigned>(k));
    return total;
}

inline WeylSystem system_N(const CountingProblem& prob) {
    return {std::vector<int>(static_cast<std::size_t>(prob.d() - 1), prob.e() + 1), prob.e() + 1, false};
}

/// k = (e+1)eta: box |u_j| < q^k, threshold |P|^{-d+(d-1)eta} = q^{-((e+1)d-(d-1)k)}.
inline WeylSystem system_N_eta(const CountingProblem& prob, int k) {
    if (k < 0 || k > prob.e() + 1) throw DomainError("(e+1)eta must lie in [0, e+1]");
    return {std::vector<int>(static_cast<std::size_t>(prob.d() - 1), k), (prob.e() + 1) * prob.d() - (prob.d() - 1) * k, false};
}

inline WeylSystem system_M_v(const CountingProblem& prob, int v) {
    if (v < 1 || v > prob.d()) throw DomainError("v must lie in [1, d]");
    std::vector<int> boxes(static_cast<std::size_t>(prob.d() - 1), prob.e() + 1);
    for (int j = 0; j < v - 1 && j < prob.d() - 1; ++j) boxes[static_cast<std::size_t>(j)] = 1;
    return {boxes, prob.e() + 1, false};
}

inline int kappa(int e) { return e % 2 ? 1 : 0; }

/// |u_j| <= q^kappa and threshold q^{kappa(d-1)-de-1}.
inline WeylSystem system_curly_N(const CountingProblem& prob, int kap) {
    if (kap != 0 && kap != 1) throw DomainError("kappa must be 0 or 1");
    return {std::vector<int>(static_cast<std::size_t>(prob.d() - 1), kap + 1), prob.d() * prob.e() + 1 - kap * (prob.d() - 1), false};
}

inline WeylSystem system_U_eta(const CountingProblem& prob, int k) {
    if (k < 0 || k > prob.e() + 1) throw DomainError("(e+1)eta must lie in [0, e+1]");
    return {std::vector<int>(static_cast<std::size_t>(prob.d() - 1), k), 0, true};
}

inline Integer count_N(const CountingProblem& prob, const LaurentElement& alpha, unsigned workers = 1, Budget* budget = nullptr) {
    return count_system(prob.form(), alpha, system_N(prob), workers, budget);
}

/// eta is passed as k = (e+1)eta so that non-integral box exponents cannot be expressed.
inline Integer count_N_eta(const CountingProblem& prob, const LaurentElement& alpha, int k, unsigned workers = 1, Budget* budget = nullptr) {
    return count_system(prob.form(), alpha, system_N_eta(prob, k), workers, budget);
}

/// Rational eta; rejected unless (e+1)eta is an integer.
inline int eta_to_k(const CountingProblem& prob, const Rational& eta) {
    Rational k = eta * (prob.e() + 1);
    k.canonicalize();
    if (k.get_den() != 1) throw DomainError("(e+1)eta = " + to_string(k) + " is not an integer");
    if (k < 0 || k > prob.e() + 1) throw DomainError("eta must lie in [0, 1]");
    return static_cast<int>(k.get_num().get_si());
}

inline Integer count_M_v(const CountingProblem& prob, const LaurentElement& alpha, int v, unsigned workers = 1, Budget* budget = nullptr) {
    return count_system(prob.form(), alpha, system_M_v(prob, v), workers, budget);
}

inline Integer count_curly_N(const CountingProblem& prob, const LaurentElement& alpha, int kap, unsigned workers = 1, Budget* budget = nullptr) {
    return count_system(prob.form(), alpha, system_curly_N(prob, kap), workers, budget);
}

inline Integer count_U_eta(const CountingProblem& prob, int k, unsigned workers = 1, Budget* budget = nullptr) {
    return count_system(prob.form(), LaurentElement::exact_zero(), system_U_eta(prob, k), workers, budget);
}

/// |S|^power <= rhs, decided exactly.
struct InequalityReport {
    bool pass = false;
    CyclotomicValue S;
    unsigned power = 1;
    Integer count;
    Rational rhs;
    std::string detail;
};

inline InequalityReport make_report(const CyclotomicValue& S, unsigned power, Integer count, Rational rhs, std::string detail) {
    InequalityReport r;
    r.S = S;
    r.power = power;
    r.count = std::move(count);
    r.rhs = std::move(rhs);
    r.pass = cyclo_mag_compare(S, r.rhs, power) == MagnitudeOrder::LessOrEqual;
    r.detail = std::move(detail);
    return r;
}

/// |S(alpha)|^{2^{d-1}} <= |P|^{(2^{d-1}-d+1)n} N(alpha)
inline InequalityReport check_weyl(ExpSumEngine& eng, const LaurentElement& alpha, unsigned workers = 1, Budget* budget = nullptr) {
    const auto& prob = eng.problem();
    const int d = prob.d(), n = prob.n();
    const long two = 1L << (d - 1);
    Integer N = count_N(prob, alpha, workers, budget);
    Rational rhs = qpow(prob.q(), static_cast<long>(prob.P_exponent()) * (two - d + 1) * n) * Rational(N);
    return make_report(eng.S(alpha), static_cast<unsigned>(two), N, rhs, "N=" + to_string(N));
}

/// |S(alpha)|^{2^{d-1}} <= |P|^{(2^{d-1}-d+1)n} q^{e(v-1)n} M^{(v)}(alpha)
inline InequalityReport check_M_v(ExpSumEngine& eng, const LaurentElement& alpha, int v, unsigned workers = 1, Budget* budget = nullptr) {
    const auto& prob = eng.problem();
    const int d = prob.d(), n = prob.n(), e = prob.e();
    const long two = 1L << (d - 1);
    Integer M = count_M_v(prob, alpha, v, workers, budget);
    Rational rhs = qpow(prob.q(), static_cast<long>(e + 1) * (two - d + 1) * n + static_cast<long>(e) * (v - 1) * n) * Rational(M);
    return make_report(eng.S(alpha), static_cast<unsigned>(two), M, rhs, "M_v=" + to_string(M));
}

/// |S(alpha)|^{2^{d-1}} <= |P|^{2^{d-1}n} q^{-(1+kappa)(d-1)n} curlyN(alpha)
inline InequalityReport check_curly_chain(ExpSumEngine& eng, const LaurentElement& alpha, unsigned workers = 1, Budget* budget = nullptr) {
    const auto& prob = eng.problem();
    const int d = prob.d(), n = prob.n(), kap = kappa(prob.e());
    const long two = 1L << (d - 1);
    Integer C = count_curly_N(prob, alpha, kap, workers, budget);
    Rational rhs = qpow(prob.q(), static_cast<long>(prob.P_exponent()) * two * n - static_cast<long>(1 + kap) * (d - 1) * n) * Rational(C);
    return make_report(eng.S(alpha), static_cast<unsigned>(two), C, rhs, "curlyN=" + to_string(C));
}

struct ShrinkReport {
    bool pass = false;
    int k = 0;
    Integer N, N_eta;
    Integer rhs;
};

/// (e+1)(eta+1)/2 in Z is (e+1+k) even.
inline bool shrink_hypothesis(const CountingProblem& prob, int k) {
    return k >= 0 && k <= prob.e() + 1 && (prob.e() + 1 + k) % 2 == 0;
}

/// N(alpha) <= |P|^{(n-eta n)(d-1)} N_eta(alpha) with k = (e+1)eta.
inline ShrinkReport check_shrink(const CountingProblem& prob, const LaurentElement& alpha, int k, unsigned workers = 1, Budget* budget = nullptr) {
    if (!shrink_hypothesis(prob, k))
        throw DomainError("(e+1)(eta+1)/2 is not an integer for (e+1)eta = " + std::to_string(k));
    ShrinkReport r;
    r.k = k;
    r.N = count_N(prob, alpha, workers, budget);
    r.N_eta = count_N_eta(prob, alpha, k, workers, budget);
    r.rhs = ipow(prob.q(), static_cast<unsigned>((prob.e() + 1 - k) * prob.n() * (prob.d() - 1))) * r.N_eta;
    r.pass = r.N <= r.rhs;
    return r;
}

/// Every k = (e+1)eta with eta in [0,1) meeting the parity hypothesis.
inline std::vector<int> admissible_k(const CountingProblem& prob) {
    std::vector<int> out;
    for (int k = 0; k <= prob.e(); ++k)
        if (shrink_hypothesis(prob, k)) out.push_back(k);
    return out;
}

/// Gamma = ord(min{...}) / (d-1), with the min taken over q-exponents; theta may be zero.
inline Rational gamma(const CountingProblem& prob, long deg_r, std::optional<long> ord_theta) {
    const long d = prob.d(), P = prob.P_exponent();
    long m = P * (d - 1) - 1;
    if (ord_theta) m = std::min(m, -1 - deg_r - *ord_theta);
    m = std::min(m, P * d - 1 - deg_r);
    m = std::min(m, deg_r + std::max(0L, P * d + (ord_theta ? *ord_theta : LONG_MIN / 2)));
    Rational g(m, d - 1);
    g.canonicalize();
    return g;
}

/// Largest non-negative integer <= g congruent to i mod 2.
inline std::optional<long> parity_floor(const Rational& g, int i) {
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), g.get_num_mpz_t(), g.get_den_mpz_t());
    long v = f.get_si();
    if (((v % 2) + 2) % 2 != i) --v;
    if (v < 0) return std::nullopt;
    return v;
}

/// (e+1)eta = [Gamma]_0 for odd e, [Gamma]_1 for even e.
inline std::optional<long> eta_choice(const CountingProblem& prob, const Rational& g) {
    return parity_floor(g, prob.e() % 2 ? 0 : 1);
}

enum class PointwiseLemma { General, DegRPositive, DegRZero };

inline const char* lemma_name(PointwiseLemma l) {
    switch (l) {
        case PointwiseLemma::General: return "pointwise";
        case PointwiseLemma::DegRPositive: return "pointwise-deg-r-positive";
        case PointwiseLemma::DegRZero: return "pointwise-deg-r-zero";
    }
    return "?";
}

struct PointwiseReport {
    PointwiseLemma lemma = PointwiseLemma::General;
    Polynomial a, r;
    LaurentElement theta;
    bool hypotheses_hold = false;
    std::string reason;
    std::string branch;
    Rational Gamma;
    long k = 0;
    /// q-exponent of the bound without its constant
    Rational bound_exponent;
    CyclotomicValue S;
    double abs_S = 0;
    double ratio = 0;
};

/// Measures |S(a/r + theta)| against the bound shape of one pointwise lemma.
/// theta must be exact or known to depth B; r monic.
inline PointwiseReport check_pointwise_bounds(ExpSumEngine& eng, PointwiseLemma lemma, const Polynomial& a, const Polynomial& r, const LaurentElement& theta) {
    const auto& prob = eng.problem();
    const auto& F = prob.field();
    if (r.is_zero()) throw DomainError("r must be nonzero");
    const int d = prob.d(), n = prob.n(), e = prob.e(), kap = kappa(e);
    const long deg_r = r.degree();
    const Magnitude th = laurent::abs_value(theta);
    const std::optional<long> ord_theta = th.zero ? std::nullopt : std::optional<long>(th.exponent);
    if (ord_theta && *ord_theta >= 0) throw DomainError("theta must lie in T");
    const Rational L(n, 1L << (d - 1));

    PointwiseReport rep;
    rep.a = a;
    rep.r = r;
    rep.theta = theta;
    rep.lemma = lemma;
    rep.Gamma = gamma(prob, deg_r, ord_theta);
    // |r theta| as a q-exponent, absent when theta = 0
    const std::optional<long> rtheta = ord_theta ? std::optional<long>(deg_r + *ord_theta) : std::nullopt;
    switch (lemma) {
        case PointwiseLemma::General: {
            auto k = eta_choice(prob, rep.Gamma);
            if (!k) {
                rep.reason = "eta undefined: Gamma = " + to_string(rep.Gamma) + " has no admissible parity floor";
                return rep;
            }
            rep.k = *k;
            rep.bound_exponent = Rational(prob.P_exponent() * n) - L * Rational(*k);
            rep.hypotheses_hold = true;
            break;
        }
        case PointwiseLemma::DegRPositive: {
            const bool i = deg_r >= 1 && deg_r < d * e + 1 - kap * (d - 1) && (!rtheta || *rtheta < -kap * (d - 1));
            const bool ii = e == 1 && deg_r >= 2 && deg_r <= d && (!rtheta || *rtheta <= -d);
            if (!i && !ii) {
                rep.reason = "needs q <= |r| < q^{de+1-kappa(d-1)} with |r theta| < q^{-kappa(d-1)}, or e = 1 with q^2 <= |r| <= q^d and |r theta| <= q^{-d}";
                return rep;
            }
            rep.branch = i ? "i" : "ii";
            rep.bound_exponent = Rational(prob.P_exponent() * n) - L;
            rep.hypotheses_hold = true;
            break;
        }
        case PointwiseLemma::DegRZero: {
            if (deg_r != 0) {
                rep.reason = "needs deg r = 0";
                return rep;
            }
            if (!ord_theta || *ord_theta < -(d * e + 1) || *ord_theta > -1 - kap * (d - 1)) {
                rep.reason = "needs q^{-de-1} <= |theta| <= q^{-1-kappa(d-1)}";
                return rep;
            }
            rep.bound_exponent = Rational(prob.P_exponent() * n) - L;
            rep.hypotheses_hold = true;
            break;
        }
    }
    auto center = laurent::expand_rational(F, a, r, -prob.B());
    auto alpha = laurent::add(F, center, theta.truncated(-prob.B()));
    rep.S = eng.S(alpha);
    rep.abs_S = approximate_abs(rep.S);
    rep.bound_exponent.canonicalize();
    rep.ratio = rep.abs_S / std::pow(static_cast<double>(prob.q()), rep.bound_exponent.get_d());
    return rep;
}

/// Largest ratio over every arc a/r with deg r = deg_r and every depth-B theta with
/// |theta| = q^{ord_theta} (theta = 0 when ord_theta is empty). Arcs whose
/// hypotheses fail are skipped; returns nullopt when none qualify.
inline std::optional<PointwiseReport> max_pointwise_ratio(ExpSumEngine& eng, PointwiseLemma lemma, long deg_r, std::optional<long> ord_theta) {
    const auto& prob = eng.problem();
    const auto& F = prob.field();
    const std::uint32_t q = F.q();
    std::vector<LaurentElement> thetas;
    if (!ord_theta) {
        thetas.push_back(LaurentElement::exact_zero());
    } else {
        const long top = *ord_theta, depth = prob.B();
        if (top >= 0 || -top > depth) throw DomainError("|theta| outside the depth-B window");
        const std::uint64_t tail = upow_checked(q, static_cast<unsigned>(depth + top));
        for (std::uint32_t lead = 1; lead < q; ++lead)
            for (std::uint64_t t = 0; t < tail; ++t) {
                std::map<long, FieldElement> terms{{top, FieldElement{lead}}};
                std::uint64_t x = t;
                for (long k = top - 1; k >= -depth; --k) {
                    terms[k] = {static_cast<std::uint32_t>(x % q)};
                    x /= q;
                }
                thetas.push_back(LaurentElement::from_terms(terms, -depth, false));
            }
    }
    std::optional<PointwiseReport> best;
    const std::uint64_t per = upow_checked(q, static_cast<unsigned>(deg_r));
    for (std::uint64_t ri = 0; ri < per; ++ri) {
        auto low = poly::from_index(ri, q, static_cast<int>(deg_r));
        std::vector<FieldElement> rc = low.coeffs();
        rc.resize(static_cast<std::size_t>(deg_r) + 1);
        rc.back() = F.one();
        Polynomial r(rc);
        for (std::uint64_t ai = 0; ai < per; ++ai) {
            auto a = poly::from_index(ai, q, static_cast<int>(deg_r));
            if (deg_r > 0 && (a.is_zero() || poly::gcd(F, a, r).degree() > 0)) continue;
            for (const auto& th : thetas) {
                auto rep = check_pointwise_bounds(eng, lemma, a, r, th);
                if (!rep.hypotheses_hold) continue;
                if (!best || rep.ratio > best->ratio) best = rep;
            }
        }
    }
    return best;
}

}  // namespace weyl
}  // namespace fflab
