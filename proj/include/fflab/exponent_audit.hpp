#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace fflab::audit {

/// 2^{d-1}(5d-4)
inline long n0(int d) {
    if (d < 3) throw DomainError("n0 needs d >= 3");
    return (1L << (d - 1)) * (5L * d - 4);
}

/// Expected dimensions; n counts affine variables (X in P^{n-1}).
struct Dims {
    long mu_bar;       // projective moduli, written with the projective dimension n-1
    long mu_expected;  // (n'+1)(e+1) - 1 - (de+1) with n' = n-1
    long mu;           // (n-d)e + n - 2
    long mu_hat;       // (e+1)n - de - 1
};

inline Dims dims(long n, long d, long e) {
    const long np = n - 1;
    return {(np + 1 - d) * e + np - 4, (np + 1) * (e + 1) - 1 - (d * e + 1), (n - d) * e + n - 2, (e + 1) * n - d * e - 1};
}

/// Same quantities when the caller counts the projective dimension.
inline Dims dims_projective(long n_proj, long d, long e) { return dims(n_proj + 1, d, e); }

struct BudgetInput {
    int d = 3;
    long n = 0;
    int e = 1;
    long alpha = 0, beta = 0;
};

/// 0 <= alpha <= d(e+1)/2, alpha + d(e+1)/2 <= beta <= 3de, beta <= de+1 when alpha = 0.
inline bool in_range(const BudgetInput& in) {
    const long twice = static_cast<long>(in.d) * (in.e + 1);
    if (in.alpha < 0 || 2 * in.alpha > twice) return false;
    if (2 * (in.beta - in.alpha) < twice || in.beta > 3L * in.d * in.e) return false;
    if (in.alpha == 0 && in.beta > static_cast<long>(in.d) * in.e + 1) return false;
    return true;
}

/// The min formula itself, without the range check.
inline Rational gamma_formula(const BudgetInput& in) {
    const long d = in.d, e = in.e, a = in.alpha, b = in.beta;
    const long M = std::max(0L, (e + 1) * d - b);
    const long m = std::min({(e + 1) * (d - 1) - 1, b - a - 1, (e + 1) * d - a - 1, a + M});
    Rational g(m, d - 1);
    g.canonicalize();
    return g;
}

inline Rational gamma_budget(const BudgetInput& in) {
    if (!in_range(in)) throw DomainError("(alpha, beta) outside the minor-arc range");
    return gamma_formula(in);
}

/// [Gamma]_0 for odd e, [Gamma]_1 for even e; nullopt when no such integer exists.
inline std::optional<long> eta_choice(const Rational& g, int e) {
    const int i = e % 2 ? 0 : 1;
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), g.get_num_mpz_t(), g.get_den_mpz_t());
    long v = f.get_si();
    if (((v % 2) + 2) % 2 != i) --v;
    if (v < 0) return std::nullopt;
    return v;
}

inline Rational L_of(long n, int d) {
    Rational L(n, 1L << (d - 1));
    L.canonicalize();
    return L;
}

inline Rational nu_hat(const BudgetInput& in, long k_eta, const Rational& L) {
    return L * Rational(k_eta) + Rational(in.beta - static_cast<long>(in.d) * in.e - 2 * in.alpha - 2);
}

inline int kappa(int e) { return e % 2 ? 1 : 0; }

/// Whether a flat saving L + beta - de - 2 alpha - 2 is available from the
/// deg r = 0 window or the deg r >= 1 conditions; names the branch.
inline std::optional<std::string> flat_route(const BudgetInput& in) {
    const long d = in.d, e = in.e, a = in.alpha, b = in.beta, k = kappa(in.e);
    if (a == 0) {
        if (1 + k * (d - 1) <= b && b <= d * e + 1) return "pointwise-deg-r-zero";
        return std::nullopt;
    }
    if (a >= 1 && a < d * e + 1 - k * (d - 1) && a - b < -k * (d - 1)) return "pointwise-deg-r-positive(i)";
    if (e == 1 && a >= 2 && a <= d && a - b <= -d) return "pointwise-deg-r-positive(ii)";
    return std::nullopt;
}

/// Case label following the order of the case split.
inline int case_label(const BudgetInput& in) {
    const long d = in.d, e = in.e, a = in.alpha, b = in.beta;
    if (a >= 2 * (d - 1) && b >= (e + 1) * d + 1) return 1;
    if (a + d * e - d + 2 > b && b <= (e + 1) * d) return 2;
    if (a <= 2 * (d - 1) && b >= (e + 1) * d + 1) return 3;
    return 4;
}

struct ExponentAudit {
    BudgetInput in;
    Rational Gamma;
    int kappa = 0;
    std::optional<long> k_eta;
    int case_taken = 0;
    // decomposition alpha' - iota = k(d-1) + l for cases 1 and 2
    std::optional<long> k, l, iota, delta;
    // (d-1) Gamma = alpha' - iota as stated for the case, and (e+1)eta = k - delta
    bool gamma_identity = true;
    bool eta_identity = true;
    std::optional<Rational> saving_A, saving_B;
    std::string route;
    Rational saving;
    bool positive = false;
};

inline ExponentAudit audit_pair(const BudgetInput& in) {
    ExponentAudit a;
    a.in = in;
    a.Gamma = gamma_budget(in);
    a.kappa = kappa(in.e);
    a.k_eta = eta_choice(a.Gamma, in.e);
    a.case_taken = case_label(in);
    const Rational L = L_of(in.n, in.d);
    const long d = in.d, e = in.e;
    if (a.case_taken == 1 || a.case_taken == 2) {
        long base, iota;
        if (a.case_taken == 1) {
            iota = 2 * in.alpha == d * (e + 1) ? 1 : 0;
            base = in.alpha;
        } else {
            iota = in.beta > 2 * in.alpha ? 0 : 1;
            base = in.alpha + (e + 1) * d - in.beta;
        }
        const long k = (base - iota) / (d - 1), l = (base - iota) % (d - 1);
        a.k = k;
        a.l = l;
        a.iota = iota;
        a.delta = ((k - e) % 2 == 0) ? 1 : 0;
        a.gamma_identity = a.Gamma * (d - 1) == Rational(base - iota);
        a.eta_identity = k - *a.delta >= 0 ? a.k_eta == k - *a.delta : !a.k_eta.has_value();
    }
    if (a.k_eta) a.saving_A = nu_hat(in, *a.k_eta, L);
    if (auto r = flat_route(in)) {
        a.saving_B = L + Rational(in.beta - d * e - 2 * in.alpha - 2);
        a.route = *r;
    }
    if (a.saving_A && (!a.saving_B || *a.saving_A >= *a.saving_B)) {
        a.saving = *a.saving_A;
        a.route = "pointwise";
    } else if (a.saving_B) {
        a.saving = *a.saving_B;
    }
    a.positive = (a.saving_A || a.saving_B) && a.saving > 0;
    return a;
}

struct AuditReport {
    int d = 3;
    long n = 0;
    int e = 1;
    std::vector<ExponentAudit> pairs;
    bool pass = false;
    Rational min_saving;
    std::vector<std::pair<long, long>> failures;
};

inline AuditReport audit_minor_arcs(int d, long n, int e) {
    if (d < 3 || e < 1) throw DomainError("audit needs d >= 3 and e >= 1");
    AuditReport rep;
    rep.d = d;
    rep.n = n;
    rep.e = e;
    bool first = true;
    for (long a = 0; 2 * a <= static_cast<long>(d) * (e + 1); ++a)
        for (long b = 0; b <= 3L * d * e; ++b) {
            BudgetInput in{d, n, e, a, b};
            if (!in_range(in)) continue;
            auto x = audit_pair(in);
            if (!x.positive) rep.failures.push_back({a, b});
            if (first || x.saving < rep.min_saving) rep.min_saving = x.saving;
            first = false;
            rep.pairs.push_back(std::move(x));
        }
    rep.pass = rep.failures.empty() && !rep.pairs.empty();
    return rep;
}

inline std::string opt_str(const std::optional<long>& v) { return v ? std::to_string(*v) : ""; }
inline std::string opt_str(const std::optional<Rational>& v) { return v ? to_string(*v) : ""; }

inline void write_csv(std::ostream& os, const AuditReport& rep) {
    os << "d,n,e,alpha,beta,Gamma,kappa,k_eta,delta,k,l,iota,case,gamma_identity,eta_identity,saving_A,saving_B,route,saving,positive\n";
    for (const auto& x : rep.pairs)
        os << x.in.d << ',' << x.in.n << ',' << x.in.e << ',' << x.in.alpha << ',' << x.in.beta << ',' << to_string(x.Gamma) << ','
           << x.kappa << ',' << opt_str(x.k_eta) << ',' << opt_str(x.delta) << ',' << opt_str(x.k) << ',' << opt_str(x.l) << ','
           << opt_str(x.iota) << ',' << x.case_taken << ',' << x.gamma_identity << ',' << x.eta_identity << ',' << opt_str(x.saving_A) << ',' << opt_str(x.saving_B) << ',' << x.route
           << ',' << to_string(x.saving) << ',' << (x.positive ? 1 : 0) << '\n';
}

}  // namespace fflab::audit
