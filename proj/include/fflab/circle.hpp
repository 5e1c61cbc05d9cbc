#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "forms.hpp"
#include "parallel.hpp"

namespace fflab {

/// Counting N(P) for P = t^{e+1}: all exponents below are in powers of q.
class CountingProblem {
public:
    CountingProblem(HypersurfaceForm form, int e) : form_(std::move(form)), e_(e) {
        if (e < 1) throw DomainError("curve degree e must be >= 1");
        if (form_.field().p() <= static_cast<std::uint32_t>(form_.d()))
            throw DomainError("characteristic must exceed the degree");
    }

    const FieldSpec& field() const { return form_.field(); }
    const HypersurfaceForm& form() const { return form_; }
    std::uint32_t q() const { return field().q(); }
    int n() const { return form_.n(); }
    int d() const { return form_.d(); }
    int e() const { return e_; }
    /// |P| = q^{e+1}
    int P_exponent() const { return e_ + 1; }
    /// 2Q = d(e+1); Q may be half-integral
    int Q_doubled() const { return d() * (e_ + 1); }
    int Q_floor() const { return Q_doubled() / 2; }
    /// character depth de+1
    int B() const { return d() * e_ + 1; }
    long mu() const { return static_cast<long>(n() - d()) * e_ + n() - 2; }
    long mu_hat() const { return static_cast<long>(e_ + 1) * n() - d() * e_ - 1; }
    /// q^{(e+1)n} lattice vectors in the box
    std::uint64_t box_size() const {
        const auto s = upow_checked(q(), static_cast<unsigned>((e_ + 1) * n()));
        if (s == 0) throw BudgetExceeded("box of size q^" + std::to_string((e_ + 1) * n()) + " overflows");
        return s;
    }

    /// x in the box from its index: coordinates are base-q digits, x_i low coefficient first.
    std::vector<Polynomial> box_vector(std::uint64_t index) const {
        std::vector<Polynomial> x;
        const std::uint64_t per = upow_checked(q(), static_cast<unsigned>(e_ + 1));
        for (int i = 0; i < n(); ++i) {
            x.push_back(poly::from_index(index % per, q(), e_ + 1));
            index /= per;
        }
        return x;
    }

private:
    HypersurfaceForm form_;
    int e_;
};

/// One arc a/r + {|theta| < q^{-Y}} of the dissection.
struct ArcPoint {
    Polynomial r, a;
    int Y = 0;
    bool is_r1() const { return r.degree() == 0; }
};

/// The depth-B prefix alpha_{-1}, ..., alpha_{-B} packed as sum_j code_j q^j.
using AtomKey = std::uint64_t;

/// Exponential sums S(alpha) over the box deg x_i <= e. S only depends on the
/// coefficients alpha_{-1}, ..., alpha_{-(de+1)}, so values are cached by AtomKey.
class ExpSumEngine {
public:
    explicit ExpSumEngine(const CountingProblem& prob, Budget* budget = nullptr, unsigned workers = 1)
        : prob_(prob), width_(static_cast<std::size_t>(prob.B())) {
        const auto& F = prob.field();
        const std::uint64_t N = prob.box_size();
        if (budget) budget->charge(N);
        keys_ = upow_checked(F.q(), static_cast<unsigned>(prob.B()));
        if (keys_ == 0 || keys_ > (1ull << 26)) throw BudgetExceeded("atom key space too large");
        // histogram of the coefficient vectors of F(x); the vector itself is packed like an AtomKey
        std::vector<std::uint64_t> hist(keys_, 0);
        std::mutex m;
        const std::uint64_t chunks = std::min<std::uint64_t>(N, 256);
        parallel_reduce<int>(chunks, workers, 0, [&](std::uint64_t c) {
            std::vector<std::uint64_t> local;
            for (std::uint64_t i = c * N / chunks; i < (c + 1) * N / chunks; ++i) local.push_back(pack(forms::eval(prob.form(), prob.box_vector(i))));
            std::lock_guard lock(m);
            for (auto v : local) ++hist[v];
            return 0;
        }, [](int a, int) { return a; });
        for (std::uint64_t v = 0; v < keys_; ++v)
            if (hist[v]) {
                values_.push_back(unpack(v));
                counts_.push_back(hist[v]);
            }
        zero_count_ = hist[0];
        cache_.resize(keys_);
        filled_.assign(keys_, 0);
    }

    const CountingProblem& problem() const { return prob_; }
    std::uint64_t key_count() const { return keys_; }
    /// #{x in box : F(x) = 0}, read from the histogram.
    std::uint64_t zero_count() const { return zero_count_; }
    std::size_t distinct_values() const { return values_.size(); }

    AtomKey key_of(const LaurentElement& alpha) const {
        AtomKey k = 0;
        for (std::size_t j = width_; j-- > 0;) k = k * prob_.q() + alpha.coeff(-1 - static_cast<long>(j)).code;
        return k;
    }

    LaurentElement alpha_of(AtomKey key) const {
        std::map<long, FieldElement> terms;
        for (std::size_t j = 0; j < width_; ++j) {
            terms[-1 - static_cast<long>(j)] = {static_cast<std::uint32_t>(key % prob_.q())};
            key /= prob_.q();
        }
        return LaurentElement::from_terms(terms, -static_cast<long>(width_), false);
    }

    /// S at an atom key; thread-safe after fill_all().
    const CyclotomicValue& S(AtomKey key) {
        if (!filled_[key]) {
            cache_[key] = compute(key);
            filled_[key] = 1;
        }
        return cache_[key];
    }

    CyclotomicValue S(const LaurentElement& alpha) { return S(key_of(alpha)); }

    /// Fills every key at once by transforming the histogram one coordinate at a
    /// time: T[.., v_j -> alpha_j, ..][s] = sum_{v_j} T[.., v_j, ..][s - tr(alpha_j v_j)].
    void fill_all(unsigned workers, Budget* budget = nullptr) {
        const auto& F = prob_.field();
        const std::uint32_t q = F.q(), p = F.p();
        if (budget) budget->charge(keys_ * q * width_);
        std::vector<std::uint64_t> T(keys_ * p, 0);
        for (std::size_t i = 0; i < values_.size(); ++i) T[pack_vec(values_[i]) * p] = counts_[i];
        std::vector<std::uint32_t> tr(static_cast<std::size_t>(q) * q);
        for (std::uint32_t a = 0; a < q; ++a)
            for (std::uint32_t v = 0; v < q; ++v) tr[a * q + v] = F.trace(F.mul({a}, {v}));
        std::uint64_t stride = 1;
        for (std::size_t j = 0; j < width_; ++j, stride *= q) {
            const std::uint64_t groups = keys_ / q;
            parallel_reduce<int>(std::min<std::uint64_t>(groups, 64), workers, 0, [&](std::uint64_t c) {
                const std::uint64_t lo = c * groups / std::min<std::uint64_t>(groups, 64);
                const std::uint64_t hi = (c + 1) * groups / std::min<std::uint64_t>(groups, 64);
                std::vector<std::uint64_t> in(static_cast<std::size_t>(q) * p), out(static_cast<std::size_t>(q) * p);
                for (std::uint64_t g = lo; g < hi; ++g) {
                    const std::uint64_t base = (g / stride) * stride * q + g % stride;
                    for (std::uint32_t v = 0; v < q; ++v)
                        std::copy_n(&T[(base + v * stride) * p], p, &in[v * p]);
                    std::fill(out.begin(), out.end(), 0);
                    for (std::uint32_t a = 0; a < q; ++a)
                        for (std::uint32_t v = 0; v < q; ++v) {
                            const std::uint32_t shift = tr[a * q + v];
                            const std::uint64_t* src = &in[v * p];
                            std::uint64_t* dst = &out[a * p];
                            for (std::uint32_t s = 0; s < p; ++s) dst[(s + shift) % p] += src[s];
                        }
                    for (std::uint32_t a = 0; a < q; ++a)
                        std::copy_n(&out[a * p], p, &T[(base + a * stride) * p]);
                }
                return 0;
            }, [](int a, int) { return a; });
        }
        std::vector<Integer> by_trace(p);
        for (AtomKey k = 0; k < keys_; ++k) {
            for (std::uint32_t s = 0; s < p; ++s) by_trace[s] = Integer(std::to_string(T[k * p + s]));
            cache_[k] = CyclotomicValue::from_histogram(p, by_trace);
            filled_[k] = 1;
        }
    }

private:
    std::uint64_t pack(const Polynomial& v) const {
        std::uint64_t k = 0;
        for (std::size_t j = width_; j-- > 0;) k = k * prob_.q() + v.coeff(static_cast<int>(j)).code;
        return k;
    }
    std::uint64_t pack_vec(const std::vector<FieldElement>& v) const {
        std::uint64_t k = 0;
        for (std::size_t j = width_; j-- > 0;) k = k * prob_.q() + v[j].code;
        return k;
    }
    std::vector<FieldElement> unpack(std::uint64_t k) const {
        std::vector<FieldElement> v(width_);
        for (auto& x : v) {
            x = {static_cast<std::uint32_t>(k % prob_.q())};
            k /= prob_.q();
        }
        return v;
    }

    CyclotomicValue compute(AtomKey key) const {
        const auto& F = prob_.field();
        auto a = unpack(key);
        std::vector<Integer> by_trace(F.p());
        std::vector<std::uint64_t> small(F.p(), 0);
        for (std::size_t i = 0; i < values_.size(); ++i) {
            // (alpha F(x))_{-1} = sum_j alpha_{-1-j} v_j
            FieldElement s = F.zero();
            for (std::size_t j = 0; j < width_; ++j)
                if (a[j].code && values_[i][j].code) s = F.add(s, F.mul(a[j], values_[i][j]));
            small[F.trace(s)] += counts_[i];
        }
        for (std::uint32_t k = 0; k < F.p(); ++k) by_trace[k] = Integer(std::to_string(small[k]));
        return CyclotomicValue::from_histogram(F.p(), by_trace);
    }

    const CountingProblem& prob_;
    std::size_t width_;
    std::uint64_t keys_ = 0;
    std::vector<std::vector<FieldElement>> values_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t zero_count_ = 0;
    std::vector<CyclotomicValue> cache_;
    std::vector<char> filled_;
};

namespace circle {

/// S(alpha) by direct summation over the box; alpha must be exact to depth B.
inline CyclotomicValue exp_sum_S(const CountingProblem& prob, const LaurentElement& alpha, Budget* budget = nullptr) {
    const auto& F = prob.field();
    const std::uint64_t N = prob.box_size();
    if (budget) budget->charge(N);
    for (long k = -1; k >= -prob.B(); --k) alpha.coeff(k);  // precision check up front
    std::vector<Integer> by_trace(F.p());
    std::vector<std::uint64_t> small(F.p(), 0);
    for (std::uint64_t i = 0; i < N; ++i) {
        auto v = forms::eval(prob.form(), prob.box_vector(i));
        FieldElement s = F.zero();
        for (int j = 0; j <= v.degree(); ++j) s = F.add(s, F.mul(alpha.coeff(-1 - j), v.coeff(j)));
        small[F.trace(s)]++;
    }
    for (std::uint32_t k = 0; k < F.p(); ++k) by_trace[k] = Integer(std::to_string(small[k]));
    return CyclotomicValue::from_histogram(F.p(), by_trace);
}

/// #{x : deg x_i <= e, F(x) = 0}, zero vector included.
inline Integer brute_count_NP(const CountingProblem& prob, Budget* budget = nullptr, unsigned workers = 1) {
    const std::uint64_t N = prob.box_size();
    if (budget) budget->charge(N);
    const std::uint64_t chunks = std::min<std::uint64_t>(N, 256);
    const std::uint64_t hits = parallel_reduce<std::uint64_t>(chunks, workers, 0, [&](std::uint64_t c) {
        std::uint64_t h = 0;
        for (std::uint64_t i = c * N / chunks; i < (c + 1) * N / chunks; ++i)
            if (forms::eval(prob.form(), prob.box_vector(i)).is_zero()) ++h;
        return h;
    }, std::plus<>());
    return Integer(std::to_string(hits));
}

/// Every arc of the dissection, r monic with deg r <= floor(Q), gcd(a, r) = 1,
/// ball |theta| < |r|^{-1} Qhat^{-1}, i.e. Y = deg r + floor(Q).
inline void dissect(const CountingProblem& prob, const std::function<void(const ArcPoint&)>& emit) {
    const auto& F = prob.field();
    const std::uint32_t q = prob.q();
    for (int k = 0; k <= prob.Q_floor(); ++k) {
        const std::uint64_t count = upow_checked(q, static_cast<unsigned>(k));
        if (count == 0) throw BudgetExceeded("dissection too large");
        for (std::uint64_t ri = 0; ri < count; ++ri) {
            auto low = poly::from_index(ri, q, k);
            auto r = poly::add(F, low, Polynomial::monomial(F.one(), k));
            for (std::uint64_t ai = 0; ai < count; ++ai) {
                auto a = poly::from_index(ai, q, k);
                if (poly::gcd(F, a, r).degree() != 0) continue;
                emit(ArcPoint{r, a, k + prob.Q_floor()});
            }
        }
    }
}

inline std::vector<ArcPoint> all_arcs(const CountingProblem& prob) {
    std::vector<ArcPoint> arcs;
    dissect(prob, [&](const ArcPoint& a) { arcs.push_back(a); });
    return arcs;
}

inline LaurentElement arc_center(const CountingProblem& prob, const ArcPoint& arc, long depth) {
    return laurent::expand_rational(prob.field(), arc.a, arc.r, -depth);
}

struct ArcIntegral {
    CyclotomicValue total;
    CyclotomicValue major;  // contribution of the major atoms (r = 1, |theta| < q^{-de-1})
    std::uint64_t atoms = 0;
};

/// Exact integral of S over the arc. With Y >= B the integrand is constant;
/// otherwise sum over theta supported on exponents [-B, -Y-1] at weight q^{-B}.
inline ArcIntegral integrate_arc(ExpSumEngine& eng, const ArcPoint& arc) {
    const auto& prob = eng.problem();
    const std::uint32_t q = prob.q();
    const int B = prob.B();
    auto center = arc_center(prob, arc, B);
    const AtomKey base = eng.key_of(center);
    ArcIntegral out;
    if (arc.Y >= B) {
        out.total = eng.S(base) * qpow(q, -arc.Y);
        out.atoms = 1;
        return out;
    }
    // theta coefficients at exponents -(Y+1) .. -B are key digits Y .. B-1
    const std::uint64_t shift = upow_checked(q, static_cast<unsigned>(arc.Y));
    const std::uint64_t reps = upow_checked(q, static_cast<unsigned>(B - arc.Y));
    const auto& F = prob.field();
    CyclotomicValue sum(F.p());
    for (std::uint64_t t = 0; t < reps; ++t) {
        // digit-wise field addition of the theta digits onto the center key
        AtomKey k = base, out_key = 0, mult = 1;
        std::uint64_t th = t * shift;
        for (int j = 0; j < B; ++j) {
            const FieldElement c{static_cast<std::uint32_t>(k % q)}, d{static_cast<std::uint32_t>(th % q)};
            out_key += F.add(c, d).code * mult;
            k /= q;
            th /= q;
            mult *= q;
        }
        const auto& s = eng.S(out_key);
        sum += s;
        if (t == 0 && arc.is_r1()) out.major = s * qpow(q, -B);
    }
    out.total = sum * qpow(q, -B);
    out.atoms = reps;
    return out;
}

struct DissectionReport {
    std::uint64_t arcs = 0;
    std::uint64_t atoms = 0;
    Rational measure = 0;
    CyclotomicValue total;
    CyclotomicValue major;
    CyclotomicValue minor;
    Integer brute;
    bool identity_holds = false;
    bool major_is_q_mu_hat = false;
    bool measure_is_one = false;
};

inline DissectionReport dissect_verify(const CountingProblem& prob, unsigned workers = 1, Budget* budget = nullptr,
                                       const std::function<void(const ArcPoint&, const ArcIntegral&)>& on_arc = {}) {
    ExpSumEngine eng(prob, budget, workers);
    eng.fill_all(workers, budget);
    DissectionReport rep;
    const auto p = prob.field().p();
    rep.total = CyclotomicValue(p);
    rep.major = CyclotomicValue(p);
    dissect(prob, [&](const ArcPoint& arc) {
        auto I = integrate_arc(eng, arc);
        rep.total += I.total;
        rep.major += I.major;
        rep.atoms += I.atoms;
        rep.measure += qpow(prob.q(), -arc.Y);
        ++rep.arcs;
        if (on_arc) on_arc(arc, I);
    });
    rep.minor = rep.total - rep.major;
    rep.brute = Integer(std::to_string(eng.zero_count()));
    rep.identity_holds = rep.total == CyclotomicValue(p, Rational(rep.brute));
    rep.major_is_q_mu_hat = rep.major == CyclotomicValue(p, qpow(prob.q(), prob.mu_hat()));
    rep.measure_is_one = rep.measure == 1;
    return rep;
}

/// Number of arcs containing each depth-D atom, D = max(B, d(e+1)); returns
/// the number of atoms whose multiplicity differs from 1.
inline std::uint64_t atom_membership_defects(const CountingProblem& prob, Budget* budget = nullptr) {
    const int D = std::max(prob.B(), prob.Q_doubled());
    const std::uint32_t q = prob.q();
    const std::uint64_t atoms = upow_checked(q, static_cast<unsigned>(D));
    if (atoms == 0) throw BudgetExceeded("atom space too large");
    if (budget) budget->charge(atoms);
    // arc balls keyed by (Y, first Y digits of the center)
    std::vector<std::map<std::uint64_t, int>> balls(static_cast<std::size_t>(D) + 1);
    dissect(prob, [&](const ArcPoint& arc) {
        if (arc.Y > D) throw DomainError("arc finer than the atom depth");
        auto c = arc_center(prob, arc, arc.Y);
        std::uint64_t key = 0;
        for (int j = arc.Y; j-- > 0;) key = key * q + c.coeff(-1 - j).code;
        balls[static_cast<std::size_t>(arc.Y)][key]++;
    });
    std::uint64_t defects = 0;
    for (std::uint64_t a = 0; a < atoms; ++a) {
        int hits = 0;
        std::uint64_t mod = 1;
        for (int Y = 0; Y <= D; ++Y) {
            if (!balls[static_cast<std::size_t>(Y)].empty()) {
                auto it = balls[static_cast<std::size_t>(Y)].find(a % mod);
                if (it != balls[static_cast<std::size_t>(Y)].end()) hits += it->second;
            }
            mod *= q;
        }
        if (hits != 1) ++defects;
    }
    return defects;
}

enum class ArcClass { Major, Minor };

/// Major iff r = 1 and |theta| < q^{-de-1}; every arc with r != 1 is minor.
inline ArcClass classify_atom(const CountingProblem& prob, const ArcPoint& arc, const LaurentElement& theta) {
    if (!arc.is_r1()) return ArcClass::Minor;
    for (long k = -1; k >= -prob.B(); --k)
        if (theta.coeff(k).code != 0) return ArcClass::Minor;
    return ArcClass::Major;
}

}  // namespace circle
}  // namespace fflab
