#include <gtest/gtest.h>

#include <random>

#include "fflab/moduli.hpp"

using namespace fflab;

namespace {

FieldSpec prime_field(std::uint32_t p) { return FieldSpec(p, {0, 1}); }

moduli::Tuple tuple_from_index(std::uint64_t idx, std::uint32_t q, int n, int e) {
    moduli::Tuple c(static_cast<std::size_t>(e) + 1, std::vector<FieldElement>(static_cast<std::size_t>(n)));
    for (int k = 0; k <= e; ++k)
        for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = moduli::digit_element(idx, q);
    return c;
}

struct BruteTuples {
    std::uint64_t nonzero = 0, coprime = 0;
};

// every tuple, no orbit or linear shortcuts
BruteTuples brute_tuples(const HypersurfaceForm& G, int e) {
    const std::uint32_t q = G.field().q();
    const std::uint64_t N = upow_checked(q, static_cast<unsigned>(G.n() * (e + 1)));
    BruteTuples b;
    for (std::uint64_t i = 1; i < N; ++i) {
        auto c = tuple_from_index(i, q, G.n(), e);
        if (!moduli::composes_to_zero(G, c)) continue;
        ++b.nonzero;
        auto fs = moduli::to_forms(c, G.n());
        if (forms_coprime(G.field(), fs)) ++b.coprime;
    }
    return b;
}

HypersurfaceForm mixed_cubic_surface(const FieldSpec& F) {
    std::istringstream in("3 0 0 0 : 1\n0 3 0 0 : 1\n0 0 3 0 : 2\n0 0 0 3 : 1\n1 1 1 0 : 1\n0 1 0 2 : 3\n");
    return forms::parse_form(F, in);
}

}  // namespace

TEST(Moduli, ConeMatchesBruteNP) {
    auto F5 = prime_field(5);
    {
        CountingProblem prob(forms::diagonal(F5, 3, {1, 1}), 1);
        EXPECT_EQ(moduli::count_cone(prob), 24);
        EXPECT_EQ(moduli::count_cone(prob) + 1, circle::brute_count_NP(prob));
    }
    for (int e = 1; e <= 2; ++e) {
        CountingProblem prob(forms::diagonal(F5, 3, {1, 1, 1}), e);
        EXPECT_EQ(moduli::count_cone(prob) + 1, circle::brute_count_NP(prob)) << e;
    }
    {
        CountingProblem prob(forms::diagonal(prime_field(7), 3, {1, 2}), 2);
        EXPECT_EQ(moduli::count_cone(prob) + 1, circle::brute_count_NP(prob));
    }
    {
        CountingProblem prob(mixed_cubic_surface(F5), 1);
        EXPECT_EQ(moduli::count_cone(prob) + 1, circle::brute_count_NP(prob));
    }
    // over F_25 the raw cone is N(P) of the base-changed problem
    {
        CountingProblem prob(forms::diagonal(F5, 3, {1, 1}), 1);
        CountingProblem lifted(moduli::form_over(prob.form(), 2), 1);
        EXPECT_EQ(moduli::count_cone(prob, 2) + 1, circle::brute_count_NP(lifted));
    }
}

TEST(Moduli, ScalarOrbitsDivideCone) {
    auto F5 = prime_field(5);
    for (int e = 1; e <= 2; ++e) {
        CountingProblem prob(forms::diagonal(F5, 3, {1, 1, 1}), e);
        for (int ell = 1; ell <= 2; ++ell) {
            if (ell == 2 && e == 2) continue;
            Integer c = moduli::count_cone(prob, ell);
            const long q = ell == 1 ? 5 : 25;
            EXPECT_EQ(c % (q - 1), 0) << e << " " << ell;
        }
    }
}

TEST(Moduli, MorphismsMatchTupleEnumeration) {
    auto F5 = prime_field(5);
    struct Case {
        HypersurfaceForm G;
        int e;
    };
    std::vector<Case> cases{{forms::diagonal(F5, 3, {1, 1, 1, 1}), 1},
                            {mixed_cubic_surface(F5), 1},
                            {forms::diagonal(F5, 3, {1, 1, 1}), 2},
                            {forms::diagonal(prime_field(7), 3, {1, 1, 1}), 1}};
    for (const auto& c : cases) {
        CountingProblem prob(c.G, c.e);
        auto b = brute_tuples(c.G, c.e);
        auto counts = moduli::cone_counts(c.G, c.e, true);
        EXPECT_EQ(counts.nonzero, Integer(std::to_string(b.nonzero)));
        EXPECT_EQ(counts.coprime_orbits * (c.G.field().q() - 1), Integer(std::to_string(b.coprime)));
    }
}

TEST(Moduli, PlaneCubicHasNoLowDegreeMorphisms) {
    // a smooth plane cubic has genus one, so no nonconstant map from P^1
    CountingProblem prob(forms::diagonal(prime_field(5), 3, {1, 1, 1}), 2);
    EXPECT_EQ(moduli::count_morphisms(prob), 0);
    EXPECT_GT(moduli::count_cone(prob), 0);  // constant maps times a common factor
}

TEST(Moduli, DegreeOneMorphismsAreParametrizedLines) {
    auto F5 = prime_field(5);
    {
        auto G = forms::diagonal(F5, 3, {1, 1, 1, 1});
        const auto lines = moduli::count_lines(G);
        EXPECT_EQ(lines, 3u);
        CountingProblem prob(G, 1);
        EXPECT_EQ(moduli::count_morphisms(prob), Integer(std::to_string(lines)) * moduli::pgl2_order(5));
        EXPECT_EQ(moduli::count_morphisms(prob), 360);
    }
    {
        auto G = mixed_cubic_surface(F5);
        CountingProblem prob(G, 1);
        EXPECT_EQ(moduli::count_morphisms(prob), Integer(std::to_string(moduli::count_lines(G))) * moduli::pgl2_order(5));
    }
    {
        auto G = forms::diagonal(prime_field(7), 3, {1, 1, 1, 1});
        CountingProblem prob(G, 1);
        EXPECT_EQ(moduli::count_morphisms(prob), Integer(std::to_string(moduli::count_lines(G))) * moduli::pgl2_order(7));
    }
}

TEST(Moduli, LinesOracleCountsKnownConfigurations) {
    // the plane x_4 = 0 meets nothing else: a cone over a plane cubic has only its rulings
    auto F7 = prime_field(7);
    auto cone = forms::diagonal(F7, 3, {1, 1, 1, 0});
    // rulings join the vertex to each F_7-point of the plane Fermat cubic
    auto curve = forms::diagonal(F7, 3, {1, 1, 1});
    std::uint64_t pts = 0;
    for (std::uint32_t a = 0; a < 7; ++a)
        for (std::uint32_t b = 0; b < 7; ++b) {
            std::vector<FieldElement> x{{1}, {a}, {b}};
            if (forms::eval(curve, x).code == 0) ++pts;
            std::vector<FieldElement> y{{0}, {1}, {a}};
            if (b == 0 && forms::eval(curve, y).code == 0) ++pts;
        }
    std::vector<FieldElement> z{{0}, {0}, {1}};
    if (forms::eval(curve, z).code == 0) ++pts;
    EXPECT_EQ(moduli::count_lines(cone), pts);
}

TEST(Moduli, PencilResultantAgreesWithGcd) {
    std::mt19937_64 rng(20261018);
    auto F5 = prime_field(5);
    int coprime_seen = 0, shared_seen = 0;
    for (int e = 1; e <= 2; ++e) {
        const int n = e == 1 ? 4 : 3;
        auto G = forms::diagonal(F5, 3, std::vector<long long>(static_cast<std::size_t>(n), 1));
        std::vector<moduli::Tuple> samples;
        for (int s = 0; s < 150; ++s) samples.push_back(tuple_from_index(rng() % upow_checked(5, static_cast<unsigned>(n * (e + 1))), 5, n, e));
        // tuples sharing a linear factor
        for (int s = 0; s < 50; ++s) {
            auto c = tuple_from_index(rng() % upow_checked(5, static_cast<unsigned>(n * e)), 5, n, e - 1);
            const FieldElement a{static_cast<std::uint32_t>(rng() % 5)}, b{static_cast<std::uint32_t>(rng() % 5)};
            moduli::Tuple m(static_cast<std::size_t>(e) + 1, std::vector<FieldElement>(static_cast<std::size_t>(n)));
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < e; ++k) {
                    auto& lo = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
                    auto& hi = m[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(i)];
                    lo = F5.add(lo, F5.mul(a, c[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]));
                    hi = F5.add(hi, F5.mul(b, c[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]));
                }
            samples.push_back(m);
        }
        // points of the cone
        auto leads = moduli::normalized_cone_points(G, nullptr);
        for (std::size_t s = 0; s < std::min<std::size_t>(leads.size(), 30); ++s) {
            moduli::Tuple m(static_cast<std::size_t>(e) + 1, std::vector<FieldElement>(static_cast<std::size_t>(n)));
            m[0] = leads[s];
            m.back() = leads[(s + 1) % leads.size()];
            samples.push_back(m);
        }
        for (const auto& c : samples) {
            auto fs = moduli::to_forms(c, n);
            bool zero = true;
            for (const auto& f : fs) zero = zero && f.is_zero();
            if (zero) continue;
            const bool g = forms_coprime(F5, fs);
            EXPECT_EQ(g, moduli::pencil_resultant_coprime(F5, fs));
            (g ? coprime_seen : shared_seen)++;
        }
    }
    EXPECT_GT(coprime_seen, 50);
    EXPECT_GT(shared_seen, 50);
}

TEST(Moduli, LangWeilReport) {
    CountingProblem prob(forms::diagonal(prime_field(5), 3, {1, 1, 1, 1}), 1);
    auto rows = moduli::langweil_report(prob, 2, 4);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].morphisms, 360);
    EXPECT_EQ(rows[0].mu, 3);
    EXPECT_EQ(rows[0].mu_hat, 4);
    EXPECT_EQ(rows[0].ratio_mu, Rational(72, 25));
    auto G25 = moduli::form_over(prob.form(), 2);
    const auto lines = moduli::count_lines(G25);
    EXPECT_EQ(lines, 27u);
    EXPECT_EQ(rows[1].morphisms, Integer(std::to_string(lines)) * moduli::pgl2_order(25));
    EXPECT_EQ(rows[1].coprime_tuples, rows[1].morphisms * 24);
    for (const auto& r : rows) {
        EXPECT_GT(r.ratio_mu, 0);
        EXPECT_GT(r.ratio_mu_hat, 0);
        EXPECT_GE(r.raw_cone, r.coprime_tuples);
    }
    // 27 (1 - q^{-2}) at q = 25
    EXPECT_EQ(rows[1].ratio_mu, Rational(27 * 624, 625));
}

TEST(Moduli, WorkersDoNotChangeCounts) {
    CountingProblem prob(mixed_cubic_surface(prime_field(5)), 1);
    auto a = moduli::cone_counts(prob.form(), 1, true, 1);
    auto b = moduli::cone_counts(prob.form(), 1, true, 6);
    EXPECT_EQ(a.nonzero, b.nonzero);
    EXPECT_EQ(a.coprime_orbits, b.coprime_orbits);
    EXPECT_EQ(a.candidates, b.candidates);
}

TEST(Moduli, BudgetIsEnforced) {
    CountingProblem prob(forms::diagonal(prime_field(5), 3, {1, 1, 1, 1}), 1);
    Budget tight(1000);
    EXPECT_THROW(moduli::count_morphisms(prob, 1, 1, &tight), BudgetExceeded);
}
