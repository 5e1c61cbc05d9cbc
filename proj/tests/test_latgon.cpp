#include <random>

#include <gtest/gtest.h>

#include "fflab/latgon.hpp"

using namespace fflab;

namespace {

using latgon::random_gamma;

LaurentMatrix zero_gamma(std::size_t n) { return LaurentMatrix(n, std::vector<LaurentElement>(n, LaurentElement::exact_zero())); }

// every u with deg u_j < D_j, tested by applying the generator
Integer brute_lattice_count(const FunctionFieldLattice& L, const std::vector<long>& D, long Z) {
    const auto q = L.field().q();
    long digits = 0;
    for (long d : D) digits += d;
    const std::uint64_t total = upow_checked(q, static_cast<unsigned>(digits));
    std::uint64_t hits = 0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t rest = idx;
        std::vector<Polynomial> u;
        for (long d : D) {
            const std::uint64_t per = upow_checked(q, static_cast<unsigned>(d));
            u.push_back(poly::from_index(rest % per, q, static_cast<int>(d)));
            rest /= per;
        }
        bool ok = true;
        for (auto& x : L.apply(u)) {
            auto m = laurent::abs_value(x);
            if (!m.zero && m.exponent >= Z) ok = false;
        }
        hits += ok;
    }
    return Integer(std::to_string(hits));
}

// N(a, Z) by listing u_1..u_n and every u_{j+n} of degree below `extra`
Integer brute_NaZ(const FieldSpec& F, const LaurentMatrix& gamma, long aZ_ceil, long c, long extra) {
    const std::size_t n = gamma.size();
    const auto q = F.q();
    const long D = std::max(0L, aZ_ceil);
    const std::uint64_t per1 = upow_checked(q, static_cast<unsigned>(D)), per2 = upow_checked(q, static_cast<unsigned>(extra));
    const std::uint64_t total = upow_checked(per1, static_cast<unsigned>(n)) * upow_checked(per2, static_cast<unsigned>(n));
    std::uint64_t hits = 0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t rest = idx;
        std::vector<Polynomial> u;
        for (std::size_t j = 0; j < n; ++j) {
            u.push_back(poly::from_index(rest % per1, q, static_cast<int>(D)));
            rest /= per1;
        }
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            auto v = poly::from_index(rest % per2, q, static_cast<int>(extra));
            rest /= per2;
            LaurentElement s = LaurentElement::from_polynomial(v);
            for (std::size_t i = 0; i < n; ++i) s = laurent::add(F, s, laurent::mul(F, gamma[j][i], LaurentElement::from_polynomial(u[i])));
            auto m = laurent::abs_value(s);
            if (!m.zero && m.exponent >= c) ok = false;
        }
        hits += ok;
    }
    return Integer(std::to_string(hits));
}

}  // namespace

TEST(Latgon, CountExamples) {
    auto F = FieldSpec::prime(5);
    auto I2 = FunctionFieldLattice::identity(F, 2);
    EXPECT_EQ(latgon::count_lattice_points(I2, 1), 25);
    EXPECT_EQ(latgon::count_lattice_points(I2, Rational(1, 2)), 25);
    EXPECT_EQ(latgon::count_lattice_points(I2, -7), 1);
    SpecialLatticePair diag(F, zero_gamma(1), 2);
    EXPECT_EQ(latgon::count_lattice_points(diag.M(), 0), 25);
    EXPECT_EQ(latgon::count_NaZ(F, zero_gamma(1), 1, 0), 5);
}

TEST(Latgon, DualityAndDiagonalMinima) {
    auto F = FieldSpec::prime(5);
    SpecialLatticePair diag(F, zero_gamma(1), 2);
    EXPECT_TRUE(diag.duality_holds());
    EXPECT_EQ(latgon::successive_minima(diag.M()).profile.R, (std::vector<long>{-2, 2}));
    EXPECT_EQ(latgon::minima_by_enumeration(diag.M()).R, (std::vector<long>{-2, 2}));
    EXPECT_EQ(latgon::successive_minima(diag.M(), true).profile.R, (std::vector<long>{-1, 3}));

    std::mt19937_64 rng(21);
    for (int it = 0; it < 10; ++it) {
        SpecialLatticePair p(F, random_gamma(rng, F, 2), 1 + it % 3);
        EXPECT_TRUE(p.duality_holds());
    }
    LaurentMatrix asym = random_gamma(rng, F, 2);
    asym[0][1] = laurent::add(F, asym[0][1], LaurentElement::monomial(F.one(), 5));
    EXPECT_THROW(SpecialLatticePair(F, asym, 1), DomainError);
}

TEST(Latgon, LinearCountMatchesBruteForce) {
    auto F = FieldSpec::prime(3 + 2);
    std::mt19937_64 rng(22);
    for (int it = 0; it < 6; ++it) {
        SpecialLatticePair p(F, random_gamma(rng, F, 1, -2, 1), 1);
        auto L = p.M();
        for (long Z = -2; Z <= 1; ++Z) {
            std::vector<long> D;
            for (std::size_t j = 0; j < L.dim(); ++j) D.push_back(std::max(0L, Z + latgon::row_order(L.inverse()[j])));
            EXPECT_EQ(latgon::count_lattice_points(L, Z), brute_lattice_count(L, D, Z)) << Z;
        }
    }
}

TEST(Latgon, ReductionMatchesEnumerationOracle) {
    auto F = FieldSpec::prime(5);
    std::mt19937_64 rng(23);
    for (int it = 0; it < 100; ++it) {
        const int m = 1 + it % 2;
        SpecialLatticePair p(F, random_gamma(rng, F, 2), m);
        auto red = latgon::successive_minima(p.M());
        auto orc = latgon::minima_by_enumeration(p.M());
        ASSERT_EQ(red.profile.R, orc.R) << it;
        EXPECT_TRUE(latgon::minima_symmetric(red.profile));
        for (long Z = -4; Z <= 4; ++Z)
            EXPECT_EQ(latgon::count_lattice_points(p.M(), Z), ipow(5, static_cast<unsigned>(latgon::predicted_count_exponent(red.profile, Z))));
        auto strict = latgon::successive_minima(p.M(), true).profile;
        EXPECT_EQ(strict.R, latgon::minima_by_enumeration(p.M(), true).R);
        EXPECT_EQ(latgon::predicted_count_exponent(strict, 0), latgon::predicted_count_exponent(red.profile, 0));
    }
}

TEST(Latgon, InverseMustMatch) {
    auto F = FieldSpec::prime(5);
    LaurentMatrix gen{{LaurentElement::monomial(F.one(), -1), LaurentElement::exact_zero()}, {LaurentElement::monomial(F.one(), 3), LaurentElement::monomial(F.one(), 1)}};
    LaurentMatrix I{{LaurentElement::monomial(F.one(), 0), LaurentElement::exact_zero()}, {LaurentElement::exact_zero(), LaurentElement::monomial(F.one(), 0)}};
    EXPECT_THROW(FunctionFieldLattice(F, gen, I), DomainError);
}

TEST(Latgon, ReductionReportsPrecision) {
    auto F = FieldSpec::prime(5);
    // gamma known to vanish on exponents >= -1 only: |t gamma| is undetermined
    LaurentMatrix g(1, std::vector<LaurentElement>(1, LaurentElement(-1, {}, false)));
    SpecialLatticePair p(F, g, 1);
    try {
        latgon::successive_minima(p.M());
        FAIL();
    } catch (const PrecisionError& e) {
        EXPECT_NE(std::string(e.what()).find("pivot of column"), std::string::npos);
    }
    // with enough known digits the profile is decided
    LaurentMatrix g2(1, std::vector<LaurentElement>(1, LaurentElement(-6, {FieldElement{1}}, false)));
    EXPECT_EQ(latgon::successive_minima(SpecialLatticePair(F, g2, 1).M()).profile.R, (std::vector<long>{-1, 1}));
}

TEST(Latgon, RatioLemma) {
    auto F = FieldSpec::prime(5);
    std::mt19937_64 rng(24);
    for (int it = 0; it < 100; ++it) {
        SpecialLatticePair p(F, random_gamma(rng, F, 2), 1 + it % 2);
        const long Z2 = -static_cast<long>(rng() % 4), Z1 = Z2 - static_cast<long>(rng() % 4);
        for (bool strict : {false, true}) {
            auto rep = latgon::check_ratio_lemma(p, Z1, Z2, strict);
            EXPECT_TRUE(rep.pass);
            EXPECT_TRUE(rep.formula_matches) << rep.formula_case;
        }
    }
    SpecialLatticePair p(F, zero_gamma(2), 1);
    EXPECT_TRUE(latgon::check_ratio_lemma(p, -1, -1).pass);
    EXPECT_THROW(latgon::check_ratio_lemma(p, 0, -1), DomainError);
    EXPECT_THROW(latgon::check_ratio_lemma(p, -1, 1), DomainError);
}

TEST(Latgon, NaZMatchesBruteForce) {
    auto F = FieldSpec::prime(5);
    std::mt19937_64 rng(25);
    for (int it = 0; it < 8; ++it) {
        auto g = random_gamma(rng, F, 1, -3, 0);
        for (auto [a, Z] : {std::pair<Rational, Rational>{1, 0}, {Rational(3, 2), Rational(-1, 2)}, {2, -1}, {Rational(5, 2), 0}}) {
            const long D = latgon::ceil_rational(a + Z), c = latgon::ceil_rational(Z - a);
            // |u_2| < max(q^c, |gamma u_1|) and |gamma| < q, so deg u_2 < max(c, D) suffices
            const long extra = std::max({c, D, 0L});
            EXPECT_EQ(latgon::count_NaZ(F, g, a, Z), brute_NaZ(F, g, D, c, extra)) << a.get_str() << " " << Z.get_str();
        }
    }
}

TEST(Latgon, SandwichAndIntegerA) {
    auto F = FieldSpec::prime(5);
    std::mt19937_64 rng(26);
    for (int it = 0; it < 100; ++it) {
        auto g = random_gamma(rng, F, 2);
        const Rational a(static_cast<long>(2 + rng() % 6), 2), Z(-static_cast<long>(rng() % 8), 2);
        EXPECT_TRUE(latgon::check_sandwich(F, g, a, Z).pass);
        const long ai = 1 + static_cast<long>(rng() % 2), Zi = -static_cast<long>(rng() % 3);
        EXPECT_EQ(latgon::count_NaZ(F, g, ai, Zi), latgon::count_lattice_points(SpecialLatticePair(F, g, static_cast<int>(ai)).M(), Zi));
    }
}

TEST(Latgon, CapeLemma) {
    auto F = FieldSpec::prime(5);
    std::mt19937_64 rng(27);
    for (int it = 0; it < 100; ++it) {
        auto g = random_gamma(rng, F, 2);
        const Rational a(static_cast<long>(1 + rng() % 8), 2);
        const Rational Z2(-static_cast<long>(rng() % 6), 2), Z1 = Z2 - Rational(static_cast<long>(rng() % 6), 2);
        auto rep = latgon::check_cape(F, g, a, Z1, Z2);
        EXPECT_TRUE(rep.pass) << a.get_str() << " " << Z1.get_str() << " " << Z2.get_str();
    }
    // the instance used for shrinking: a = e+1, Z_1 = -e, Z_2 = 0
    for (long e = 1; e <= 3; ++e) {
        auto g = random_gamma(rng, F, 2);
        auto rep = latgon::check_cape(F, g, e + 1, -e, 0);
        EXPECT_TRUE(rep.pass);
        EXPECT_EQ(rep.K, -e);
    }
    auto g = random_gamma(rng, F, 2);
    EXPECT_EQ(latgon::check_cape(F, g, 2, -1, -1).K, 0);
    EXPECT_THROW(latgon::check_cape(F, g, 2, 0, -1), DomainError);
}
