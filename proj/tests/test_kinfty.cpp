#include <random>

#include <gtest/gtest.h>

#include "fflab/laurent.hpp"

using namespace fflab;

namespace {

const FieldSpec F5 = FieldSpec::prime(5);

Polynomial poly_of(std::initializer_list<long long> low_to_high) {
    std::vector<FieldElement> v;
    for (auto c : low_to_high) v.push_back(F5.from_int(c));
    return Polynomial(v);
}

LaurentElement random_element(std::mt19937_64& rng, long lo, long hi, bool exact) {
    std::uniform_int_distribution<std::uint32_t> c(0, 4);
    std::map<long, FieldElement> terms;
    for (long k = lo; k <= hi; ++k) terms[k] = {c(rng)};
    return LaurentElement::from_terms(terms, lo, exact);
}

}  // namespace

TEST(Laurent, ExpandRationalExamples) {
    auto x = laurent::expand_rational(F5, poly_of({1}), Polynomial::t(), -3);
    EXPECT_TRUE(x.exact());
    EXPECT_EQ(x, LaurentElement::monomial(F5.one(), -1));

    auto y = laurent::expand_rational(F5, poly_of({1}), poly_of({-1, 1}), -3);
    EXPECT_FALSE(y.exact());
    for (long k : {-1, -2, -3}) EXPECT_EQ(y.coeff(k), F5.one());
    EXPECT_EQ(y.coeff(0), F5.zero());
    EXPECT_THROW(y.coeff(-4), PrecisionError);
    EXPECT_THROW(laurent::expand_rational(F5, poly_of({1}), Polynomial{}, -3), DomainError);
}

TEST(Laurent, ExpandRationalMultiplyBack) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::uint64_t> idx(0, 5 * 5 * 5 * 5 - 1);
    for (int it = 0; it < 300; ++it) {
        auto r = poly::from_index(idx(rng), 5, 4);
        if (r.is_zero()) continue;
        r = poly::monic(F5, r);
        auto a = poly::divmod(F5, poly::from_index(idx(rng), 5, 4), r).second;
        const long floor = -6;
        auto x = laurent::expand_rational(F5, a, r, floor);
        auto back = laurent::mul(F5, x, LaurentElement::from_polynomial(r));
        // exact on exponents >= floor + deg r; the integral part is a and nothing lies in [floor+deg r, -1]
        for (long k = floor + r.degree(); k <= 6; ++k) ASSERT_EQ(back.coeff(k), a.coeff(static_cast<int>(k)));
        // re-expansion at a deeper floor agrees on the overlap
        auto deeper = laurent::expand_rational(F5, a, r, floor - 4);
        for (long k = floor; k <= 2; ++k) ASSERT_EQ(deeper.coeff(k), x.coeff(k));
        // ||a/r|| < 1, and = 0 iff r | a
        auto nrm = laurent::fractional_norm(deeper);
        if (a.is_zero()) {
            EXPECT_TRUE(nrm.zero);
        } else {
            EXPECT_FALSE(nrm.zero);
            EXPECT_LT(nrm.exponent, 0);
            EXPECT_EQ(nrm.exponent, a.degree() - r.degree());
        }
    }
}

TEST(Laurent, AbsValueExamples) {
    EXPECT_EQ(laurent::abs_value(LaurentElement::from_polynomial(poly_of({1, 0, 1}))).value(5), Rational(25));
    EXPECT_EQ(laurent::abs_value(LaurentElement::exact_zero()).value(5), Rational(0));
    std::map<long, FieldElement> terms{{-1, F5.one()}, {-4, F5.one()}};
    EXPECT_EQ(laurent::abs_value(LaurentElement::from_terms(terms, -4, true)).value(5), Rational(1, 5));
    EXPECT_THROW(laurent::abs_value(LaurentElement(-3, {}, false)), PrecisionError);
}

TEST(Laurent, AbsValueMultiplicativeUltrametric) {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 500; ++it) {
        auto x = random_element(rng, -4, 2, true), y = random_element(rng, -3, 3, true);
        auto ax = laurent::abs_value(x), ay = laurent::abs_value(y);
        auto xy = laurent::abs_value(laurent::mul(F5, x, y));
        if (ax.zero || ay.zero) {
            EXPECT_TRUE(xy.zero);
        } else {
            EXPECT_EQ(xy.exponent, ax.exponent + ay.exponent);
        }
        auto s = laurent::abs_value(laurent::add(F5, x, y));
        EXPECT_LE(s, std::max(ax, ay));
        if (!(ax == ay)) {
            EXPECT_EQ(s, std::max(ax, ay));
        }
    }
}

TEST(Laurent, InexactArithmeticTracksFloor) {
    // (t + O(t^-3)) * t^2 is known from t^-1 up
    LaurentElement x(-2, {FieldElement{0}, FieldElement{0}, FieldElement{0}, F5.one()}, false);
    auto y = laurent::mul(F5, x, LaurentElement::monomial(F5.one(), 2));
    EXPECT_EQ(y.floor(), 0);
    EXPECT_EQ(y.coeff(3), F5.one());
    EXPECT_THROW(y.coeff(-1), PrecisionError);
    // product of two inexact values loses the tail of the larger top
    auto z = laurent::mul(F5, x, x);
    EXPECT_EQ(z.floor(), -1);
    EXPECT_EQ(z.coeff(2), F5.one());
}

TEST(Laurent, FractionalNormExamples) {
    std::map<long, FieldElement> terms{{1, F5.one()}, {-1, F5.one()}, {-2, F5.one()}};
    EXPECT_EQ(laurent::fractional_norm(LaurentElement::from_terms(terms, -2, true)).value(5), Rational(1, 5));
    EXPECT_TRUE(laurent::fractional_norm(LaurentElement::monomial(F5.one(), 3)).zero);
    auto x = laurent::expand_rational(F5, poly_of({1}), poly_of({0, 0, 1}), -5);
    EXPECT_EQ(laurent::fractional_norm(x).value(5), Rational(1, 25));
}

TEST(Laurent, FractionalNormIgnoresIntegralShift) {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 300; ++it) {
        auto x = random_element(rng, -5, 3, false);
        auto g = LaurentElement::from_polynomial(poly::from_index(rng() % 3125, 5, 5));
        const long m = static_cast<long>(rng() % 5);
        EXPECT_EQ(laurent::fractional_norm_below(x, m), laurent::fractional_norm_below(laurent::add(F5, x, g), m));
        try {
            auto n1 = laurent::fractional_norm(x);
            EXPECT_EQ(n1, laurent::fractional_norm(laurent::add(F5, x, g)));
            EXPECT_EQ(laurent::fractional_norm_below(x, m), n1.zero || n1.exponent < -m);
        } catch (const PrecisionError&) {
            // all known fractional coefficients vanish
            EXPECT_TRUE(laurent::fractional_norm_below(x, 5));
        }
    }
}

TEST(Laurent, PsiExamplesAndCharacterProperty) {
    EXPECT_EQ(laurent::psi(F5, LaurentElement::exact_zero()), CyclotomicValue(5, 1));
    EXPECT_EQ(laurent::psi(F5, LaurentElement::monomial(F5.one(), -1)), CyclotomicValue::zeta(5, 1));
    EXPECT_EQ(laurent::psi(F5, LaurentElement::monomial(F5.one(), -2)), CyclotomicValue(5, 1));
    std::mt19937_64 rng(41);
    for (int it = 0; it < 200; ++it) {
        auto x = random_element(rng, -3, 2, false), y = random_element(rng, -4, 1, false);
        EXPECT_EQ(laurent::psi(F5, laurent::add(F5, x, y)), laurent::psi(F5, x) * laurent::psi(F5, y));
        auto g = LaurentElement::from_polynomial(poly::from_index(rng() % 625, 5, 4));
        EXPECT_EQ(laurent::psi(F5, g), CyclotomicValue(5, 1));
    }
}

// psi(alpha G) with deg G = D only sees alpha at exponents [-D-1, -1]
TEST(Laurent, PsiDepthInvariant) {
    std::mt19937_64 rng(43);
    for (int it = 0; it < 300; ++it) {
        const int D = static_cast<int>(rng() % 5);
        auto G = poly::from_index(rng() % 3125, 5, D + 1);
        auto alpha = random_element(rng, -D - 4, 2, true);
        auto base = laurent::psi(F5, laurent::mul(F5, alpha, LaurentElement::from_polynomial(G)));
        std::map<long, FieldElement> pert{{-D - 2 - static_cast<long>(rng() % 2), FieldElement{1 + std::uint32_t(rng() % 4)}}};
        auto moved = laurent::add(F5, alpha, LaurentElement::from_terms(pert, -D - 4, true));
        EXPECT_EQ(base, laurent::psi(F5, laurent::mul(F5, moved, LaurentElement::from_polynomial(G))));
    }
}

TEST(Laurent, BallMeasure) {
    EXPECT_EQ(ball_measure(5, {LaurentElement::exact_zero(), 0}), Rational(1));
    EXPECT_EQ(ball_measure(5, {LaurentElement::exact_zero(), 2}), Rational(1, 25));
    Rational parts = 0;
    for (int c = 0; c < 5; ++c) parts += ball_measure(5, {LaurentElement::monomial(F5.from_int(c), -3), 3});
    EXPECT_EQ(parts, ball_measure(5, {LaurentElement::exact_zero(), 2}));
    EXPECT_THROW(ball_measure(5, {LaurentElement::exact_zero(), -1}), DomainError);
}
