#include <sstream>

#include <gtest/gtest.h>

#include "fflab/exponent_audit.hpp"
#include "fflab/weyl.hpp"

using namespace fflab;

TEST(ExponentAudit, N0Values) {
    EXPECT_EQ(audit::n0(3), 44);
    EXPECT_EQ(audit::n0(4), 128);
    EXPECT_EQ(audit::n0(5), 336);
    for (int d = 3; d <= 12; ++d) EXPECT_GE(audit::n0(d), (1L << (d - 1)) * (3L * d - 2));
    EXPECT_THROW(audit::n0(2), DomainError);
}

TEST(ExponentAudit, DimensionConventions) {
    // cubic surface: projective dimension 3 in the first convention is n = 4 there
    auto proj = audit::dims_projective(4, 3, 1);
    EXPECT_EQ(proj.mu_bar, 2);
    EXPECT_EQ(proj.mu_expected, 5);
    EXPECT_EQ(proj.mu_expected, proj.mu_bar + 3);
    auto aff = audit::dims(4, 3, 1);
    EXPECT_EQ(aff.mu, 3);
    EXPECT_EQ(aff.mu_hat, 4);
    for (long n = 4; n < 30; ++n)
        for (long e = 1; e < 6; ++e) {
            auto x = audit::dims(n, 3, e);
            EXPECT_EQ(x.mu_hat, x.mu + 1);
            EXPECT_EQ(x.mu_expected, x.mu);
        }
}

TEST(ExponentAudit, GammaExamples) {
    EXPECT_EQ(audit::gamma_budget({3, 44, 1, 2, 5}), 1);
    EXPECT_EQ(audit::gamma_budget({3, 44, 2, 4, 9}), 2);
    EXPECT_EQ(audit::gamma_budget({3, 44, 1, 0, 4}), 1);
    // alpha = 0, beta = (e+1)d lies outside the range, but the min formula gives 0
    EXPECT_EQ(audit::gamma_formula({3, 44, 1, 0, 6}), 0);
    EXPECT_THROW(audit::gamma_budget({3, 44, 1, 0, 5}), DomainError);
    EXPECT_THROW(audit::gamma_budget({3, 44, 1, 4, 8}), DomainError);
}

TEST(ExponentAudit, EtaChoice) {
    EXPECT_EQ(audit::eta_choice(Rational(7, 2), 1), 2);
    EXPECT_EQ(audit::eta_choice(Rational(7, 2), 2), 3);
    EXPECT_EQ(audit::eta_choice(Rational(1, 2), 2), std::nullopt);
    EXPECT_EQ(audit::eta_choice(Rational(0), 1), 0);
}

TEST(ExponentAudit, NuHatExamples) {
    EXPECT_EQ(audit::nu_hat({3, 44, 1, 2, 5}, 0, audit::L_of(44, 3)), -4);
    EXPECT_EQ(audit::nu_hat({3, 48, 1, 4, 8}, 2, audit::L_of(48, 3)), 19);
    EXPECT_EQ(audit::nu_hat({3, 48, 1, 2, 5}, 0, audit::L_of(48, 3)), audit::nu_hat({3, 96, 1, 2, 5}, 0, audit::L_of(96, 3)));
}

TEST(ExponentAudit, GammaMatchesArcFormula) {
    // the budget form of Gamma is the arc form with |r| = q^alpha, |theta| = q^{-beta}
    for (int e = 1; e <= 4; ++e) {
        CountingProblem prob(forms::diagonal(FieldSpec::prime(5), 3, {1, 1}), e);
        for (long a = 0; 2 * a <= 3L * (e + 1); ++a)
            for (long b = 0; b <= 9L * e; ++b) {
                audit::BudgetInput in{3, 45, e, a, b};
                if (!audit::in_range(in)) continue;
                EXPECT_EQ(audit::gamma_budget(in), weyl::gamma(prob, a, -b)) << e << " " << a << " " << b;
            }
    }
}

TEST(ExponentAudit, HandCheckedPairs) {
    // d=3, n=45, e=1, L=45/4.
    // (2, 5): Gamma = 1, eta 0, nu_A = 5-3-4-2 = -4; flat route (ii): 45/4 - 4 = 29/4
    auto x = audit::audit_pair({3, 45, 1, 2, 5});
    EXPECT_EQ(x.Gamma, 1);
    EXPECT_EQ(*x.saving_A, -4);
    EXPECT_EQ(*x.saving_B, Rational(29, 4));
    EXPECT_TRUE(x.positive);
    // (0, 4): M = 2, Gamma = min{3, 3, 5, 2}/2 = 1, eta 0, nu_A = 4-3-2 = -1; deg r = 0 window 3 <= 4 <= 4: 45/4 - 1
    auto y = audit::audit_pair({3, 45, 1, 0, 4});
    EXPECT_EQ(*y.saving_A, -1);
    EXPECT_EQ(*y.saving_B, Rational(41, 4));
    // (3, 6): Gamma = min{3, 2, 2, 3}/2 = 1, eta 0: 6-3-6-2 = -5; alpha = d so (ii) applies: 45/4 - 5
    auto z = audit::audit_pair({3, 45, 1, 3, 6});
    EXPECT_EQ(z.Gamma, 1);
    EXPECT_EQ(*z.saving_A, -5);
    EXPECT_EQ(z.route, "pointwise-deg-r-positive(ii)");
    EXPECT_EQ(z.saving, Rational(25, 4));
}

TEST(ExponentAudit, AuditPassesAboveN0) {
    for (int d = 3; d <= 5; ++d)
        for (int e = 1; e <= 8; ++e) {
            auto rep = audit::audit_minor_arcs(d, audit::n0(d) + 1, e);
            EXPECT_TRUE(rep.pass) << d << " " << e << " fails " << rep.failures.size();
            EXPECT_GT(rep.min_saving, 0);
            const Rational L = audit::L_of(audit::n0(d) + 1, d);
            for (const auto& x : rep.pairs) {
                // the case formula for Gamma only slips on the lower beta edge
                if (!x.gamma_identity) {
                    EXPECT_EQ(2 * (x.in.beta - x.in.alpha), d * (e + 1));
                } else {
                    EXPECT_TRUE(x.eta_identity) << d << " " << e << " " << x.in.alpha << " " << x.in.beta;
                }
                EXPECT_GE(x.Gamma, 0);
                if (x.k_eta) {
                    EXPECT_LE(Rational(*x.k_eta), x.Gamma);
                    EXPECT_EQ((*x.k_eta + e + 1) % 2, 0);  // (e+1)(eta+1)/2 is an integer
                }
                if (x.case_taken == 1 && *x.k >= 2) {
                    EXPECT_GE(*x.saving_A, L - 5 * d + 4);
                }
            }
        }
}

TEST(ExponentAudit, CaseTwoGammaAtLowerBetaEdge) {
    // beta = alpha + d(e+1)/2: beta - alpha - 1 undercuts alpha + (e+1)d - beta by one
    auto x = audit::audit_pair({3, 45, 3, 2, 8});
    EXPECT_EQ(x.case_taken, 2);
    EXPECT_EQ(x.Gamma, Rational(5, 2));
    EXPECT_FALSE(x.gamma_identity);
    EXPECT_TRUE(x.eta_identity);
}

TEST(ExponentAudit, BoundaryAndCsv) {
    auto rep = audit::audit_minor_arcs(3, 44, 1);
    EXPECT_FALSE(rep.pairs.empty());
    std::ostringstream os;
    audit::write_csv(os, rep);
    const auto text = os.str();
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), rep.pairs.size() + 1);
    // far below the threshold some pair has no positive saving
    EXPECT_FALSE(audit::audit_minor_arcs(3, 8, 1).pass);
}
