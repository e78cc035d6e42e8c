#include "oracles.hpp"

#include "parkcrit/analytic.hpp"
#include "parkcrit/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace parkcrit;

namespace {

const double sqrt2 = std::sqrt(2.0);
const double sqrt3 = std::sqrt(3.0);
const double sqrt6 = std::sqrt(6.0);
const double poisson_alpha_c = 3.0 - 2.0 * sqrt2;

ArrivalLaw binary_crit() { return ArrivalLaw::binary0k(Rational(1, 14), 2); }
ArrivalLaw geometric_crit() { return ArrivalLaw::geometric(0.125); }

void expect_code(ErrorCode code, auto&& fn) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

std::vector<ArrivalLaw> sample_laws() {
    return {ArrivalLaw::binary0k(Rational(1, 20), 2), ArrivalLaw::binary0k(Rational(1, 14), 2),
            ArrivalLaw::binary0k(Rational(1, 20), 3), ArrivalLaw::binary0k(Rational(1, 1000), 5),
            ArrivalLaw::poisson(0.1), ArrivalLaw::poisson(0.2), ArrivalLaw::geometric(0.05), ArrivalLaw::geometric(0.125),
            ArrivalLaw::geometric(0.3), ArrivalLaw::nongeneric_example(1.0), ArrivalLaw::nongeneric_example(0.1),
            ArrivalLaw::finite({Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 8)})};
}

} // namespace

TEST(Psi, ValuesAtKernelPoints) {
    EXPECT_EQ(psi(binary_crit(), 0.0), 0.0);
    EXPECT_NEAR(psi(binary_crit(), 3.0), 7.0 / 8.0, 1e-15);
    EXPECT_NEAR(psi(geometric_crit(), 3.0), 27.0 / 32.0, 1e-15);
    // Closed forms for x_c in the two families.
    const double a = 1.0 / 14.0;
    EXPECT_NEAR(psi(binary_crit(), 3.0), 3.0 * sqrt3 / (16.0 * std::sqrt(a * (2.0 - a))), 1e-14);
    const double g = 0.125;
    EXPECT_NEAR(psi(geometric_crit(), 3.0), (1.0 + g) * (1.0 + g) / (12.0 * g), 1e-14);
}

TEST(Phi, Values) {
    for (const auto& law : sample_laws()) EXPECT_NEAR(phi(law, 0.0), 2.0 * law.mu0() * law.mu0(), 1e-15) << law.name();
    EXPECT_NEAR(phi(binary_crit(), 3.0), 0.0, 1e-13);
    EXPECT_NEAR(phi(ArrivalLaw::poisson(poisson_alpha_c), 2.0 + sqrt2), 0.0, 1e-13);
}

TEST(FindTc, KernelPoints) {
    const KernelPoint b = find_tc(binary_crit());
    EXPECT_TRUE(b.star);
    EXPECT_NEAR(b.t, 3.0, 1e-11);
    const KernelPoint g = find_tc(geometric_crit());
    EXPECT_TRUE(g.star);
    EXPECT_NEAR(g.t, 3.0, 1e-11);
    const KernelPoint ng = find_tc(ArrivalLaw::nongeneric_example());
    EXPECT_TRUE(ng.star);
    EXPECT_NEAR(ng.t, 3.0, 1e-12);
}

TEST(FindTc, FamilyClosedForms) {
    for (double a : {0.01, 0.05, 0.2, 0.7}) {
        EXPECT_NEAR(find_tc(ArrivalLaw::binary0k(a, 2)).t, std::sqrt((2.0 - a) / (3.0 * a)), 1e-10) << a;
        EXPECT_NEAR(find_tc(ArrivalLaw::geometric(a)).t, (1.0 + a) / (3.0 * a), 1e-10) << a;
        EXPECT_NEAR(find_tc(ArrivalLaw::poisson(a)).t, (2.0 - sqrt2) / a, 1e-10) << a;
    }
}

TEST(FindTc, NonStarAtRadius) {
    const KernelPoint k = find_tc(ArrivalLaw::nongeneric_example(0.1));
    EXPECT_FALSE(k.star);
    EXPECT_EQ(k.t, 3.0);
}

TEST(InvertY, Values) {
    EXPECT_EQ(invert_Y(binary_crit(), 0.0), 0.0);
    EXPECT_NEAR(invert_Y(binary_crit(), 0.875), 3.0, 1e-9);
    const ArrivalLaw p = ArrivalLaw::poisson(poisson_alpha_c);
    const KernelPoint k = find_tc(p);
    EXPECT_NEAR(invert_Y(p, psi(p, k.t)), 2.0 + sqrt2, 1e-7);
    expect_code(ErrorCode::OutOfDomain, [&] { invert_Y(binary_crit(), 0.9); });
}

TEST(F0, Values) {
    EXPECT_NEAR(F0(binary_crit(), 0.0), 1.0, 1e-15);
    EXPECT_NEAR(F0(binary_crit(), 0.875), 4.0 * sqrt6 / 9.0, 1e-9);
    EXPECT_NEAR(F0(geometric_crit(), 27.0 / 32.0), 2.0 / sqrt3, 1e-9);
}

TEST(Classify, Examples) {
    const RegimeReport b = classify(binary_crit());
    EXPECT_EQ(b.regime, Regime::Critical);
    ASSERT_TRUE(b.p_circ && b.p_bullet);
    EXPECT_NEAR(*b.p_circ, 0.875, 1e-9);
    EXPECT_NEAR(*b.p_bullet, 7.0 / (3.0 * sqrt6) - 0.875, 1e-9);

    EXPECT_EQ(classify(ArrivalLaw::poisson(0.2)).regime, Regime::Supercritical);
    EXPECT_FALSE(classify(ArrivalLaw::poisson(0.2)).p_circ);
    EXPECT_EQ(classify(ArrivalLaw::geometric(0.05)).regime, Regime::Subcritical);
}

TEST(Classify, NongenericPair) {
    const RegimeReport g = classify(ArrivalLaw::nongeneric_example(1.0));
    EXPECT_EQ(g.regime, Regime::Critical);
    EXPECT_TRUE(g.star_holds);
    EXPECT_NEAR(g.t_c, 3.0, 1e-12);

    const RegimeReport m = classify(ArrivalLaw::nongeneric_example(0.1));
    EXPECT_EQ(m.regime, Regime::Subcritical);
    EXPECT_FALSE(m.star_holds);
    // psi(3) for 0.9 + 0.1 G: G~(3) = 0.9 + 0.1 * 18/13, G~'(3) = 0.1 * 3/13.
    const double G3 = 0.9 + 0.1 * 18.0 / 13.0;
    const double dG3 = 0.1 * 3.0 / 13.0;
    EXPECT_NEAR(m.x_c, 3.0 * (2.0 * G3 - 3.0 * dG3) / (4.0 * G3 * G3), 1e-13);
    EXPECT_GT(m.direct_margin, 0.0);
}

TEST(SolvePCirc, Examples) {
    EXPECT_NEAR(solve_p_circ(geometric_crit()), 27.0 / 32.0, 1e-10);
    EXPECT_NEAR(solve_p_circ(binary_crit()), 0.875, 1e-10);
    const ArrivalLaw law = ArrivalLaw::binary0k(Rational(1, 20), 2);
    const double p = solve_p_circ(law);
    EXPECT_GT(p, 0.875);
    EXPECT_LT(p, 1.0);
    const double f = F0(law, p);
    EXPECT_LE(std::abs(law.mu0() * p * f * f - 1.0), 1e-10);
}

TEST(SolvePCirc, SupercriticalHasNoSolution) {
    expect_code(ErrorCode::NoSolution, [] { solve_p_circ(ArrivalLaw::poisson(0.2)); });
}

TEST(CriticalQuantities, Examples) {
    const auto b = critical_quantities(binary_crit());
    EXPECT_NEAR(b.p_circ, 0.875, 1e-9);
    EXPECT_NEAR(b.p_bullet, 7.0 / (3.0 * std::sqrt(6.0)) - 0.875, 1e-9);
    const auto g = critical_quantities(geometric_crit());
    EXPECT_NEAR(g.p_circ, 27.0 / 32.0, 1e-9);
    EXPECT_NEAR(g.p_bullet, 9.0 * sqrt3 / 16.0 - 27.0 / 32.0, 1e-9);
    const auto p = critical_quantities(ArrivalLaw::poisson(poisson_alpha_c));
    EXPECT_NEAR(p.p_circ, (6.0 + 4.0 * sqrt2) / (4.0 * (1.0 + sqrt2) * std::exp(sqrt2 - 1.0)), 1e-9);
    expect_code(ErrorCode::NotCritical, [] { critical_quantities(ArrivalLaw::geometric(0.05)); });
}

TEST(FluxDistribution, CriticalBinaryHead) {
    const auto p = flux_distribution(binary_crit(), 10);
    EXPECT_NEAR(p[0], 0.875, 1e-9);
    EXPECT_NEAR(p[1], 7.0 / (3.0 * sqrt6) - 0.875, 1e-9);
}

TEST(FluxDistribution, GeometricMass) {
    const auto p = flux_distribution(ArrivalLaw::geometric(0.05), 60);
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    EXPECT_GE(s, 1.0 - 1e-6);
    EXPECT_LE(s, 1.0 + 1e-6);
}

TEST(FluxDistribution, MatchesRecursiveEquationFixedPoint) {
    for (const ArrivalLaw& law : {ArrivalLaw::binary0k(Rational(1, 20), 2), ArrivalLaw::geometric(0.05),
                                  ArrivalLaw::poisson(0.1), ArrivalLaw::binary0k(Rational(7, 100), 2)}) {
        const std::size_t K = 80;
        const auto reference = oracle::rde_fixed_point(law.g_series(static_cast<int>(K)), K);
        const auto p = flux_distribution(law, 40);
        for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], reference[k], 1e-9) << law.name() << " k=" << k;
    }
}

TEST(FluxDistribution, SecondTermIsPBullet) {
    for (const auto& law : sample_laws()) {
        const RegimeReport r = classify(law);
        if (!r.p_circ) continue;
        const auto p = flux_distribution(law, 5);
        EXPECT_NEAR(p[1], *r.p_circ * (F0(law, *r.p_circ) - 1.0), 1e-10) << law.name();
    }
}

TEST(MeanIdentities, Examples) {
    EXPECT_NEAR(mean_identities(binary_crit()).mean_visits, 5.0 / 28.0, 1e-9);
    EXPECT_NEAR(mean_identities(geometric_crit()).mean_visits, 3.0 / 16.0, 1e-9);
    EXPECT_EQ(mean_identities(1.0, 0.0).mean_visits, 0.0);
    EXPECT_EQ(mean_identities(1.0, 0.0).mean_flux, 0.0);
}

TEST(WhiteOffspring, Examples) {
    const auto w = white_offspring(0.875, 7.0 / (3.0 * sqrt6) - 0.875);
    EXPECT_NEAR(w.xi0 + w.xi1 + w.xi2, 1.0, 1e-15);
    EXPECT_NEAR(w.mean, 1.83711, 1e-5);
    EXPECT_GT(w.mean, 1.0);
    const auto s = white_offspring(0.3, 0.3);
    EXPECT_DOUBLE_EQ(s.xi0, 0.25);
    EXPECT_DOUBLE_EQ(s.xi1, 0.5);
    EXPECT_DOUBLE_EQ(s.xi2, 0.25);
    EXPECT_DOUBLE_EQ(s.mean, 1.0);
}

TEST(Sweep, GoldenThresholds) {
    EXPECT_NEAR(find_alpha_c({Family::Binary0k, 2}, 1e-12).alpha_c, 1.0 / 14.0, 1e-9);
    EXPECT_NEAR(find_alpha_c({Family::Poisson, 2}, 1e-12).alpha_c, poisson_alpha_c, 1e-9);
    EXPECT_NEAR(find_alpha_c({Family::Geometric, 2}, 1e-12).alpha_c, 0.125, 1e-9);
    const double b5 = find_alpha_c({Family::Binary0k, 5}, 1e-12).alpha_c;
    EXPECT_NEAR(b5, oracle::binary0k_alpha_c(5), 1e-6 * oracle::binary0k_alpha_c(5));
    EXPECT_NEAR(b5, 0.003815, 5e-7);
}

TEST(Sweep, TraceBracketsTheThreshold) {
    const SweepResult r = find_alpha_c({Family::Geometric, 2}, 1e-6);
    ASSERT_GE(r.trace.size(), 3u);
    for (const SweepStep& s : r.trace) EXPECT_EQ(s.subcritical, s.alpha < r.alpha_c) << s.alpha;
    expect_code(ErrorCode::InvalidParameter, [] { find_alpha_c({Family::Geometric, 2}, 0.0); });
}

TEST(Invariants, PsiIncreasingAndPhiPositiveBelowTc) {
    std::mt19937 rng(3);
    for (const auto& law : sample_laws()) {
        const KernelPoint k = find_tc(law);
        std::uniform_real_distribution<double> u(0.0, k.t);
        for (int i = 0; i < 20; ++i) {
            double a = u(rng);
            double b = u(rng);
            if (a > b) std::swap(a, b);
            if (b - a < 1e-9 * k.t) continue;
            EXPECT_LT(psi(law, a), psi(law, b)) << law.name();
            if (a > 0.0) EXPECT_GT(phi(law, a), 0.0) << law.name() << " t=" << a;
        }
    }
}

TEST(Invariants, InvertYRoundTrip) {
    for (const auto& law : sample_laws()) {
        const KernelPoint k = find_tc(law);
        const double xc = psi(law, k.t);
        for (int i = 1; i <= 20; ++i) {
            const double x = xc * i / 20.0;
            EXPECT_NEAR(psi(law, invert_Y(law, x, k)), x, 1e-11 * x) << law.name();
        }
    }
}

TEST(Invariants, FixedPointAndPBulletIdentity) {
    for (const auto& law : sample_laws()) {
        const RegimeReport r = classify(law);
        if (!r.p_circ) continue;
        const double p = *r.p_circ;
        const double b = *r.p_bullet;
        const double f = F0(law, p);
        EXPECT_LE(std::abs(law.mu0() * p * f * f - 1.0), 1e-10) << law.name();
        EXPECT_LE(std::abs(p - law.mu0() * (p + b) * (p + b)), 1e-10) << law.name();
        EXPECT_GT(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_GT(b, 0.0);
    }
}

TEST(Invariants, RegimeSignatures) {
    for (const auto& law : sample_laws()) {
        const RegimeReport r = classify(law);
        if (r.regime == Regime::Subcritical) {
            EXPECT_GT(r.t_c, 2.0) << law.name();
            EXPECT_GE(law.radius(), 2.0) << law.name();
        }
        if (r.regime == Regime::Critical) EXPECT_GT(*r.p_circ, 0.5) << law.name();
    }
}

TEST(Invariants, RecursiveEquationConvolution) {
    for (const auto& law : sample_laws()) {
        const RegimeReport r = classify(law);
        if (!r.p_circ) continue;
        const int K = 60;
        const auto p = flux_distribution(law, *r.p_circ, K);
        const auto mu = law.g_series(K);
        const auto image = rde_image(p, mu);
        const auto independent = oracle::rde_step(p, mu);
        for (int k = 0; k <= K - 5; ++k) {
            EXPECT_NEAR(image[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)], 1e-6) << law.name();
            EXPECT_NEAR(independent[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)], 1e-6) << law.name();
        }
    }
}

TEST(Invariants, CriticalSignaturesAcrossFamilies) {
    std::vector<ArrivalLaw> critical{binary_crit(), geometric_crit(), ArrivalLaw::poisson(poisson_alpha_c),
                                     ArrivalLaw::nongeneric_example()};
    for (int k : {3, 4}) critical.push_back(ArrivalLaw::binary0k(oracle::binary0k_alpha_c(k), k));
    for (const auto& law : critical) {
        const RegimeReport r = classify(law, 1e-7);
        ASSERT_EQ(r.regime, Regime::Critical) << law.name();
        EXPECT_GT(*r.p_circ, 0.5) << law.name();
        EXPECT_GT(white_offspring(*r.p_circ, *r.p_bullet).mean, 1.0) << law.name();
    }
}
