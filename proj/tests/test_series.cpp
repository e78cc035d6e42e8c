#include "parkcrit/arrival_law.hpp"
#include "parkcrit/error.hpp"
#include "parkcrit/series.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace parkcrit;

using SQ = Series1<Rational>;
using SD = Series1<double>;

namespace {

SQ sq(std::initializer_list<Rational> c) { return SQ(std::vector<Rational>(c)); }

Rational reduced(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

SQ random_series(std::mt19937& rng, int order, bool square_constant = false) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    SQ s(order);
    for (int k = 0; k <= order; ++k) s[static_cast<std::size_t>(k)] = reduced(num(rng), den(rng));
    if (square_constant) {
        const int a = std::uniform_int_distribution<int>(1, 5)(rng);
        const int b = std::uniform_int_distribution<int>(1, 5)(rng);
        s[0] = reduced(a * a, b * b);
    }
    return s;
}

template <class A, class B>
concept Multipliable = requires(A a, B b) { a * b; };

template <class A, class B>
concept Addable = requires(A a, B b) { a + b; };

void expect_code(ErrorCode code, auto&& fn) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

} // namespace

TEST(Series, DifferenceOfSquares) {
    const SQ a = sq({1, 1, 0});
    const SQ b = sq({1, -1, 0});
    EXPECT_EQ(a * b, sq({1, 0, -1}));
}

TEST(Series, BivariateSquare) {
    Series2<Rational> a(2, 2);
    a.at(0, 0) = 1;
    a.at(1, 1) = 1;
    Series2<Rational> expected(2, 2);
    expected.at(0, 0) = 1;
    expected.at(1, 1) = 2;
    expected.at(2, 2) = 1;
    EXPECT_EQ(a * a, expected);
}

TEST(Series, BivariateProductTruncates) {
    Series2<Rational> a(1, 1);
    a.at(1, 1) = 3;
    EXPECT_EQ(a * a, Series2<Rational>(1, 1));
}

TEST(Series, MixedBackendsDoNotCompile) {
    static_assert(!Multipliable<SQ, SD>);
    static_assert(!Addable<SQ, SD>);
    static_assert(!Multipliable<Series2<Rational>, Series2<double>>);
    static_assert(Multipliable<SQ, SQ>);
    SUCCEED();
}

TEST(Series, OrderMismatch) {
    expect_code(ErrorCode::OrderMismatch, [] { (void)(SQ(2) * SQ(3)); });
    expect_code(ErrorCode::OrderMismatch, [] { (void)(SD(2) + SD(3)); });
    expect_code(ErrorCode::OrderMismatch, [] { (void)(Series2<Rational>(1, 2) * Series2<Rational>(2, 2)); });
}

TEST(Series, DivideByY) {
    EXPECT_EQ(divide_by_y(sq({0, 1, 3})), sq({1, 3}));
    expect_code(ErrorCode::NonzeroConstantTerm, [] { divide_by_y(sq({1, 1})); });
    // Float backend: residue below 1e-12 counts as zero.
    EXPECT_NO_THROW(divide_by_y(SD(std::vector<double>{1e-13, 2.0})));
    expect_code(ErrorCode::NonzeroConstantTerm, [] { divide_by_y(SD(std::vector<double>{1e-11, 2.0})); });
}

TEST(Series, DivideByYBivariate) {
    Series2<Rational> a(1, 2);
    a.at(1, 1) = 5;
    a.at(1, 2) = 7;
    const Series2<Rational> d = divide_by_y(a);
    EXPECT_EQ(d.order_y(), 1);
    EXPECT_EQ(d.at(1, 0), 5);
    EXPECT_EQ(d.at(1, 1), 7);
}

TEST(Series, SquareRoot) {
    EXPECT_EQ(sqrt_series(sq({4})), sq({2}));
    EXPECT_EQ(sqrt_series(sq({1, 2, 1})), sq({1, 1, 0}));
    expect_code(ErrorCode::NonpositiveConstantTerm, [] { sqrt_series(sq({0, 1})); });
    expect_code(ErrorCode::NonpositiveConstantTerm, [] { sqrt_series(sq({-1, 1})); });
    expect_code(ErrorCode::IrrationalSquareRoot, [] { sqrt_series(sq({2, 1})); });
}

TEST(Series, SquareRootOfDiscriminantSquaresBack) {
    const int K = 6;
    const auto mu = ArrivalLaw::binary0k(1.0 / 14.0, 2).g_series(K);
    const SD g(mu);
    const SD y = SD::y(K);
    const SD disc = y * y + (4.0 * 0.875) * ((SD::constant(1.0, K) - y) * g);
    const SD r = sqrt_series(disc);
    const SD back = r * r;
    for (int k = 0; k <= K; ++k) EXPECT_NEAR(back[static_cast<std::size_t>(k)], disc[static_cast<std::size_t>(k)], 1e-12);
    EXPECT_GT(r[0], 0.0);
}

TEST(Series, Reciprocal) {
    EXPECT_EQ(reciprocal(sq({1, -1, 0, 0})), sq({1, 1, 1, 1}));
    EXPECT_EQ(reciprocal(sq({2})), sq({Rational(1, 2)}));
    expect_code(ErrorCode::ZeroConstantTerm, [] { reciprocal(sq({0, 1})); });

    const int K = 8;
    const SD g(ArrivalLaw::geometric(0.125).g_series(K));
    const SD one = g * reciprocal(g);
    for (int k = 0; k <= K; ++k) EXPECT_NEAR(one[static_cast<std::size_t>(k)], k == 0 ? 1.0 : 0.0, 1e-12);
}

TEST(Series, AssociativityExact) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const SQ a = random_series(rng, 12);
        const SQ b = random_series(rng, 12);
        const SQ c = random_series(rng, 12);
        EXPECT_EQ((a * b) * c, a * (b * c));
    }
}

TEST(Series, InversesExact) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const SQ a = random_series(rng, 10, true);
        const SQ r = sqrt_series(a);
        EXPECT_EQ(r * r, a);
        EXPECT_EQ(a * reciprocal(a), SQ::constant(1, 10));
    }
}

TEST(Series, InversesFloat) {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        SD a(10);
        for (int k = 0; k <= 10; ++k) a[static_cast<std::size_t>(k)] = u(rng);
        a[0] = 1.0 + std::abs(u(rng));
        const SD r = sqrt_series(a);
        const SD sq2 = r * r;
        const SD one = a * reciprocal(a);
        for (int k = 0; k <= 10; ++k) {
            EXPECT_NEAR(sq2[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(k)], 1e-12);
            EXPECT_NEAR(one[static_cast<std::size_t>(k)], k == 0 ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(Series, DivideUndoesMultiplyByY) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const SQ a = random_series(rng, 9);
        const SQ ya = a.truncated(10) * SQ::y(10);
        EXPECT_EQ(divide_by_y(ya), a);
    }
}
