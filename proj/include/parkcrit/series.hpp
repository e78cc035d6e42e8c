#pragma once

#include "parkcrit/error.hpp"
#include "parkcrit/rational.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace parkcrit {

/// Arithmetic backend for truncated series. Exact rationals and doubles are
/// the two supported backends; mixing them in one operation does not compile.
template <class T>
struct CoefficientTraits;

template <>
struct CoefficientTraits<double> {
    /// Absolute threshold below which a float coefficient counts as zero.
    static constexpr double zero_tolerance = 1e-12;
    static bool is_zero(double v) { return std::abs(v) <= zero_tolerance; }
    static bool is_positive(double v) { return v > zero_tolerance; }
    static double sqrt(double v) { return std::sqrt(v); }
};

template <>
struct CoefficientTraits<Rational> {
    static bool is_zero(const Rational& v) { return sgn(v) == 0; }
    static bool is_positive(const Rational& v) { return sgn(v) > 0; }
    static Rational sqrt(const Rational& v) {
        mpz_class num = v.get_num();
        mpz_class den = v.get_den();
        if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
            throw Error(ErrorCode::IrrationalSquareRoot, "constant term " + to_string(v) + " is not a rational square");
        mpz_class rn;
        mpz_class rd;
        mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
        return Rational(rn, rd);
    }
};

template <class T>
concept SeriesCoefficient = requires(T a, T b) {
    { CoefficientTraits<T>::is_zero(a) } -> std::convertible_to<bool>;
    { a + b } -> std::convertible_to<T>;
    { a * b } -> std::convertible_to<T>;
    { a / b } -> std::convertible_to<T>;
};

namespace detail {
inline void require_same_order(int a, int b, const char* op) {
    if (a != b)
        throw Error(ErrorCode::OrderMismatch,
                    std::string(op) + " of series with orders " + std::to_string(a) + " and " + std::to_string(b));
}
} // namespace detail

/// Power series c_0 + c_1 y + ... + c_K y^K, everything beyond y^K dropped.
template <SeriesCoefficient T>
class Series1 {
public:
    explicit Series1(int order = 0) : coeffs_(static_cast<std::size_t>(std::max(order, 0)) + 1, T(0)) {}

    explicit Series1(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.assign(1, T(0));
    }

    /// The series `value` (a constant) at the given order.
    static Series1 constant(const T& value, int order) {
        Series1 s(order);
        s.coeffs_[0] = value;
        return s;
    }

    /// The monomial y (zero when order is 0).
    static Series1 y(int order) {
        Series1 s(order);
        if (order >= 1) s.coeffs_[1] = T(1);
        return s;
    }

    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const T& operator[](std::size_t k) const { return coeffs_[k]; }
    T& operator[](std::size_t k) { return coeffs_[k]; }
    std::span<const T> coefficients() const noexcept { return coeffs_; }

    /// Copy re-truncated (or zero-padded) to a new order.
    Series1 truncated(int order) const {
        Series1 s(order);
        std::size_t n = std::min(coeffs_.size(), s.coeffs_.size());
        std::copy_n(coeffs_.begin(), n, s.coeffs_.begin());
        return s;
    }

    Series1& operator+=(const Series1& other) {
        detail::require_same_order(order(), other.order(), "add");
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
        return *this;
    }

    Series1& operator-=(const Series1& other) {
        detail::require_same_order(order(), other.order(), "sub");
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
        return *this;
    }

    Series1& operator*=(const T& scalar) {
        for (auto& c : coeffs_) c *= scalar;
        return *this;
    }

    friend Series1 operator+(Series1 a, const Series1& b) { return a += b; }
    friend Series1 operator-(Series1 a, const Series1& b) { return a -= b; }
    friend Series1 operator*(Series1 a, const T& s) { return a *= s; }
    friend Series1 operator*(const T& s, Series1 a) { return a *= s; }

    friend Series1 operator*(const Series1& a, const Series1& b) {
        detail::require_same_order(a.order(), b.order(), "mul");
        const std::size_t n = a.coeffs_.size();
        Series1 out(a.order());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.coeffs_[i] == T(0)) continue;
            for (std::size_t j = 0; i + j < n; ++j) out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return out;
    }

    friend bool operator==(const Series1& a, const Series1& b) { return a.coeffs_ == b.coeffs_; }

private:
    std::vector<T> coeffs_;
};

/// Shifts y-coefficients down by one. The constant term must vanish
/// (exactly for rationals, within 1e-12 for doubles).
template <SeriesCoefficient T>
Series1<T> divide_by_y(const Series1<T>& a) {
    if (!CoefficientTraits<T>::is_zero(a[0]))
        throw Error(ErrorCode::NonzeroConstantTerm, "series is not divisible by y");
    const int k = std::max(a.order() - 1, 0);
    Series1<T> out(k);
    for (int i = 1; i <= a.order(); ++i) out[static_cast<std::size_t>(i - 1)] = a[static_cast<std::size_t>(i)];
    return out;
}

/// 1/a by Newton iteration r <- r (2 - a r), doubling the number of correct
/// coefficients per step.
template <SeriesCoefficient T>
Series1<T> reciprocal(const Series1<T>& a) {
    if (CoefficientTraits<T>::is_zero(a[0])) throw Error(ErrorCode::ZeroConstantTerm, "cannot invert series");
    const int order = a.order();
    Series1<T> r = Series1<T>::constant(T(1) / a[0], 0);
    for (int prec = 1; prec <= order;) {
        prec = std::min(2 * prec, order + 1);
        const int o = prec - 1;
        Series1<T> rr = r.truncated(o);
        Series1<T> correction = Series1<T>::constant(T(2), o) - a.truncated(o) * rr;
        r = rr * correction;
    }
    return r;
}

/// Principal square root (b_0 = +sqrt(a_0)) via b <- (b + a/b) / 2.
/// Rational series need a constant term that is a rational square.
template <SeriesCoefficient T>
Series1<T> sqrt_series(const Series1<T>& a) {
    if (!CoefficientTraits<T>::is_positive(a[0]))
        throw Error(ErrorCode::NonpositiveConstantTerm, "square root needs a positive constant term");
    const int order = a.order();
    const T half = T(1) / T(2);
    Series1<T> b = Series1<T>::constant(CoefficientTraits<T>::sqrt(a[0]), 0);
    for (int prec = 1; prec <= order;) {
        prec = std::min(2 * prec, order + 1);
        const int o = prec - 1;
        Series1<T> bb = b.truncated(o);
        b = (bb + a.truncated(o) * reciprocal(bb)) * half;
    }
    return b;
}

/// Bivariate series sum c_{n,p} x^n y^p truncated at (N, P).
template <SeriesCoefficient T>
class Series2 {
public:
    Series2(int max_x = 0, int max_y = 0)
        : nx_(std::max(max_x, 0) + 1), ny_(std::max(max_y, 0) + 1),
          coeffs_(static_cast<std::size_t>(nx_ * ny_), T(0)) {}

    int order_x() const noexcept { return nx_ - 1; }
    int order_y() const noexcept { return ny_ - 1; }

    const T& at(int n, int p) const { return coeffs_[index(n, p)]; }
    T& at(int n, int p) { return coeffs_[index(n, p)]; }

    /// [x^n] as a series in y.
    Series1<T> row(int n) const {
        auto first = coeffs_.begin() + static_cast<std::ptrdiff_t>(index(n, 0));
        return Series1<T>(std::vector<T>(first, first + ny_));
    }

    /// Stores `values` as [x^n]; coefficients beyond order_y() are dropped.
    void set_row(int n, const Series1<T>& values) {
        for (int p = 0; p < ny_; ++p)
            at(n, p) = p <= values.order() ? values[static_cast<std::size_t>(p)] : T(0);
    }

    Series2& operator+=(const Series2& o) {
        require_same_shape(o, "add");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }

    Series2& operator-=(const Series2& o) {
        require_same_shape(o, "sub");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }

    friend Series2 operator+(Series2 a, const Series2& b) { return a += b; }
    friend Series2 operator-(Series2 a, const Series2& b) { return a -= b; }

    friend Series2 operator*(const Series2& a, const Series2& b) {
        a.require_same_shape(b, "mul");
        Series2 out(a.order_x(), a.order_y());
        for (int n1 = 0; n1 < a.nx_; ++n1) {
            for (int p1 = 0; p1 < a.ny_; ++p1) {
                const T& c = a.at(n1, p1);
                if (c == T(0)) continue;
                for (int n2 = 0; n1 + n2 < a.nx_; ++n2)
                    for (int p2 = 0; p1 + p2 < a.ny_; ++p2) out.at(n1 + n2, p1 + p2) += c * b.at(n2, p2);
            }
        }
        return out;
    }

    friend bool operator==(const Series2& a, const Series2& b) {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.coeffs_ == b.coeffs_;
    }

private:
    std::size_t index(int n, int p) const { return static_cast<std::size_t>(n * ny_ + p); }

    void require_same_shape(const Series2& o, const char* op) const {
        detail::require_same_order(order_x(), o.order_x(), op);
        detail::require_same_order(order_y(), o.order_y(), op);
    }

    int nx_;
    int ny_;
    std::vector<T> coeffs_;
};

/// Divides every x-row by y; requires [y^0] to vanish in every row.
template <SeriesCoefficient T>
Series2<T> divide_by_y(const Series2<T>& a) {
    Series2<T> out(a.order_x(), std::max(a.order_y() - 1, 0));
    for (int n = 0; n <= a.order_x(); ++n) out.set_row(n, divide_by_y(a.row(n)));
    return out;
}

} // namespace parkcrit
