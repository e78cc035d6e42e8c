#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's analytic or enumeration engines.

#include "parkcrit/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace oracle {

/// Law of A + (X1 - 1)_+ + (X2 - 1)_+ truncated to K + 1 entries.
inline std::vector<double> rde_step(const std::vector<double>& p, const std::vector<double>& mu) {
    const std::size_t n = p.size();
    std::vector<double> over(n, 0.0);
    over[0] = p[0] + (n > 1 ? p[1] : 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) over[k] = p[k + 1];
    std::vector<double> two(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n; ++j) two[i + j] += over[i] * over[j];
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n && j < mu.size(); ++j) out[i + j] += two[i] * mu[j];
    return out;
}

/// Law of X(root) on the tree truncated at `depth`, exact up to index K
/// (mass beyond K is dropped, which only matters for k near K).
inline std::vector<double> truncated_root_law(const std::vector<double>& mu, int depth, std::size_t K) {
    std::vector<double> p(K + 1, 0.0);
    for (std::size_t j = 0; j <= K && j < mu.size(); ++j) p[j] = mu[j];
    for (int d = 0; d < depth; ++d) p = rde_step(p, mu);
    return p;
}

/// Fixed point of the recursive equation on the subcritical side, iterating
/// from the depth-0 law and renormalizing each step so that truncated mass
/// does not accumulate.
inline std::vector<double> rde_fixed_point(const std::vector<double>& mu, std::size_t K, int iterations = 4000) {
    std::vector<double> p(K + 1, 0.0);
    for (std::size_t j = 0; j <= K && j < mu.size(); ++j) p[j] = mu[j];
    for (int it = 0; it < iterations; ++it) {
        p = rde_step(p, mu);
        double s = 0.0;
        for (double v : p) s += v;
        for (double& v : p) v /= s;
    }
    return p;
}

/// The threshold of Binary0/k in closed form.
inline double binary0k_alpha_c(int k) {
    const double kd = k;
    const double root = std::sqrt((kd + 7.0) / (kd - 1.0));
    const double bracket = (kd - 1.0) * (kd + 4.0) + kd * std::sqrt((kd + 7.0) * (kd - 1.0));
    return kd / (1.0 + std::pow(2.0, -kd - 2.0) * std::pow(3.0 + root, kd) * bracket);
}

/// r-th derivative of sum_k mu_k t^k, term by term.
inline parkcrit::Rational poly_derivative(const std::vector<parkcrit::Rational>& mu, const parkcrit::Rational& t, int r) {
    parkcrit::Rational total = 0;
    for (std::size_t k = static_cast<std::size_t>(r); k < mu.size(); ++k) {
        parkcrit::Rational term = mu[k];
        for (int i = 0; i < r; ++i) term *= static_cast<long>(k) - i;
        for (std::size_t e = 0; e < k - static_cast<std::size_t>(r); ++e) term *= t;
        total += term;
    }
    return total;
}

/// Car-by-car parking: each car enters at its arrival vertex and moves
/// towards the root until it finds a free spot, leaving through the root
/// otherwise. `parent[i]` is -1 for the root.
struct CarByCar {
    std::vector<bool> occupied;
    std::uint64_t flux = 0;
};

inline CarByCar park_cars(const std::vector<int>& parent, const std::vector<int>& car_origins) {
    CarByCar out;
    out.occupied.assign(parent.size(), false);
    for (int v : car_origins) {
        while (v >= 0 && out.occupied[static_cast<std::size_t>(v)]) v = parent[static_cast<std::size_t>(v)];
        if (v < 0) ++out.flux;
        else out.occupied[static_cast<std::size_t>(v)] = true;
    }
    return out;
}

} // namespace oracle
