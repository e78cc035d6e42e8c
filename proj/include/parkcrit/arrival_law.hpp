#pragma once

#include "parkcrit/rational.hpp"

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace parkcrit {

enum class LawKind { FiniteSupport, Binary0k, Poisson, Geometric, CustomAnalytic };

std::string_view to_string(LawKind kind) noexcept;

/// Analytic generating function supplied by its evaluators.
///
/// `derivative[r]` must return G^(r)(t) for 0 <= t <= radius, and a
/// non-finite value where that derivative diverges (typically at t = radius).
/// `taylor(k)` returns mu_k; it feeds series expansions and the sampler.
struct CustomAnalyticSpec {
    std::string name;
    std::array<std::function<double(double)>, 4> derivative;
    double radius = std::numeric_limits<double>::infinity();
    std::function<double(int)> taylor;
};

/// A car-arrival distribution mu on {0, 1, 2, ...} with generating function
/// G(t) = sum_k mu_k t^k.
///
/// Every constructed law satisfies mu_0 > 0 and mu_0 + mu_1 < 1. Finite-support
/// laws (including Binary0k) keep their atoms as exact rationals; the other
/// families evaluate in double precision. Immutable once built.
class ArrivalLaw {
public:
    /// Throws NegativeProbability, ProbabilitiesDoNotSumToOne, ZeroMu0 or
    /// Mu01IsOne, checked in that order.
    static ArrivalLaw finite(std::vector<Rational> probs);
    /// (1 - alpha/k) delta_0 + (alpha/k) delta_k, requires k >= 2 and 0 < alpha < k.
    static ArrivalLaw binary0k(double alpha, int k);
    /// Same law with an exact rational parameter (atoms stay exact).
    static ArrivalLaw binary0k(const Rational& alpha, int k);
    static ArrivalLaw poisson(double alpha);
    /// mu_k = (1 - p) p^k with p = alpha / (1 + alpha), so the mean is alpha.
    static ArrivalLaw geometric(double alpha);
    static ArrivalLaw custom(CustomAnalyticSpec spec);
    /// G(t) = 1 + (1 + t^2)/26 - ((3 - t)/2)^{7/3} / 13 mixed with delta_0:
    /// mix * G + (1 - mix). Radius 3; G''' diverges at the radius.
    static ArrivalLaw nongeneric_example(double mix = 1.0);

    LawKind kind() const noexcept;

    /// G^(order)(t) for order in 0..3. Throws OutOfDomain for t < 0 and
    /// EvaluationBeyondRadius past the radius or where the derivative diverges.
    double G(double t, int order = 0) const;

    /// Exact evaluation; finite-support laws only (NotExact otherwise).
    Rational G_exact(const Rational& t, int order = 0) const;

    double radius() const noexcept;
    double mean() const;
    double mu0() const noexcept { return mu0_; }

    /// mu_0 .. mu_K as doubles (Taylor coefficients of G at 0).
    std::vector<double> g_series(int K) const;
    /// mu_0 .. mu_K as exact rationals; finite-support laws only.
    std::vector<Rational> g_series_exact(int K) const;

    /// Atoms mu_0..mu_m for finite-support laws, nothing otherwise.
    std::optional<std::span<const Rational>> exact_probs() const;

    /// Family parameters; alpha is NaN for FiniteSupport/CustomAnalytic.
    double alpha() const noexcept;
    int k() const noexcept;
    /// mix for the nongeneric example, NaN otherwise.
    double mix() const noexcept { return mix_; }
    const std::string& name() const noexcept { return name_; }

private:
    struct Finite {
        std::vector<Rational> exact;
        std::vector<double> probs;
    };
    struct Binary0k {
        double alpha;
        int k;
        Finite atoms;
    };
    struct Poisson {
        double alpha;
    };
    struct Geometric {
        double alpha;
    };
    using Representation = std::variant<Finite, Binary0k, Poisson, Geometric, CustomAnalyticSpec>;

    explicit ArrivalLaw(Representation rep, std::string name);

    static Finite make_finite(std::vector<Rational> probs);
    const Finite* finite_atoms() const noexcept;

    Representation rep_;
    std::string name_;
    double mu0_ = 0.0;
    double mix_ = std::numeric_limits<double>::quiet_NaN();
};

} // namespace parkcrit
