#include "parkcrit/analytic.hpp"

#include "parkcrit/error.hpp"
#include "parkcrit/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

namespace parkcrit {

namespace {

constexpr int kMaxBisections = 200;
constexpr double kGridStart = 1e-6;
constexpr double kGridRatio = 1.05;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

// Shrinks [lo, hi] around the boundary of `inside` (true at lo, false at hi)
// until hi - lo <= rel_tol * |hi|.
template <class Pred>
std::pair<double, double> bisect(double lo, double hi, double rel_tol, Pred inside) {
    for (int i = 0; i < kMaxBisections; ++i) {
        if (hi - lo <= rel_tol * std::abs(hi)) return {lo, hi};
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return {lo, hi};
        (inside(mid) ? lo : hi) = mid;
    }
    throw Error(ErrorCode::IterationCapExceeded, "bisection did not reach tolerance in 200 steps");
}

double phi_scale(const ArrivalLaw& law, double t) {
    double g = law.G(t, 0);
    double d = g - t * law.G(t, 1);
    return 2.0 * d * d + t * t * g * std::abs(law.G(t, 2));
}

struct Frontier {
    KernelPoint kernel;
    double x_c;
    double F0_at_xc;
};

Frontier frontier(const ArrivalLaw& law, const KernelPoint& kernel) {
    return {kernel, psi(law, kernel.t), F0_from_kernel(law, kernel.t)};
}

double direct_margin(const ArrivalLaw& law, double x, double f0) { return law.mu0() * x * f0 * f0 - 1.0; }

double solve_p_circ_from(const ArrivalLaw& law, const KernelPoint& kernel, double x_c, double f0_c) {
    if (direct_margin(law, x_c, f0_c) < -1e-9)
        throw Error(ErrorCode::NoSolution, "mu_0 x_c F0(x_c)^2 < 1, the law is supercritical");
    auto below = [&](double x) {
        double f0 = F0_from_kernel(law, invert_Y(law, x, kernel));
        return direct_margin(law, x, f0) < 0.0;
    };
    if (below(x_c)) return x_c;
    auto [lo, hi] = bisect(0.0, x_c, 1e-12, below);
    return 0.5 * (lo + hi);
}

} // namespace

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
    case Regime::Undecided: return "undecided";
    }
    return "undecided";
}

double psi(const ArrivalLaw& law, double t) {
    double g = law.G(t, 0);
    double g1 = law.G(t, 1);
    return t * (2.0 * g - t * g1) / (4.0 * g * g);
}

double phi(const ArrivalLaw& law, double t) {
    double g = law.G(t, 0);
    double d = g - t * law.G(t, 1);
    return 2.0 * d * d - t * t * g * law.G(t, 2);
}

KernelPoint find_tc(const ArrivalLaw& law, double t_cap) {
    const double radius = law.radius();
    const double cap = std::min(std::isfinite(radius) ? radius * (1.0 - 1e-12) : t_cap, t_cap);
    auto positive = [&](double t) { return phi(law, t) > 0.0; };

    double prev = kGridStart;
    if (!positive(prev)) throw Error(ErrorCode::BracketFailure, "phi is not positive near 0");
    for (;;) {
        double t = std::min(prev * kGridRatio, cap);
        if (!positive(t)) {
            auto [lo, hi] = bisect(prev, t, 1e-13, positive);
            return {true, 0.5 * (lo + hi)};
        }
        if (t >= cap) break;
        prev = t;
    }

    if (!std::isfinite(radius) || radius > t_cap)
        throw Error(ErrorCode::NoRootWithinBudget, "no sign change of phi below t = " + fmt(cap));

    // phi > 0 up to the radius: either the root sits at y_c or it does not exist.
    try {
        double at_radius = phi(law, radius);
        if (std::abs(at_radius) <= 1e-12 * phi_scale(law, radius)) return {true, radius};
        if (at_radius < 0.0) {
            auto [lo, hi] = bisect(cap, radius, 1e-13, positive);
            return {true, 0.5 * (lo + hi)};
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EvaluationBeyondRadius) throw;
    }
    return {false, radius};
}

double invert_Y(const ArrivalLaw& law, double x) { return invert_Y(law, x, find_tc(law)); }

double invert_Y(const ArrivalLaw& law, double x, const KernelPoint& kernel) {
    const double x_c = psi(law, kernel.t);
    if (!(x >= 0.0)) throw Error(ErrorCode::OutOfDomain, "x = " + fmt(x) + " is negative");
    if (x > x_c * (1.0 + 1e-14)) throw Error(ErrorCode::OutOfDomain, "x = " + fmt(x) + " exceeds x_c = " + fmt(x_c));
    if (x == 0.0) return 0.0;
    // psi is flat at t_c, so x within rounding of x_c cannot be told apart
    // from x_c and bisection would wander up to sqrt(eps) away from t_c.
    if (x >= x_c * (1.0 - 1e-15)) return kernel.t;
    auto [lo, hi] = bisect(0.0, kernel.t, 1e-13, [&](double t) { return psi(law, t) < x; });
    return 0.5 * (lo + hi);
}

double F0_from_kernel(const ArrivalLaw& law, double y) {
    double g = law.G(y, 0);
    double g1 = law.G(y, 1);
    double radicand = g - y * g1;
    if (radicand < 0.0) {
        if (radicand < -1e-14 * g)
            throw Error(ErrorCode::NegativeRadicand, "G(Y) - Y G'(Y) < 0 at Y = " + fmt(y));
        radicand = 0.0;
    }
    return 2.0 * g * std::sqrt(radicand) / ((2.0 * g - y * g1) * std::sqrt(law.mu0()));
}

double F0(const ArrivalLaw& law, double x) { return F0_from_kernel(law, invert_Y(law, x)); }

RegimeReport classify(const ArrivalLaw& law, double tol) {
    const KernelPoint kernel = find_tc(law);
    RegimeReport report;
    report.star_holds = kernel.star;
    report.t_c = kernel.t;

    Frontier front{};
    try {
        front = frontier(law, kernel);
    } catch (const Error& e) {
        if (kernel.star || e.code() != ErrorCode::EvaluationBeyondRadius) throw;
        // G or G' diverges at the radius; only the radius itself is informative.
        report.x_c = report.F0_at_xc = report.lhs = report.rhs = report.direct_margin = std::nan("");
        if (kernel.t < 2.0) {
            report.regime = Regime::Supercritical;
            report.note = "supercritical by radius: subcritical laws have radius >= 2";
        } else {
            report.regime = Regime::Undecided;
            report.note = "G' diverges at the radius of convergence";
        }
        return report;
    }

    const double t = kernel.t;
    report.x_c = front.x_c;
    report.F0_at_xc = front.F0_at_xc;
    report.lhs = (t - 2.0) * law.G(t, 0);
    report.rhs = t * (t - 1.0) * law.G(t, 1);
    report.direct_margin = direct_margin(law, front.x_c, front.F0_at_xc);

    if (kernel.star) {
        const double diff = report.lhs - report.rhs;
        const double scale = std::max({1.0, std::abs(report.lhs), std::abs(report.rhs)});
        if (std::abs(diff) <= tol * scale) report.regime = Regime::Critical;
        else report.regime = diff > 0.0 ? Regime::Subcritical : Regime::Supercritical;
    } else {
        report.note = "kernel-point condition fails; direct test at the radius";
        if (std::abs(report.direct_margin) <= tol) report.regime = Regime::Critical;
        else report.regime = report.direct_margin > 0.0 ? Regime::Subcritical : Regime::Supercritical;
    }

    if (report.regime == Regime::Critical) {
        report.p_circ = front.x_c;
        report.p_bullet = std::sqrt(front.x_c / law.mu0()) - front.x_c;
    } else if (report.regime == Regime::Subcritical) {
        double p = solve_p_circ_from(law, kernel, front.x_c, front.F0_at_xc);
        report.p_circ = p;
        report.p_bullet = p * (F0_from_kernel(law, invert_Y(law, p, kernel)) - 1.0);
    }
    return report;
}

double solve_p_circ(const ArrivalLaw& law) {
    const KernelPoint kernel = find_tc(law);
    const Frontier front = frontier(law, kernel);
    return solve_p_circ_from(law, kernel, front.x_c, front.F0_at_xc);
}

CriticalQuantities critical_quantities(const ArrivalLaw& law, double tol) {
    const RegimeReport report = classify(law, tol);
    if (report.regime != Regime::Critical)
        throw Error(ErrorCode::NotCritical, law.name() + " is " + std::string(to_string(report.regime)));
    double p_circ = report.x_c;
    if (report.star_holds) {
        const double t = report.t_c;
        p_circ = t * t / (4.0 * (t - 1.0) * law.G(t, 0));
    }
    return {p_circ, std::sqrt(p_circ / law.mu0()) - p_circ};
}

std::vector<double> flux_distribution(const ArrivalLaw& law, int K) {
    const RegimeReport report = classify(law);
    if (!report.p_circ)
        throw Error(ErrorCode::NoSolution, law.name() + " is " + std::string(to_string(report.regime)));
    return flux_distribution(law, *report.p_circ, K);
}

std::vector<double> flux_distribution(const ArrivalLaw& law, double p_circ, int K) {
    if (K < 0) throw Error(ErrorCode::InvalidParameter, "K must be >= 0");
    const int order = K + 2;
    const Series1<double> g(law.g_series(order));
    const Series1<double> y = Series1<double>::y(order);
    Series1<double> one_minus_y = Series1<double>::constant(1.0, order) - y;

    // Combinatorial branch of x G f^2 - y f + (y - 1) = 0 at x = p_circ.
    Series1<double> discriminant = y * y + (4.0 * p_circ) * (one_minus_y * g);
    Series1<double> f = (y + sqrt_series(discriminant)) * reciprocal((2.0 * p_circ) * g);

    std::vector<double> p(static_cast<std::size_t>(K) + 1);
    p[0] = p_circ;
    for (int k = 0; k + 1 <= K; ++k) {
        double coeff = f[static_cast<std::size_t>(k)] - (k == 0 ? 1.0 : 0.0);
        p[static_cast<std::size_t>(k) + 1] = p_circ * coeff;
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] < -1e-10)
            throw Error(ErrorCode::NegativeCoefficient, "P(X = " + std::to_string(k) + ") = " + fmt(p[k]));
    }
    return p;
}

MeanIdentities mean_identities(double p_circ, double mean_arrivals) {
    return {2.0 * (1.0 - p_circ) - mean_arrivals, (1.0 - p_circ) - mean_arrivals};
}

MeanIdentities mean_identities(const ArrivalLaw& law) {
    const RegimeReport report = classify(law);
    if (!report.p_circ)
        throw Error(ErrorCode::NoSolution, law.name() + " is " + std::string(to_string(report.regime)));
    return mean_identities(*report.p_circ, law.mean());
}

WhiteOffspring white_offspring(double p_circ, double p_bullet) {
    const double s = p_circ + p_bullet;
    const double s2 = s * s;
    return {p_bullet * p_bullet / s2, 2.0 * p_bullet * p_circ / s2, p_circ * p_circ / s2, 2.0 * p_circ / s};
}

std::vector<double> rde_image(std::span<const double> p, std::span<const double> mu) {
    const std::size_t n = p.size();
    std::vector<double> q(n, 0.0);
    if (n == 0) return q;
    q[0] = p[0] + (n > 1 ? p[1] : 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) q[k] = p[k + 1];

    std::vector<double> qq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n; ++j) qq[i + j] += q[i] * q[j];
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n && j < mu.size(); ++j) out[i + j] += qq[i] * mu[j];
    return out;
}

std::string_view to_string(Family family) noexcept {
    switch (family) {
    case Family::Binary0k: return "binary0k";
    case Family::Poisson: return "poisson";
    case Family::Geometric: return "geometric";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    if (name == "binary0k") return Family::Binary0k;
    if (name == "poisson") return Family::Poisson;
    if (name == "geometric") return Family::Geometric;
    throw Error(ErrorCode::InvalidInput, "unknown family '" + std::string(name) + "'");
}

ArrivalLaw FamilyDescriptor::at(double alpha) const {
    switch (family) {
    case Family::Binary0k: return ArrivalLaw::binary0k(alpha, k);
    case Family::Poisson: return ArrivalLaw::poisson(alpha);
    case Family::Geometric: return ArrivalLaw::geometric(alpha);
    }
    throw Error(ErrorCode::InvalidParameter, "unknown family");
}

double subcritical_margin(const ArrivalLaw& law) {
    const KernelPoint kernel = find_tc(law);
    const double t = kernel.t;
    if (kernel.star) {
        const double lhs = (t - 2.0) * law.G(t, 0);
        const double rhs = t * (t - 1.0) * law.G(t, 1);
        return (lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    }
    const Frontier front = frontier(law, kernel);
    return direct_margin(law, front.x_c, front.F0_at_xc);
}

SweepResult find_alpha_c(const FamilyDescriptor& family, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "sweep tolerance must be positive");
    SweepResult result{};
    auto step = [&](double alpha) {
        double m = subcritical_margin(family.at(alpha));
        result.trace.push_back({alpha, m, m >= 0.0});
        return m >= 0.0;
    };

    double lo = 1e-6;
    double hi = 1.0;
    if (!step(lo) || step(hi))
        throw Error(ErrorCode::BracketFailure, "[1e-6, 1] does not straddle the transition for " +
                                                   std::string(to_string(family.family)));
    for (int i = 0; hi - lo > tol; ++i) {
        if (i >= kMaxBisections) throw Error(ErrorCode::IterationCapExceeded, "alpha_c bisection");
        double mid = 0.5 * (lo + hi);
        (step(mid) ? lo : hi) = mid;
    }
    result.alpha_c = 0.5 * (lo + hi);
    return result;
}

} // namespace parkcrit
