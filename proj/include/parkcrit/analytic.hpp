#pragma once

#include "parkcrit/arrival_law.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parkcrit {

enum class Regime { Subcritical, Critical, Supercritical, Undecided };

std::string_view to_string(Regime regime) noexcept;

/// Location of the kernel point. When `star` is false no root of phi exists
/// below the radius and `t` is the radius y_c itself.
struct KernelPoint {
    bool star = true;
    double t = 0.0;
};

struct RegimeReport {
    Regime regime = Regime::Undecided;
    bool star_holds = false;
    double t_c = 0.0;
    double x_c = 0.0;
    double F0_at_xc = 0.0;
    /// (t_c - 2) G(t_c) and t_c (t_c - 1) G'(t_c).
    double lhs = 0.0;
    double rhs = 0.0;
    /// mu_0 x_c F0(x_c)^2 - 1; nonnegative exactly on the subcritical side.
    double direct_margin = 0.0;
    std::optional<double> p_circ;
    std::optional<double> p_bullet;
    std::string note;
};

/// psi(t) = t (2G(t) - t G'(t)) / (4 G(t)^2); x = psi(Y(x)).
double psi(const ArrivalLaw& law, double t);

/// 2 (G - t G')^2 - t^2 G G'', the numerator of psi'(t) up to 4G^3.
double phi(const ArrivalLaw& law, double t);

/// First positive root of phi. Scans a geometric grid t = 1e-6 * 1.05^j up to
/// min(radius (1 - 1e-12), t_cap) and bisects the first sign change. A root
/// sitting exactly at a finite radius is accepted; if phi stays positive up to
/// the radius the result is {star = false, t = radius}.
KernelPoint find_tc(const ArrivalLaw& law, double t_cap = 1e6);

/// The unique t in [0, t_c] with psi(t) = x, for 0 <= x <= x_c.
double invert_Y(const ArrivalLaw& law, double x);
double invert_Y(const ArrivalLaw& law, double x, const KernelPoint& kernel);

/// F0 = 1 + F(x, 0) written in terms of y = Y(x).
double F0_from_kernel(const ArrivalLaw& law, double y);

/// F0(x) = 1 + F(x, 0) for 0 <= x <= x_c.
double F0(const ArrivalLaw& law, double x);

/// Decides the regime. Under the kernel-point condition the sign of lhs - rhs
/// decides, with |lhs - rhs| <= tol * max(1, |lhs|, |rhs|) reported as
/// critical. Without it the direct test mu_0 x_c F0(x_c)^2 >= 1 is used
/// (band tol). p_circ and p_bullet are filled on the subcritical side.
RegimeReport classify(const ArrivalLaw& law, double tol = 1e-9);

/// The unique x in (0, x_c] with mu_0 x F0(x)^2 = 1.
double solve_p_circ(const ArrivalLaw& law);

struct CriticalQuantities {
    double p_circ;
    double p_bullet;
};

/// p_circ = t_c^2 / (4 (t_c - 1) G(t_c)), p_bullet = sqrt(p_circ / mu_0) - p_circ.
CriticalQuantities critical_quantities(const ArrivalLaw& law, double tol = 1e-9);

/// P(X = k) for k = 0..K, X the number of cars visiting the root.
std::vector<double> flux_distribution(const ArrivalLaw& law, int K);
std::vector<double> flux_distribution(const ArrivalLaw& law, double p_circ, int K);

struct MeanIdentities {
    double mean_visits; // E[X]
    double mean_flux;   // E[(X - 1)_+]
};

MeanIdentities mean_identities(const ArrivalLaw& law);
MeanIdentities mean_identities(double p_circ, double mean_arrivals);

/// Offspring law of the void clusters: binomial(2, p_circ / (p_circ + p_bullet)).
struct WhiteOffspring {
    double xi0;
    double xi1;
    double xi2;
    double mean;
};

WhiteOffspring white_offspring(double p_circ, double p_bullet);

/// Law of (X1 - 1)_+ + (X2 - 1)_+ + A for X1, X2 ~ p and A ~ mu, truncated to
/// the length of p. A fixed point of this map is the law of X.
std::vector<double> rde_image(std::span<const double> p, std::span<const double> mu);

enum class Family { Binary0k, Poisson, Geometric };

std::string_view to_string(Family family) noexcept;
Family parse_family(std::string_view name);

struct FamilyDescriptor {
    Family family = Family::Poisson;
    int k = 2; // Binary0k only

    ArrivalLaw at(double alpha) const;
};

/// Positive or zero exactly when the law is on the subcritical side.
double subcritical_margin(const ArrivalLaw& law);

struct SweepStep {
    double alpha;
    double margin;
    bool subcritical;
};

struct SweepResult {
    double alpha_c;
    std::vector<SweepStep> trace;
};

/// Bisection on alpha over [1e-6, 1] until the bracket is narrower than tol.
SweepResult find_alpha_c(const FamilyDescriptor& family, double tol);

} // namespace parkcrit
