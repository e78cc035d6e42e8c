#include "parkcrit/arrival_law.hpp"

#include "parkcrit/error.hpp"

#include <cmath>
#include <sstream>

namespace parkcrit {

namespace {

// k (k-1) ... (k-r+1)
double falling(int k, int r) {
    double f = 1.0;
    for (int i = 0; i < r; ++i) f *= static_cast<double>(k - i);
    return f;
}

void check_order(int order) {
    if (order < 0 || order > 3)
        throw Error(ErrorCode::InvalidParameter, "derivative order must be in 0..3, got " + std::to_string(order));
}

std::string format_param(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

} // namespace

std::string_view to_string(LawKind kind) noexcept {
    switch (kind) {
    case LawKind::FiniteSupport: return "finite";
    case LawKind::Binary0k: return "binary0k";
    case LawKind::Poisson: return "poisson";
    case LawKind::Geometric: return "geometric";
    case LawKind::CustomAnalytic: return "custom";
    }
    return "unknown";
}

ArrivalLaw::ArrivalLaw(Representation rep, std::string name) : rep_(std::move(rep)), name_(std::move(name)) {}

ArrivalLaw::Finite ArrivalLaw::make_finite(std::vector<Rational> probs) {
    while (probs.size() > 1 && probs.back() == 0) probs.pop_back();
    if (probs.empty()) throw Error(ErrorCode::ProbabilitiesDoNotSumToOne, "empty probability vector");

    Rational total = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (sgn(probs[k]) < 0)
            throw Error(ErrorCode::NegativeProbability, "mu_" + std::to_string(k) + " = " + to_string(probs[k]));
        total += probs[k];
    }
    if (total != 1)
        throw Error(ErrorCode::ProbabilitiesDoNotSumToOne, "probabilities sum to " + to_string(total));
    if (probs[0] == 0) throw Error(ErrorCode::ZeroMu0, "mu_0 must be positive");
    Rational low = probs[0] + (probs.size() > 1 ? probs[1] : Rational(0));
    if (low == 1) throw Error(ErrorCode::Mu01IsOne, "mu({0,1}) = 1, every car parks where it arrives");

    Finite f;
    f.probs.reserve(probs.size());
    for (const auto& p : probs) f.probs.push_back(p.get_d());
    f.exact = std::move(probs);
    return f;
}

ArrivalLaw ArrivalLaw::finite(std::vector<Rational> probs) {
    Finite f = make_finite(std::move(probs));
    std::string name = "finite(";
    for (std::size_t k = 0; k < f.exact.size(); ++k) name += (k ? "," : "") + to_string(f.exact[k]);
    name += ")";
    ArrivalLaw law(std::move(f), std::move(name));
    law.mu0_ = std::get<Finite>(law.rep_).probs[0];
    return law;
}

ArrivalLaw ArrivalLaw::binary0k(const Rational& alpha, int k) {
    if (k < 2) throw Error(ErrorCode::InvalidParameter, "binary0k needs k >= 2");
    if (sgn(alpha) <= 0) throw Error(ErrorCode::InvalidParameter, "binary0k needs alpha > 0");
    Rational atom = alpha / k;
    if (atom > 1) throw Error(ErrorCode::InvalidParameter, "binary0k needs alpha/k <= 1");

    std::vector<Rational> probs(static_cast<std::size_t>(k) + 1, Rational(0));
    probs[0] = 1 - atom;
    probs[static_cast<std::size_t>(k)] = atom;
    Finite f = make_finite(std::move(probs));
    double a = alpha.get_d();
    ArrivalLaw law(Binary0k{a, k, std::move(f)},
                   "binary0k(alpha=" + format_param(a) + ",k=" + std::to_string(k) + ")");
    law.mu0_ = std::get<Binary0k>(law.rep_).atoms.probs[0];
    return law;
}

ArrivalLaw ArrivalLaw::binary0k(double alpha, int k) {
    if (!std::isfinite(alpha)) throw Error(ErrorCode::InvalidParameter, "alpha must be finite");
    return binary0k(Rational(alpha), k);
}

ArrivalLaw ArrivalLaw::poisson(double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidParameter, "poisson needs alpha > 0");
    ArrivalLaw law(Poisson{alpha}, "poisson(alpha=" + format_param(alpha) + ")");
    law.mu0_ = std::exp(-alpha);
    return law;
}

ArrivalLaw ArrivalLaw::geometric(double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha))
        throw Error(ErrorCode::InvalidParameter, "geometric needs alpha > 0");
    ArrivalLaw law(Geometric{alpha}, "geometric(alpha=" + format_param(alpha) + ")");
    law.mu0_ = 1.0 / (1.0 + alpha);
    return law;
}

ArrivalLaw ArrivalLaw::custom(CustomAnalyticSpec spec) {
    for (const auto& d : spec.derivative) {
        if (!d) throw Error(ErrorCode::InvalidParameter, "custom law needs evaluators for G, G', G'', G'''");
    }
    if (!spec.taylor) throw Error(ErrorCode::InvalidParameter, "custom law needs Taylor coefficients");
    if (!(spec.radius >= 1.0)) throw Error(ErrorCode::InvalidParameter, "radius of a probability GF is at least 1");

    double g1 = spec.derivative[0](1.0);
    if (!(std::abs(g1 - 1.0) <= 1e-12))
        throw Error(ErrorCode::ProbabilitiesDoNotSumToOne, "G(1) = " + format_param(g1));
    double m0 = spec.taylor(0);
    double m1 = spec.taylor(1);
    if (m0 < 0 || m1 < 0) throw Error(ErrorCode::NegativeProbability, "negative Taylor coefficient");
    if (!(m0 > 0)) throw Error(ErrorCode::ZeroMu0, "mu_0 must be positive");
    if (!(m0 + m1 < 1.0)) throw Error(ErrorCode::Mu01IsOne, "mu({0,1}) = 1");

    std::string name = spec.name.empty() ? std::string("custom") : spec.name;
    ArrivalLaw law(std::move(spec), std::move(name));
    law.mu0_ = m0;
    return law;
}

ArrivalLaw ArrivalLaw::nongeneric_example(double mix) {
    if (!(mix > 0.0 && mix <= 1.0)) throw Error(ErrorCode::InvalidParameter, "mix must lie in (0, 1]");

    // u = (3 - t)/2 vanishes at the radius t = 3.
    auto u = [](double t) { return (3.0 - t) / 2.0; };
    CustomAnalyticSpec spec;
    spec.name = "nongeneric_example(mix=" + format_param(mix) + ")";
    spec.radius = 3.0;
    spec.derivative[0] = [=](double t) {
        return (1.0 - mix) + mix * (1.0 + (1.0 + t * t) / 26.0 - std::pow(u(t), 7.0 / 3.0) / 13.0);
    };
    spec.derivative[1] = [=](double t) { return mix * (t / 13.0 + 7.0 / 78.0 * std::pow(u(t), 4.0 / 3.0)); };
    spec.derivative[2] = [=](double t) { return mix * (1.0 / 13.0 - 7.0 / 117.0 * std::cbrt(u(t))); };
    spec.derivative[3] = [=](double t) {
        double w = u(t);
        if (w <= 0.0) return std::numeric_limits<double>::infinity();
        return mix * 7.0 / 702.0 / std::pow(w, 2.0 / 3.0);
    };
    // (1 - z)^{7/3} = sum_k c_k z^k with c_k = c_{k-1} (k - 1 - 7/3) / k, z = t/3.
    spec.taylor = [=](int k) {
        if (k < 0) return 0.0;
        double c = 1.0;
        for (int j = 1; j <= k; ++j) c *= (static_cast<double>(j) - 1.0 - 7.0 / 3.0) / j;
        double coeff = -std::pow(1.5, 7.0 / 3.0) / 13.0 * c / std::pow(3.0, k);
        if (k == 0) coeff += 1.0 + 1.0 / 26.0;
        if (k == 2) coeff += 1.0 / 26.0;
        return mix * coeff + (k == 0 ? 1.0 - mix : 0.0);
    };
    ArrivalLaw law = custom(std::move(spec));
    law.mix_ = mix;
    return law;
}

LawKind ArrivalLaw::kind() const noexcept {
    switch (rep_.index()) {
    case 0: return LawKind::FiniteSupport;
    case 1: return LawKind::Binary0k;
    case 2: return LawKind::Poisson;
    case 3: return LawKind::Geometric;
    default: return LawKind::CustomAnalytic;
    }
}

const ArrivalLaw::Finite* ArrivalLaw::finite_atoms() const noexcept {
    if (auto* f = std::get_if<Finite>(&rep_)) return f;
    if (auto* b = std::get_if<Binary0k>(&rep_)) return &b->atoms;
    return nullptr;
}

double ArrivalLaw::radius() const noexcept {
    if (auto* g = std::get_if<Geometric>(&rep_)) return (1.0 + g->alpha) / g->alpha;
    if (auto* c = std::get_if<CustomAnalyticSpec>(&rep_)) return c->radius;
    return std::numeric_limits<double>::infinity();
}

double ArrivalLaw::G(double t, int order) const {
    check_order(order);
    if (!(t >= 0.0)) throw Error(ErrorCode::OutOfDomain, "G evaluated at t = " + format_param(t));
    const double r = radius();
    if (t > r) throw Error(ErrorCode::EvaluationBeyondRadius, "t = " + format_param(t) + " > radius " + format_param(r));

    if (const Finite* f = finite_atoms()) {
        double acc = 0.0;
        for (int k = static_cast<int>(f->probs.size()) - 1; k >= order; --k) {
            acc = acc * t + f->probs[static_cast<std::size_t>(k)] * falling(k, order);
        }
        return acc;
    }
    if (auto* p = std::get_if<Poisson>(&rep_)) {
        return std::pow(p->alpha, order) * std::exp(p->alpha * (t - 1.0));
    }
    if (auto* g = std::get_if<Geometric>(&rep_)) {
        double denom = 1.0 + g->alpha - g->alpha * t;
        if (!(denom > 0.0))
            throw Error(ErrorCode::EvaluationBeyondRadius, "geometric G diverges at t = " + format_param(t));
        return falling(order, order) * std::pow(g->alpha, order) / std::pow(denom, order + 1);
    }
    const auto& c = std::get<CustomAnalyticSpec>(rep_);
    double v = c.derivative[static_cast<std::size_t>(order)](t);
    if (!std::isfinite(v))
        throw Error(ErrorCode::EvaluationBeyondRadius,
                    "G^(" + std::to_string(order) + ") is not finite at t = " + format_param(t));
    return v;
}

Rational ArrivalLaw::G_exact(const Rational& t, int order) const {
    check_order(order);
    const Finite* f = finite_atoms();
    if (!f) throw Error(ErrorCode::NotExact, name_ + " has no exact representation");
    Rational acc = 0;
    for (int k = static_cast<int>(f->exact.size()) - 1; k >= order; --k) {
        long ff = 1;
        for (int i = 0; i < order; ++i) ff *= (k - i);
        acc = acc * t + f->exact[static_cast<std::size_t>(k)] * ff;
    }
    return acc;
}

double ArrivalLaw::mean() const {
    if (const Finite* f = finite_atoms()) {
        double m = 0.0;
        for (std::size_t k = 1; k < f->probs.size(); ++k) m += static_cast<double>(k) * f->probs[k];
        return m;
    }
    if (auto* p = std::get_if<Poisson>(&rep_)) return p->alpha;
    if (auto* g = std::get_if<Geometric>(&rep_)) return g->alpha;
    return G(1.0, 1);
}

std::vector<double> ArrivalLaw::g_series(int K) const {
    if (K < 0) throw Error(ErrorCode::InvalidParameter, "series order must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(K) + 1, 0.0);
    if (const Finite* f = finite_atoms()) {
        for (std::size_t k = 0; k < out.size() && k < f->probs.size(); ++k) out[k] = f->probs[k];
    } else if (auto* p = std::get_if<Poisson>(&rep_)) {
        double term = std::exp(-p->alpha);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = term;
            term *= p->alpha / static_cast<double>(k + 1);
        }
    } else if (auto* g = std::get_if<Geometric>(&rep_)) {
        double ratio = g->alpha / (1.0 + g->alpha);
        double term = 1.0 - ratio;
        for (auto& v : out) {
            v = term;
            term *= ratio;
        }
    } else {
        const auto& c = std::get<CustomAnalyticSpec>(rep_);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = c.taylor(static_cast<int>(k));
    }
    return out;
}

std::vector<Rational> ArrivalLaw::g_series_exact(int K) const {
    if (K < 0) throw Error(ErrorCode::InvalidParameter, "series order must be >= 0");
    const Finite* f = finite_atoms();
    if (!f) throw Error(ErrorCode::NotExact, name_ + " has no exact representation");
    std::vector<Rational> out(static_cast<std::size_t>(K) + 1, Rational(0));
    for (std::size_t k = 0; k < out.size() && k < f->exact.size(); ++k) out[k] = f->exact[k];
    return out;
}

std::optional<std::span<const Rational>> ArrivalLaw::exact_probs() const {
    if (const Finite* f = finite_atoms()) return std::span<const Rational>(f->exact);
    return std::nullopt;
}

double ArrivalLaw::alpha() const noexcept {
    if (auto* b = std::get_if<Binary0k>(&rep_)) return b->alpha;
    if (auto* p = std::get_if<Poisson>(&rep_)) return p->alpha;
    if (auto* g = std::get_if<Geometric>(&rep_)) return g->alpha;
    return std::numeric_limits<double>::quiet_NaN();
}

int ArrivalLaw::k() const noexcept {
    if (auto* b = std::get_if<Binary0k>(&rep_)) return b->k;
    return 0;
}

} // namespace parkcrit
