#include "parkcrit/analytic.hpp"
#include "parkcrit/enumeration.hpp"
#include "parkcrit/error.hpp"
#include "parkcrit/law_io.hpp"
#include "parkcrit/report.hpp"
#include "parkcrit/simulator.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

using namespace parkcrit;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_failure = 3;

enum class Format { Json, Csv };

struct Options {
    std::string format;
    std::string out;
};

struct Output {
    json report;
    std::string csv;
    int status = exit_ok;
};

std::string csv_text(const CsvTable& t) {
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string law;
    double tol = 1e-9;
};

json analyze_outputs(const ArrivalLaw& law, double tol) {
    const RegimeReport r = classify(law, tol);
    json out = regime_json(r);
    out["radius"] = real_json(law.radius());
    out["law_mean"] = real_json(law.mean());
    if (r.p_circ && r.p_bullet) {
        const MeanIdentities m = mean_identities(*r.p_circ, law.mean());
        out["mean_visits"] = real_json(m.mean_visits);
        out["mean_flux"] = real_json(m.mean_flux);
        out["white_offspring_mean"] = real_json(white_offspring(*r.p_circ, *r.p_bullet).mean);
    }
    return out;
}

Output run_analyze(const AnalyzeArgs& a) {
    const ArrivalLaw law = load_law(a.law);
    Output o;
    json outputs = analyze_outputs(law, a.tol);
    o.report = make_report("analyze", law_to_json(law), outputs);
    CsvTable t{{"key", "value"}, {}};
    for (const auto& [k, v] : outputs.items())
        t.rows.push_back({k, v.is_string() ? v.get<std::string>() : v.dump()});
    o.csv = csv_text(t);
    return o;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string family;
    int k = 2;
    double tol = 1e-12;
};

Output run_sweep(const SweepArgs& a) {
    const FamilyDescriptor fam{parse_family(a.family), a.k};
    const SweepResult r = find_alpha_c(fam, a.tol);
    CsvTable t{{"step", "alpha", "margin", "subcritical"}, {}};
    json trace = json::array();
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const SweepStep& s = r.trace[i];
        trace.push_back({{"alpha", real_json(s.alpha)}, {"margin", real_json(s.margin)}, {"subcritical", s.subcritical}});
        t.rows.push_back({std::to_string(i), format_real(s.alpha), format_real(s.margin), s.subcritical ? "1" : "0"});
    }
    json family{{"name", std::string(to_string(fam.family))}};
    if (fam.family == Family::Binary0k) family["k"] = fam.k;
    Output o;
    o.report = make_report("sweep", json{{"family", family}},
                           json{{"alpha_c", real_json(r.alpha_c)}, {"tol", real_json(a.tol)}, {"trace", trace}});
    o.csv = csv_text(t);
    return o;
}

// ---------------------------------------------------------------- enumerate

struct EnumerateArgs {
    std::string law;
    int n = 6;
    int p = 3;
    bool oracle = false;
};

json table_json(const FptTable& table) {
    json rows = json::array();
    for (int n = 0; n <= table.max_vertices; ++n) {
        json row = json::array();
        for (int p = 0; p <= table.max_flux; ++p) row.push_back(to_string(table.at(n, p)));
        rows.push_back(row);
    }
    return json{{"n", table.max_vertices}, {"p", table.max_flux}, {"source", std::string(to_string(table.source))},
                {"coefficients", rows}};
}

Output run_enumerate(const EnumerateArgs& a) {
    const ArrivalLaw law = load_law(a.law);
    const FptTable table = tutte_series(law, a.n, a.p);
    Output o;
    json outputs{{"table", table_json(table)}};
    std::ostringstream csv;
    write_table_csv(csv, table);
    if (a.oracle) {
        const FptTable brute = brute_force_F(law, a.n, a.p);
        const auto diff = table_mismatches(table, brute);
        json list = json::array();
        for (auto [n, p] : diff)
            list.push_back({{"n", n}, {"p", p}, {"tutte", to_string(table.at(n, p))}, {"brute_force", to_string(brute.at(n, p))}});
        outputs["oracle"] = {{"equal", diff.empty()}, {"mismatches", list}};
        write_table_csv(csv, brute);
        if (!diff.empty()) {
            o.status = exit_failure;
            std::cerr << "oracle mismatch at " << diff.size() << " coefficient(s), first (n, p) = (" << diff[0].first
                      << ", " << diff[0].second << ")\n";
        }
    }
    o.report = make_report("enumerate", law_to_json(law), outputs);
    o.csv = csv.str();
    return o;
}

// ---------------------------------------------------------------- flux

struct FluxArgs {
    std::string law;
    int kmax = 60;
};

Output run_flux(const FluxArgs& a) {
    const ArrivalLaw law = load_law(a.law);
    const RegimeReport r = classify(law);
    if (!r.p_circ) throw Error(ErrorCode::NoSolution, law.name() + " is " + std::string(to_string(r.regime)));
    const std::vector<double> p = flux_distribution(law, *r.p_circ, a.kmax);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    const MeanIdentities m = mean_identities(*r.p_circ, law.mean());

    CsvTable t{{"k", "p_k"}, {}};
    json probs = json::array();
    for (std::size_t k = 0; k < p.size(); ++k) {
        probs.push_back(real_json(p[k]));
        t.rows.push_back({std::to_string(k), format_real(p[k])});
    }
    t.rows.push_back({"tail", format_real(1.0 - total)});
    t.rows.push_back({"mean_visits", format_real(m.mean_visits)});
    Output o;
    o.report = make_report("flux", law_to_json(law),
                           json{{"regime", std::string(to_string(r.regime))},
                                {"p", probs},
                                {"tail_mass", real_json(1.0 - total)},
                                {"mean_visits", real_json(m.mean_visits)}});
    o.csv = csv_text(t);
    return o;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string law;
    SimulationConfig config;
    bool clusters = false;
};

Output run_simulate(const SimulateArgs& a) {
    const ArrivalLaw law = load_law(a.law);
    const SimulationStats s = a.clusters ? root_cluster_stats(law, a.config) : estimate_p_circ(law, a.config);
    Output o;
    o.report = make_report("simulate", law_to_json(law), simulation_json(s));
    o.csv = csv_text(visit_histogram_csv(s));
    if (a.clusters) o.csv += "\n" + csv_text(cluster_histogram_csv(s));
    return o;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string law;
    std::string table;
    int mc_depth = 14;
    std::uint64_t mc_samples = 4000;
    std::uint64_t seed = 1;
};

struct Check {
    std::string name;
    bool passed;
    double value;
    double tolerance;
    std::string detail;
};

std::vector<Check> verify_checks(const ArrivalLaw& law, const VerifyArgs& a) {
    std::vector<Check> checks;
    const RegimeReport r = classify(law);
    checks.push_back({"classification", r.regime != Regime::Undecided, 0.0, 0.0, std::string(to_string(r.regime))});

    if (r.p_circ) {
        const double pc = *r.p_circ;
        const double f0 = F0(law, pc);
        const double fixed = law.mu0() * pc * f0 * f0 - 1.0;
        checks.push_back({"fixed_point_residual", std::abs(fixed) <= 1e-10, fixed, 1e-10, "mu0 p F0(p)^2 - 1"});

        if (r.regime == Regime::Critical && r.star_holds) {
            const CriticalQuantities q = critical_quantities(law);
            const double d = q.p_circ - pc;
            checks.push_back({"critical_p_circ", std::abs(d) <= 1e-9, d, 1e-9, "closed form minus x_c"});
        }

        const int K = 60;
        const std::vector<double> p = flux_distribution(law, pc, K);
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        checks.push_back({"mass_at_most_one", total <= 1.0 + 1e-12, total, 1.0, "sum of P(X = k), k <= 60"});

        const std::vector<double> mu = law.g_series(K);
        const std::vector<double> image = rde_image(p, mu);
        double worst = 0.0;
        for (int k = 0; k < K; ++k) worst = std::max(worst, std::abs(image[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(k)]));
        checks.push_back({"rde_self_consistency", worst <= 1e-6, worst, 1e-6, "max_k |image - p|, k < 60"});

        if (r.regime == Regime::Subcritical) {
            const int KL = 400;
            const std::vector<double> pl = flux_distribution(law, pc, KL);
            double mean = 0.0;
            double mass = 0.0;
            for (std::size_t k = 0; k < pl.size(); ++k) {
                mean += static_cast<double>(k) * pl[k];
                mass += pl[k];
            }
            const double d = mean - mean_identities(pc, law.mean()).mean_visits;
            checks.push_back({"mass_near_one", mass >= 1.0 - 1e-6, mass, 1e-6, "sum of P(X = k), k <= 400"});
            checks.push_back({"mean_identity", std::abs(d) <= 1e-6, d, 1e-6, "E[X] - (2(1 - p) - E[A])"});
        }

        if (law.exact_probs()) {
            const FptTable tutte = tutte_series(law, 5, 3);
            const FptTable brute = brute_force_F(law, 5, 3);
            const auto diff = table_mismatches(tutte, brute);
            checks.push_back({"oracle_equivalence", diff.empty(), static_cast<double>(diff.size()), 0.0,
                              "tutte vs brute force, n <= 5, p <= 3"});

            if (r.regime == Regime::Subcritical) {
                const FptTable big = tutte_series(law, 60, 3);
                const TableFlux tf = flux_via_table(big, pc);
                double gap = 0.0;
                double allowance = 1e-6;
                for (int k = 0; k <= 3; ++k) {
                    gap = std::max(gap, std::abs(tf.prob[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(k) + 1]));
                    allowance = std::max(allowance, 1e-6 + 100.0 * tf.tail_ratio[static_cast<std::size_t>(k)] *
                                                               tf.prob[static_cast<std::size_t>(k)]);
                }
                checks.push_back({"table_vs_kernel_flux", gap <= allowance, gap, allowance,
                                  "series table at n <= 60 against the kernel-method flux, k <= 3"});
            }
        }

        SimulationConfig cfg;
        cfg.depth = a.mc_depth;
        cfg.samples = a.mc_samples;
        cfg.seed = a.seed;
        const SimulationStats s = estimate_p_circ(law, cfg);
        // Truncation only raises the empty-root frequency; allow 4 standard
        // errors below and a bias margin above.
        const double se = std::sqrt(pc * (1.0 - pc) / static_cast<double>(cfg.samples));
        const double d = s.p_hat_circ - pc;
        const double bias = 0.01;
        checks.push_back({"monte_carlo_p_circ", d >= -4.0 * se && d <= bias + 4.0 * se, d, bias + 4.0 * se,
                          "depth " + std::to_string(cfg.depth) + ", " + std::to_string(cfg.samples) + " samples"});
    }

    if (!a.table.empty()) {
        std::ifstream in(a.table);
        if (!in) throw Error(ErrorCode::InvalidInput, "cannot open table " + a.table);
        const FptTable supplied = read_table_csv(in);
        const FptTable reference = tutte_series(law, supplied.max_vertices, supplied.max_flux);
        const auto diff = table_mismatches(supplied, reference);
        std::string detail = "supplied table against the recursion";
        if (!diff.empty())
            detail += ", first mismatch at (n, p) = (" + std::to_string(diff[0].first) + ", " + std::to_string(diff[0].second) + ")";
        checks.push_back({"table_equivalence", diff.empty(), static_cast<double>(diff.size()), 0.0, detail});
    }
    return checks;
}

Output run_verify(const VerifyArgs& a) {
    const ArrivalLaw law = load_law(a.law);
    const std::vector<Check> checks = verify_checks(law, a);
    Output o;
    json list = json::array();
    CsvTable t{{"check", "passed", "value", "tolerance", "detail"}, {}};
    bool all = true;
    for (const Check& c : checks) {
        all = all && c.passed;
        list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", real_json(c.value)},
                        {"tolerance", real_json(c.tolerance)}, {"detail", c.detail}});
        t.rows.push_back({c.name, c.passed ? "1" : "0", format_real(c.value), format_real(c.tolerance), "\"" + c.detail + "\""});
        if (!c.passed) std::cerr << "check failed: " << c.name << " (" << c.detail << ")\n";
    }
    o.report = make_report("verify", law_to_json(law), json{{"passed", all}, {"checks", list}});
    o.csv = csv_text(t);
    o.status = all ? exit_ok : exit_failure;
    return o;
}

void emit(const Output& o, const Options& opts, Format fallback) {
    Format f = fallback;
    if (opts.format == "json") f = Format::Json;
    else if (opts.format == "csv") f = Format::Csv;
    const std::string text = f == Format::Json ? dump_report(o.report) : o.csv;
    if (opts.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(opts.out);
        if (!file) throw Error(ErrorCode::InvalidInput, "cannot write " + opts.out);
        file << text;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parking on the binary tree: regimes, thresholds, enumeration and simulation"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opts;
    app.add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", opts.out, "Write output to this file instead of stdout");

    AnalyzeArgs analyze;
    auto* c_analyze = app.add_subcommand("analyze", "Classify the regime and compute critical quantities");
    c_analyze->add_option("law", analyze.law, "Law file (JSON)")->required();
    c_analyze->add_option("--tol", analyze.tol, "Relative band for the critical verdict");

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Locate alpha_c of a one-parameter family by bisection");
    c_sweep->add_option("--family", sweep.family, "binary0k | poisson | geometric")->required();
    c_sweep->add_option("--k", sweep.k, "Atom position for binary0k");
    c_sweep->add_option("--tol", sweep.tol, "Final bracket width");

    EnumerateArgs enumerate;
    auto* c_enum = app.add_subcommand("enumerate", "Exact table of fully parked tree weights");
    c_enum->add_option("law", enumerate.law, "Law file (JSON)")->required();
    c_enum->add_option("--n", enumerate.n, "Maximal number of vertices");
    c_enum->add_option("--p", enumerate.p, "Maximal flux");
    c_enum->add_flag("--oracle", enumerate.oracle, "Also run the brute-force enumeration and compare");

    FluxArgs flux;
    auto* c_flux = app.add_subcommand("flux", "Distribution of the number of cars visiting the root");
    c_flux->add_option("law", flux.law, "Law file (JSON)")->required();
    c_flux->add_option("--kmax", flux.kmax, "Largest k");

    SimulateArgs simulate;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo on the truncated tree");
    c_sim->add_option("law", simulate.law, "Law file (JSON)")->required();
    c_sim->add_option("--depth", simulate.config.depth, "Truncation depth");
    c_sim->add_option("--samples", simulate.config.samples, "Number of samples");
    c_sim->add_option("--seed", simulate.config.seed, "Seed");
    c_sim->add_option("--threads", simulate.config.threads, "Worker threads (0 = all)");
    c_sim->add_option("--budget", simulate.config.budget, "Maximal node visits");
    c_sim->add_flag("--clusters", simulate.clusters, "Record the root black cluster (depth <= 22)");

    VerifyArgs verify;
    auto* c_verify = app.add_subcommand("verify", "Run the invariant battery");
    c_verify->add_option("law", verify.law, "Law file (JSON)")->required();
    c_verify->add_option("--table", verify.table, "Check this table CSV against the recursion");
    c_verify->add_option("--mc-depth", verify.mc_depth, "Monte Carlo depth");
    c_verify->add_option("--mc-samples", verify.mc_samples, "Monte Carlo samples");
    c_verify->add_option("--seed", verify.seed, "Monte Carlo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        Output o;
        Format fallback = Format::Json;
        if (c_analyze->parsed()) o = run_analyze(analyze);
        else if (c_sweep->parsed()) o = run_sweep(sweep);
        else if (c_enum->parsed()) o = run_enumerate(enumerate), fallback = Format::Csv;
        else if (c_flux->parsed()) o = run_flux(flux), fallback = Format::Csv;
        else if (c_sim->parsed()) o = run_simulate(simulate);
        else o = run_verify(verify);
        emit(o, opts, fallback);
        return o.status;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_input_error(e.code()) ? exit_input : exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
}
