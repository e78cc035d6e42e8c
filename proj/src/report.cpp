#include "parkcrit/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace parkcrit {

using nlohmann::json;

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

json real_json(double v) {
    if (!std::isfinite(v)) return format_real(v);
    return std::strtod(format_real(v).c_str(), nullptr);
}

json make_report(const std::string& command, const json& law, json outputs) {
    return json{{"schema", report_schema}, {"command", command}, {"law", law}, {"outputs", std::move(outputs)}};
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

json regime_json(const RegimeReport& r) {
    json out{
        {"regime", std::string(to_string(r.regime))},
        {"star_holds", r.star_holds},
        {"t_c", real_json(r.t_c)},
        {"x_c", real_json(r.x_c)},
        {"F0_at_xc", real_json(r.F0_at_xc)},
        {"lhs", real_json(r.lhs)},
        {"rhs", real_json(r.rhs)},
        {"direct_margin", real_json(r.direct_margin)},
    };
    out["p_circ"] = r.p_circ ? real_json(*r.p_circ) : json(nullptr);
    out["p_bullet"] = r.p_bullet ? real_json(*r.p_bullet) : json(nullptr);
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

json simulation_json(const SimulationStats& s) {
    json hist = json::array();
    for (const auto& [k, c] : s.visit_histogram) hist.push_back({{"k", k}, {"count", c}});
    json out{
        {"depth", s.depth},
        {"samples", s.samples},
        {"seed", s.seed},
        {"p_hat_circ", real_json(s.p_hat_circ)},
        {"ci_half_width", real_json(s.ci_half_width)},
        {"mean_visits", real_json(s.mean_visits)},
        {"mean_stderr", real_json(s.mean_stderr)},
        {"visit_histogram", hist},
        {"wall_time", real_json(s.wall_time)},
    };
    if (s.cluster_sizes) {
        json clusters = json::array();
        for (const auto& [size, bin] : *s.cluster_sizes)
            clusters.push_back({{"size", size}, {"count", bin.count}, {"censored", bin.censored}});
        out["root_cluster_sizes"] = clusters;
        out["censored_fraction"] = real_json(s.censored_fraction());
    }
    return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
}

CsvTable visit_histogram_csv(const SimulationStats& s) {
    CsvTable t{{"k", "count"}, {}};
    for (const auto& [k, c] : s.visit_histogram) t.rows.push_back({std::to_string(k), std::to_string(c)});
    return t;
}

CsvTable cluster_histogram_csv(const SimulationStats& s) {
    CsvTable t{{"cluster_size", "count", "censored_flag"}, {}};
    if (!s.cluster_sizes) return t;
    for (const auto& [size, bin] : *s.cluster_sizes) {
        if (bin.count > bin.censored)
            t.rows.push_back({std::to_string(size), std::to_string(bin.count - bin.censored), "0"});
        if (bin.censored > 0) t.rows.push_back({std::to_string(size), std::to_string(bin.censored), "1"});
    }
    return t;
}

} // namespace parkcrit
