#pragma once

#include "parkcrit/analytic.hpp"
#include "parkcrit/arrival_law.hpp"
#include "parkcrit/simulator.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace parkcrit {

inline constexpr int report_schema = 1;

/// "%.15g" text of a double; "inf", "-inf" and "nan" for non-finite values.
std::string format_real(double v);

/// JSON value for a double: rounded to 15 significant digits, or the
/// format_real string when non-finite (JSON has no infinity).
nlohmann::json real_json(double v);

/// {"schema": 1, "command": ..., "law": ..., "outputs": ...}
nlohmann::json make_report(const std::string& command, const nlohmann::json& law, nlohmann::json outputs);

/// Two-space indented dump with a trailing newline.
std::string dump_report(const nlohmann::json& report);

nlohmann::json regime_json(const RegimeReport& report);
nlohmann::json simulation_json(const SimulationStats& stats);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& out, const CsvTable& table);

CsvTable visit_histogram_csv(const SimulationStats& stats);
/// Columns cluster_size, count, censored_flag; one row per (size, flag) present.
CsvTable cluster_histogram_csv(const SimulationStats& stats);

} // namespace parkcrit
