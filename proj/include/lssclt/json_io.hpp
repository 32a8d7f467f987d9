#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "lssclt/clt_correction.hpp"
#include "lssclt/identity_test.hpp"
#include "lssclt/mc_harness.hpp"

namespace lssclt {

nlohmann::json to_json(const CorrectionOptions& opts);
nlohmann::json to_json(const ContourCorrection& c);
/// All fields, the options echo and the warnings list. NaN becomes null.
nlohmann::json to_json(const LssResult& r);
nlohmann::json to_json(const TestResult& r);
nlohmann::json to_json(const ExperimentConfig& cfg);
/// Wall time is left out unless asked for, so reports stay reproducible.
nlohmann::json to_json(const McReport& r, bool include_timing = false);
nlohmann::json to_json(const std::vector<QqPoint>& points);

/// rep_values of a report written by to_json(McReport).
std::vector<double> rep_values_from_json(const nlohmann::json& j);

/// Grid: one row per p, one column per n, cells = empirical_rate
/// (or sample mean/sd for gn-calib). Reports may come in any order.
void write_report_table_csv(std::ostream& out, const std::vector<McReport>& reports);

void write_qq_csv(std::ostream& out, const std::vector<QqPoint>& points);

}  // namespace lssclt
