#include "lssclt/json_io.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "lssclt/errors.hpp"

namespace lssclt {

using nlohmann::json;

json to_json(const CorrectionOptions& opts) {
  return {{"rho", opts.rho},
          {"nodes", opts.nodes},
          {"calibrated", opts.calibrated},
          {"root_rule", to_string(opts.root_rule)}};
}

json to_json(const ContourCorrection& c) {
  return {{"value", c.value},
          {"imag_residual", c.imag_residual},
          {"options", to_json(c.options)},
          {"near_tie_nodes", c.near_tie_nodes},
          {"real_b_nodes", c.real_b_nodes},
          {"warnings", c.warnings}};
}

json to_json(const LssResult& r) {
  json j = {{"variant", to_string(r.variant)},
            {"f", r.f_label},
            {"n", r.n},
            {"p", r.p},
            {"nu4", r.nu4},
            {"raw_lss", r.raw_lss},
            {"correction", r.correction},
            {"statistic", r.statistic},
            {"asymptotic_mean", r.asymptotic_mean},
            {"asymptotic_var", r.asymptotic_var},
            {"standardized", r.standardized},
            {"imag_residual", r.imag_residual},
            {"regime_ratio", r.regime_ratio},
            {"warnings", r.warnings}};
  j["options"] = r.options ? to_json(*r.options) : json(nullptr);
  return j;
}

json to_json(const TestResult& r) {
  json decisions = json::array();
  for (const auto& [alpha, reject] : r.reject_at) {
    decisions.push_back({{"alpha", alpha}, {"reject", reject}});
  }
  return {{"statistic", r.statistic},
          {"p_value", r.p_value},
          {"nu4_used", r.nu4_used},
          {"nu4_source", r.nu4_source == Nu4Source::Provided ? "provided" : "estimated"},
          {"decisions", decisions},
          {"n", r.n},
          {"p", r.p},
          {"standardize", to_string(r.standardize_mode)}};
}

json to_json(const ExperimentConfig& cfg) {
  json j = {{"dist", cfg.dist.label()},
            {"nu4", cfg.dist.nu4()},
            {"n", cfg.n},
            {"p", cfg.p},
            {"reps", cfg.reps},
            {"seed", cfg.seed},
            {"alpha", cfg.alpha},
            {"cov", cfg.cov.label()},
            {"statistic", to_string(cfg.statistic)}};
  if (cfg.statistic == StatisticKind::Ln) {
    j["nu4_source"] = cfg.nu4_source == Nu4Source::Provided ? "exact" : "estimated";
  } else {
    j["f"] = cfg.f.label();
  }
  if (cfg.statistic == StatisticKind::GnCalib) j["correction"] = to_json(cfg.correction);
  return j;
}

json to_json(const McReport& r, bool include_timing) {
  json j = {{"config", to_json(r.config)},
            {"empirical_rate", r.empirical_rate},
            {"sample_mean", r.sample_mean},
            {"sample_sd", r.sample_sd},
            {"correction", r.correction},
            {"asymptotic_mean", r.asymptotic_mean},
            {"asymptotic_var", r.asymptotic_var},
            {"warnings", r.warnings},
            {"rep_values", r.rep_values}};
  if (include_timing) j["wall_time"] = r.wall_time;
  return j;
}

json to_json(const std::vector<QqPoint>& points) {
  json arr = json::array();
  for (const auto& q : points) arr.push_back({q.theoretical, q.empirical});
  return arr;
}

std::vector<double> rep_values_from_json(const json& j) {
  const json* node = &j;
  if (j.is_array() && !j.empty() && j.front().is_object()) node = &j.front();
  if (!node->is_object() || !node->contains("rep_values")) {
    throw ParseError("report JSON has no rep_values array");
  }
  std::vector<double> out;
  for (const auto& v : node->at("rep_values")) {
    if (!v.is_number()) throw ParseError("rep_values must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void write_report_table_csv(std::ostream& out, const std::vector<McReport>& reports) {
  std::set<Index> ns;
  std::set<Index> ps;
  std::map<std::pair<Index, Index>, const McReport*> cells;
  for (const auto& r : reports) {
    ns.insert(r.config.n);
    ps.insert(r.config.p);
    cells[{r.config.p, r.config.n}] = &r;
  }
  out << "p";
  for (Index n : ns) out << ",n=" << n;
  out << '\n';
  for (Index p : ps) {
    out << p;
    for (Index n : ns) {
      out << ',';
      const auto it = cells.find({p, n});
      if (it == cells.end()) continue;
      const McReport& r = *it->second;
      if (r.config.statistic == StatisticKind::GnCalib) {
        out << fmt::format("{:.3f} ({:.3f})", r.sample_mean, r.sample_sd);
      } else {
        out << fmt::format("{:.3f}", r.empirical_rate);
      }
    }
    out << '\n';
  }
}

void write_qq_csv(std::ostream& out, const std::vector<QqPoint>& points) {
  out << "theoretical,empirical\n";
  for (const auto& q : points) out << fmt::format("{:.17g},{:.17g}\n", q.theoretical, q.empirical);
}

}  // namespace lssclt
