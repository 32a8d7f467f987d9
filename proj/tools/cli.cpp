#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lssclt/clt_correction.hpp"
#include "lssclt/csv.hpp"
#include "lssclt/data_gen.hpp"
#include "lssclt/errors.hpp"
#include "lssclt/identity_test.hpp"
#include "lssclt/json_io.hpp"
#include "lssclt/mc_harness.hpp"
#include "lssclt/spectra.hpp"

namespace lssclt::cli {

namespace {

constexpr const char* kSeedEnv = "LSSCLT_SEED";

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError(std::string(kSeedEnv) + " is not an unsigned integer: " + env);
    }
  }
  return 0;
}

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Rows are variables unless `transpose` is set.
DataMatrix load_data(const std::string& path, bool transpose) {
  DataMatrix data;
  data.values = read_csv_matrix(std::filesystem::path(path));
  if (transpose) data.values.transposeInPlace();
  return data;
}

struct RegimeViolation : Error {
  using Error::Error;
};

void require_regime(const DataMatrix& data) {
  if (data.p() < data.n()) {
    throw RegimeViolation(fmt::format(
        "input has p={} variables and n={} observations; this analysis needs p >= n "
        "(rows are variables; pass --transpose if rows are observations)",
        data.p(), data.n()));
  }
}

void add_format(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
}

// ---------------------------------------------------------------------------

struct GenFlags {
  std::string dist = "normal";
  Index n = 0;
  Index p = 0;
  std::uint64_t seed = 0;
  std::string cov = "identity";
  std::string standardize = "none";
  std::string out_path;
  std::string format = "csv";
};

int cmd_gen(const GenFlags& f, std::ostream& out) {
  const auto dist = parse_distribution(f.dist);
  const auto cov = parse_covariance(f.cov);
  const auto mode = parse_standardize_mode(f.standardize);
  if (f.n < 1 || f.p < 1) throw InvalidDimension("--n and --p must be at least 1");
  auto data = standardize(apply_covariance(sample_matrix(dist, f.p, f.n, f.seed), cov), mode);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!f.out_path.empty()) {
    file.open(f.out_path);
    if (!file) throw ParseError("cannot write " + f.out_path);
    sink = &file;
  }
  if (f.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < data.p(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(data.n()));
      for (Index j = 0; j < data.n(); ++j) row[static_cast<std::size_t>(j)] = data.values(i, j);
      rows.push_back(row);
    }
    nlohmann::json j = {{"dist", dist.label()}, {"cov", cov.label()}, {"p", data.p()},
                        {"n", data.n()},        {"seed", f.seed},     {"values", rows}};
    *sink << j.dump(2) << '\n';
  } else {
    write_csv_matrix(*sink, data.values);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct TestFlags {
  std::string input;
  std::vector<double> alphas{0.05};
  double nu4 = std::numeric_limits<double>::quiet_NaN();
  std::string standardize = "none";
  bool transpose = false;
  std::string format = "json";
};

int cmd_test(const TestFlags& f, std::ostream& out) {
  for (double a : f.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument(fmt::format("--alpha {} is not in (0, 1)", a));
  }
  const auto mode = parse_standardize_mode(f.standardize);
  auto data = load_data(f.input, f.transpose);
  require_regime(data);
  data = standardize(data, mode);
  std::optional<double> nu4;
  if (!std::isnan(f.nu4)) nu4 = f.nu4;
  auto result = test_identity(data, f.alphas, nu4);
  result.standardize_mode = mode;

  if (f.format == "json") {
    out << to_json(result).dump(2) << '\n';
  } else if (f.format == "csv") {
    out << "statistic,p_value,nu4_used,nu4_source,standardize,alpha,reject\n";
    for (const auto& [alpha, reject] : result.reject_at) {
      out << fmt::format("{:.17g},{:.17g},{:.17g},{},{},{},{}\n", result.statistic,
                         result.p_value, result.nu4_used,
                         result.nu4_source == Nu4Source::Provided ? "provided" : "estimated",
                         to_string(mode), alpha, reject ? 1 : 0);
    }
  } else {
    out << fmt::format("L_n        {:.6f}\np-value    {:.6g}\nnu4        {:.6f} ({})\nn, p       {}, {}\n",
                       result.statistic, result.p_value, result.nu4_used,
                       result.nu4_source == Nu4Source::Provided ? "provided" : "estimated",
                       result.n, result.p);
    for (const auto& [alpha, reject] : result.reject_at) {
      out << fmt::format("alpha={:<6} {}\n", alpha, reject ? "reject H0" : "do not reject H0");
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct CorrectionFlags {
  double rho = 0.5;
  int nodes = 512;
  std::string root_rule = "min-modulus";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--rho", rho, "Contour radius in (0,1)")->capture_default_str();
    cmd->add_option("--nodes", nodes, "Contour nodes")->capture_default_str();
    cmd->add_option("--root-rule", root_rule, "min-modulus or imag-sign")->capture_default_str();
  }
  CorrectionOptions options(bool calibrated) const {
    CorrectionOptions o;
    o.rho = rho;
    o.nodes = nodes;
    o.calibrated = calibrated;
    o.root_rule = parse_root_rule(root_rule);
    o.validate();
    return o;
  }
};

struct LssFlags {
  std::string input;
  std::string f = "halfx3";
  std::string variant = "gn-calib";
  double nu4 = std::numeric_limits<double>::quiet_NaN();
  std::string standardize = "none";
  bool transpose = false;
  std::string spectrum_out;
  CorrectionFlags correction;
  std::string format = "json";
};

int cmd_lss(const LssFlags& flags, std::ostream& out) {
  const auto f = parse_test_function(flags.f);
  const auto variant = parse_variant(flags.variant);
  const auto mode = parse_standardize_mode(flags.standardize);
  std::optional<CorrectionOptions> opts;
  if (variant != LssVariant::Qn) opts = flags.correction.options(variant == LssVariant::GnCalib);

  auto data = load_data(flags.input, flags.transpose);
  require_regime(data);
  data = standardize(data, mode);
  const double nu4 = std::isnan(flags.nu4) ? nu4_hat(data) : flags.nu4;
  const auto spectrum = eigenvalues(normalized_gram(data));
  if (!flags.spectrum_out.empty()) {
    std::ofstream file(flags.spectrum_out);
    if (!file) throw ParseError("cannot write " + flags.spectrum_out);
    write_spectrum_csv(file, spectrum);
  }
  const auto result = variant == LssVariant::Qn ? qn_statistic(spectrum, f, nu4)
                                                : gn_statistic(spectrum, f, nu4, *opts);
  const auto j = to_json(result);
  if (flags.format == "json") {
    out << j.dump(2) << '\n';
  } else if (flags.format == "csv") {
    static const char* keys[] = {"variant", "f", "n", "p", "nu4", "raw_lss", "correction",
                                 "statistic", "asymptotic_mean", "asymptotic_var", "standardized"};
    std::string header, row;
    for (const char* k : keys) {
      header += (header.empty() ? "" : ",") + std::string(k);
      const auto& v = j.at(k);
      std::string cell = v.is_string() ? v.get<std::string>()
                         : v.is_null() ? std::string()
                         : v.is_number_float() ? fmt::format("{:.17g}", v.get<double>())
                                               : v.dump();
      row += (row.empty() ? "" : ",") + cell;
    }
    out << header << '\n' << row << '\n';
  } else {
    out << fmt::format(
        "variant       {}\nf             {}\nn, p          {}, {}\nnu4           {:.6f}\n"
        "raw LSS       {:.6f}\ncorrection    {:.6f}\nstatistic     {:.6f}\n"
        "mean, var     {:.6f}, {:.6f}\nstandardized  {:.6f}\n",
        to_string(result.variant), result.f_label, result.n, result.p, result.nu4,
        result.raw_lss, result.correction, result.statistic, result.asymptotic_mean,
        result.asymptotic_var, result.standardized);
    for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

enum class McKind { Size, Power, Moments };

struct McFlags {
  std::string dist = "normal";
  std::vector<Index> ns;
  std::vector<Index> ps;
  double p_exp = 0.0;
  int reps = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string cov = "identity";
  std::string statistic = "ln";
  std::string f = "halfx3";
  std::string nu4_source = "estimated";
  CorrectionFlags correction;
  int workers = 1;
  bool force = false;
  bool timing = false;
  bool quiet = false;
  std::string qq_out;
  int qq_grid = 100;
  std::string format = "json";
};

std::vector<ExperimentConfig> build_configs(McKind kind, const McFlags& flags) {
  if (flags.ns.empty()) throw InvalidArgument("--n is required");
  if (flags.ps.empty() == (flags.p_exp == 0.0)) {
    throw InvalidArgument("give exactly one of --p and --p-exp");
  }
  ExperimentConfig base;
  base.dist = parse_distribution(flags.dist);
  base.reps = flags.reps;
  base.seed = flags.seed;
  base.alpha = flags.alpha;
  base.workers = flags.workers;
  base.force = flags.force;
  base.f = parse_test_function(flags.f);
  base.correction = flags.correction.options(true);
  if (flags.nu4_source == "exact") {
    base.nu4_source = Nu4Source::Provided;
  } else if (flags.nu4_source == "estimated") {
    base.nu4_source = Nu4Source::Estimated;
  } else {
    throw ParseError("--nu4-source must be exact or estimated");
  }
  switch (kind) {
    case McKind::Size:
      base.cov = CovarianceSpec::identity();
      base.statistic = parse_statistic(flags.statistic);
      break;
    case McKind::Power:
      base.cov = parse_covariance(flags.cov);
      if (base.cov.is_identity()) throw InvalidArgument("mc-power needs a non-identity --cov");
      base.statistic = parse_statistic(flags.statistic);
      break;
    case McKind::Moments:
      base.cov = CovarianceSpec::identity();
      base.statistic = StatisticKind::GnCalib;
      break;
  }
  std::vector<ExperimentConfig> configs;
  for (Index n : flags.ns) {
    std::vector<Index> ps = flags.ps;
    if (ps.empty()) {
      ps.push_back(static_cast<Index>(std::llround(std::pow(static_cast<double>(n), flags.p_exp))));
    }
    for (Index p : ps) {
      ExperimentConfig cfg = base;
      cfg.n = n;
      cfg.p = p;
      cfg.validate();
      configs.push_back(std::move(cfg));
    }
  }
  return configs;
}

int cmd_mc(McKind kind, const McFlags& flags, std::ostream& out, std::ostream& err) {
  const auto configs = build_configs(kind, flags);
  if (!flags.qq_out.empty() && configs.size() != 1) {
    throw InvalidArgument("--qq-out needs a single (n, p) cell");
  }
  std::vector<McReport> reports;
  for (const auto& cfg : configs) {
    const std::string tag = fmt::format("{} n={} p={}", cfg.dist.label(), cfg.n, cfg.p);
    ProgressFn progress;
    if (!flags.quiet) {
      progress = [&err, &tag](int done, int total) {
        const int step = std::max(1, total / 100);
        if (done % step == 0 || done == total) {
          err << '\r' << tag << ": " << done << '/' << total << std::flush;
        }
      };
    }
    reports.push_back(run_experiment(cfg, progress));
    if (!flags.quiet) {
      err << fmt::format("\r{}: {} reps in {:.2f} s\n", tag, cfg.reps, reports.back().wall_time);
    }
  }

  if (flags.format == "json") {
    if (reports.size() == 1) {
      out << to_json(reports.front(), flags.timing).dump(2) << '\n';
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) arr.push_back(to_json(r, flags.timing));
      out << arr.dump(2) << '\n';
    }
  } else if (flags.format == "csv") {
    write_report_table_csv(out, reports);
  } else {
    for (const auto& r : reports) {
      out << fmt::format("{:<12} {:<14} n={:<5} p={:<9} reps={:<5} rate={:.3f} mean={:.4f} sd={:.4f}\n",
                         r.config.dist.label(), r.config.cov.label(), r.config.n, r.config.p,
                         r.config.reps, r.empirical_rate, r.sample_mean, r.sample_sd);
      for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
    }
  }
  if (!flags.qq_out.empty()) {
    std::ofstream file(flags.qq_out);
    if (!file) throw ParseError("cannot write " + flags.qq_out);
    write_qq_csv(file, qq_export(reports.front(), flags.qq_grid));
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct QqFlags {
  std::string report;
  int grid = 100;
  std::string format = "csv";
};

int cmd_qq(const QqFlags& flags, std::ostream& out) {
  if (flags.grid < 1) throw InvalidArgument("--grid must be at least 1");
  std::ifstream in(flags.report);
  if (!in) throw ParseError("cannot open " + flags.report);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(flags.report + ": " + e.what());
  }
  const auto points = qq_export(rep_values_from_json(j), flags.grid);
  if (flags.format == "json") {
    out << to_json(points).dump(2) << '\n';
  } else if (flags.format == "csv") {
    write_qq_csv(out, points);
  } else {
    for (const auto& q : points) out << fmt::format("{:>10.5f} {:>10.5f}\n", q.theoretical, q.empirical);
  }
  return kOk;
}

void add_mc_options(CLI::App* cmd, McFlags& f, McKind kind) {
  cmd->add_option("--dist", f.dist, "normal, exp, t6, rademacher, gamma:k,theta")
      ->capture_default_str();
  cmd->add_option("--n", f.ns, "Sample sizes (comma separated)")->delimiter(',')->required();
  cmd->add_option("--p", f.ps, "Dimensions (comma separated)")->delimiter(',');
  cmd->add_option("--p-exp", f.p_exp, "Use p = n^e instead of --p");
  cmd->add_option("--reps", f.reps, "Replications")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed (default from LSSCLT_SEED, else 0)");
  cmd->add_option("--alpha", f.alpha, "Nominal level")->capture_default_str();
  if (kind == McKind::Power) {
    cmd->add_option("--cov", f.cov, "diag:nu or banded:v1,v2")->required();
  }
  if (kind != McKind::Moments) {
    cmd->add_option("--statistic", f.statistic, "ln, gn-calib or qn")->capture_default_str();
    cmd->add_option("--nu4-source", f.nu4_source, "L_n only: exact or estimated")
        ->capture_default_str();
  }
  cmd->add_option("--f", f.f, "Test function: builtin name or poly:c0,c1,...")
      ->capture_default_str();
  f.correction.add_to(cmd);
  cmd->add_option("--workers", f.workers, "Worker threads")->capture_default_str();
  cmd->add_flag("--force", f.force, "Run past the cost guardrail");
  cmd->add_flag("--timing", f.timing, "Include wall time in the JSON report");
  cmd->add_flag("--quiet", f.quiet, "No progress on stderr");
  cmd->add_option("--qq-out", f.qq_out, "Also write Q-Q pairs (CSV) here");
  cmd->add_option("--qq-grid", f.qq_grid, "Q-Q grid size")->capture_default_str();
  add_format(cmd, f.format);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear spectral statistics and the identity test for p >> n data", "lssclt"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }

  GenFlags gen;
  gen.seed = seed;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a p x n data matrix as CSV");
  gen_cmd->add_option("--dist", gen.dist, "Entry law")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Observations (columns)")->required();
  gen_cmd->add_option("--p", gen.p, "Variables (rows)")->required();
  gen_cmd->add_option("--seed", gen.seed, "Seed (default from LSSCLT_SEED, else 0)");
  gen_cmd->add_option("--cov", gen.cov, "identity, diag:nu, banded:v1,v2")->capture_default_str();
  gen_cmd->add_option("--standardize", gen.standardize, "none, per-variable, global")
      ->capture_default_str();
  gen_cmd->add_option("--out,-o", gen.out_path, "Output file (default stdout)");
  add_format(gen_cmd, gen.format);

  TestFlags test;
  auto* test_cmd = app.add_subcommand("test", "Test Sigma = I with L_n on a CSV data set");
  test_cmd->add_option("--input,-i", test.input, "CSV, one row per variable")->required();
  test_cmd->add_option("--alpha", test.alphas, "Levels (comma separated)")->delimiter(',');
  test_cmd->add_option("--nu4", test.nu4, "Fourth moment (default: estimate from data)");
  test_cmd->add_option("--standardize", test.standardize, "none, per-variable, global")
      ->capture_default_str();
  test_cmd->add_flag("--transpose", test.transpose, "Rows of the CSV are observations");
  add_format(test_cmd, test.format);

  LssFlags lss_flags;
  auto* lss_cmd = app.add_subcommand("lss", "Centered linear spectral statistic of a CSV data set");
  lss_cmd->add_option("--input,-i", lss_flags.input, "CSV, one row per variable")->required();
  lss_cmd->add_option("--f", lss_flags.f, "Builtin name or poly:c0,c1,...")->capture_default_str();
  lss_cmd->add_option("--variant", lss_flags.variant, "gn, gn-calib or qn")->capture_default_str();
  lss_cmd->add_option("--nu4", lss_flags.nu4, "Fourth moment (default: estimate from data)");
  lss_cmd->add_option("--standardize", lss_flags.standardize, "none, per-variable, global")
      ->capture_default_str();
  lss_cmd->add_flag("--transpose", lss_flags.transpose, "Rows of the CSV are observations");
  lss_cmd->add_option("--spectrum-out", lss_flags.spectrum_out, "Write eigenvalues (CSV) here");
  lss_flags.correction.add_to(lss_cmd);
  add_format(lss_cmd, lss_flags.format);

  McFlags size_flags, power_flags, moments_flags;
  for (auto* f : {&size_flags, &power_flags, &moments_flags}) {
    f->seed = seed;
    f->workers = default_workers();
  }
  auto* size_cmd = app.add_subcommand("mc-size", "Empirical size under Sigma = I");
  add_mc_options(size_cmd, size_flags, McKind::Size);
  auto* power_cmd = app.add_subcommand("mc-power", "Empirical power under an alternative Sigma");
  add_mc_options(power_cmd, power_flags, McKind::Power);
  auto* moments_cmd =
      app.add_subcommand("mc-table1", "Moments of the standardized calibrated statistic");
  add_mc_options(moments_cmd, moments_flags, McKind::Moments);

  QqFlags qq;
  auto* qq_cmd = app.add_subcommand("qq", "Normal Q-Q pairs from a saved Monte Carlo report");
  qq_cmd->add_option("--report", qq.report, "JSON report written by an mc-* command")->required();
  qq_cmd->add_option("--grid", qq.grid, "Number of probability levels")->capture_default_str();
  qq.format = "csv";
  add_format(qq_cmd, qq.format);

  std::vector<std::string> argv_store{"lssclt"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (test_cmd->parsed()) return cmd_test(test, out);
    if (lss_cmd->parsed()) return cmd_lss(lss_flags, out);
    if (size_cmd->parsed()) return cmd_mc(McKind::Size, size_flags, out, err);
    if (power_cmd->parsed()) return cmd_mc(McKind::Power, power_flags, out, err);
    if (moments_cmd->parsed()) return cmd_mc(McKind::Moments, moments_flags, out, err);
    if (qq_cmd->parsed()) return cmd_qq(qq, out);
  } catch (const RegimeViolation& e) {
    err << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const GuardrailError& e) {
    err << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace lssclt::cli
