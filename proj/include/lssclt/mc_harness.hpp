#pragma once

// Seeded Monte Carlo experiments for the L_n test and the centered LSS.
//
// Replication r draws its data from make_engine(seed, r) and streams it into
// the n x n Gram matrix, so rep_values are bitwise identical for any worker
// count. Size and power share one code path; only the covariance differs.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lssclt/clt_correction.hpp"
#include "lssclt/data_gen.hpp"
#include "lssclt/identity_test.hpp"
#include "lssclt/test_function.hpp"

namespace lssclt {

enum class StatisticKind { Ln, GnCalib, Qn };
std::string to_string(StatisticKind s);
StatisticKind parse_statistic(std::string_view text);

/// Cost units are n * p * reps; above this the harness refuses unless forced.
inline constexpr double kGuardrailCost = 2e11;

struct ExperimentConfig {
  DistributionSpec dist;
  Index n = 0;
  Index p = 0;
  int reps = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  CovarianceSpec cov;
  StatisticKind statistic = StatisticKind::Ln;
  TestFunction f = builtin_function("halfx3");
  CorrectionOptions correction;
  /// L_n only: exact nu4 of the entry law, or the plug-in estimate per replication.
  Nu4Source nu4_source = Nu4Source::Estimated;
  int workers = 1;
  bool force = false;

  /// InvalidArgument / InvalidDimension / GuardrailError.
  void validate() const;
  double cost() const;
};

/// rep_values hold L_n for Ln, G_n^Calib / sqrt(Var Y(f)) for GnCalib, and
/// Q_n itself for Qn. empirical_rate counts two-sided rejections of the
/// standardized value at level alpha.
struct McReport {
  ExperimentConfig config;
  double empirical_rate = 0.0;
  double sample_mean = 0.0;
  double sample_sd = 0.0;
  std::vector<double> rep_values;
  double wall_time = 0.0;
  /// Deterministic centering used for every replication (contour term or
  /// sqrt(n^3/p) Psi_3), and the limiting moments used to standardize.
  double correction = 0.0;
  double asymptotic_mean = 0.0;
  double asymptotic_var = 0.0;
  std::vector<std::string> warnings;
};

/// Called after each finished replication with (done, total).
using ProgressFn = std::function<void(int, int)>;

/// Statistic of one replication; pure in (cfg, rep).
double replicate(const ExperimentConfig& cfg, int rep);

McReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});
/// Requires an identity covariance.
McReport run_size(const ExperimentConfig& cfg, const ProgressFn& progress = {});
/// Requires a non-identity covariance.
McReport run_power(const ExperimentConfig& cfg, const ProgressFn& progress = {});
/// Requires statistic GnCalib.
McReport run_calibrated_moments(const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct QqPoint {
  double theoretical;
  double empirical;
};

/// Levels u_k = (k - 1/2) / grid. Empirical quantiles interpolate the order
/// statistics placed at plotting positions (i - 1/2) / N.
std::vector<QqPoint> qq_export(const std::vector<double>& values, int grid);
std::vector<QqPoint> qq_export(const McReport& report, int grid);

/// Sample mean and (n - 1) standard deviation.
std::pair<double, double> mean_and_sd(const std::vector<double>& values);

}  // namespace lssclt
