#include "lssclt/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "lssclt/errors.hpp"
#include "lssclt/normal.hpp"
#include "lssclt/semicircle.hpp"
#include "lssclt/spectra.hpp"

namespace lssclt {

std::string to_string(StatisticKind s) {
  switch (s) {
    case StatisticKind::Ln: return "ln";
    case StatisticKind::GnCalib: return "gn-calib";
    case StatisticKind::Qn: return "qn";
  }
  return "?";
}

StatisticKind parse_statistic(std::string_view text) {
  if (text == "ln") return StatisticKind::Ln;
  if (text == "gn-calib") return StatisticKind::GnCalib;
  if (text == "qn") return StatisticKind::Qn;
  throw ParseError("unknown statistic '" + std::string(text) + "' (ln, gn-calib, qn)");
}

double ExperimentConfig::cost() const {
  return static_cast<double>(n) * static_cast<double>(p) * static_cast<double>(reps);
}

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1) throw InvalidDimension("experiment needs n >= 1 and p >= 1");
  if (reps < 1) throw InvalidArgument("reps must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (workers < 1) throw InvalidArgument("workers must be at least 1");
  if (statistic == StatisticKind::GnCalib) correction.validate();
  if (cost() > kGuardrailCost && !force) {
    std::ostringstream os;
    os << "experiment needs about " << cost() << " multiply-accumulates (n*p*reps), above the "
       << kGuardrailCost << " limit; pass force to run it anyway";
    throw GuardrailError(os.str());
  }
}

namespace {

/// Everything in a replication that does not depend on the draws.
struct Plan {
  std::optional<CovarianceFactor> factor;
  double correction = 0.0;
  double mean = 0.0;
  double var = 0.0;
  double sd = 1.0;
  std::vector<std::string> warnings;
};

Plan make_plan(const ExperimentConfig& cfg) {
  Plan plan;
  if (!cfg.cov.is_identity()) plan.factor = covariance_factor(cfg.cov, cfg.p);
  const double nu4 = cfg.dist.nu4();
  switch (cfg.statistic) {
    case StatisticKind::Ln:
      plan.var = 1.0;
      break;
    case StatisticKind::GnCalib: {
      auto opts = cfg.correction;
      opts.calibrated = true;
      const auto corr = mean_correction(cfg.f, cfg.n, cfg.p, nu4, opts);
      plan.correction = corr.value;
      plan.warnings = corr.warnings;
      break;
    }
    case StatisticKind::Qn:
      plan.correction = std::sqrt(std::pow(static_cast<double>(cfg.n), 3) /
                                  static_cast<double>(cfg.p)) *
                        semicircle::psi(cfg.f, 3);
      plan.mean = asymptotic_mean(cfg.f, nu4);
      break;
  }
  if (cfg.statistic != StatisticKind::Ln) {
    const auto cov = asymptotic_cov_series(cfg.f, cfg.f, nu4);
    plan.var = cov.value;
    plan.warnings.insert(plan.warnings.end(), cov.warnings.begin(), cov.warnings.end());
    if (!(plan.var > 0.0)) {
      throw InvalidArgument("test function " + cfg.f.label() + " has zero limiting variance");
    }
  }
  plan.sd = std::sqrt(plan.var);
  return plan;
}

double run_replication(const ExperimentConfig& cfg, const Plan& plan, int rep) {
  RowBlockGenerator gen(cfg.dist, plan.factor, cfg.p, cfg.n,
                        make_engine(cfg.seed, static_cast<std::uint64_t>(rep)));
  GramAccumulator acc(cfg.n);
  RowBlock block(std::min(GramAccumulator::kBlockRows, cfg.p), cfg.n);
  while (!gen.done()) {
    const Index rows = gen.next(block);
    acc.add_rows(block.topRows(rows));
  }
  const auto a = acc.finish();
  switch (cfg.statistic) {
    case StatisticKind::Ln: {
      const double nu4 = cfg.nu4_source == Nu4Source::Provided
                             ? cfg.dist.nu4()
                             : acc.fourth_power_sum() /
                                   (static_cast<double>(cfg.n) * static_cast<double>(cfg.p));
      return l_n_statistic(a, nu4);
    }
    case StatisticKind::GnCalib:
      return (centered_lss(eigenvalues(a), cfg.f) - plan.correction) / plan.sd;
    case StatisticKind::Qn:
      return centered_lss(eigenvalues(a), cfg.f) - plan.correction;
  }
  return 0.0;
}

}  // namespace

double replicate(const ExperimentConfig& cfg, int rep) {
  return run_replication(cfg, make_plan(cfg), rep);
}

std::pair<double, double> mean_and_sd(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

McReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Plan plan = make_plan(cfg);

  McReport report;
  report.config = cfg;
  report.rep_values.assign(static_cast<std::size_t>(cfg.reps), 0.0);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  int done = 0;
  auto worker = [&] {
    while (!failed) {
      const int rep = next++;
      if (rep >= cfg.reps) return;
      try {
        report.rep_values[static_cast<std::size_t>(rep)] = run_replication(cfg, plan, rep);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      std::lock_guard lock(mutex);
      ++done;
      if (progress) progress(done, cfg.reps);
    }
  };
  const int threads = std::min(cfg.workers, cfg.reps);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  int rejections = 0;
  for (double v : report.rep_values) {
    const double z = cfg.statistic == StatisticKind::Qn ? (v - plan.mean) / plan.sd : v;
    if (rejects(z, cfg.alpha)) ++rejections;
  }
  report.empirical_rate = static_cast<double>(rejections) / cfg.reps;
  std::tie(report.sample_mean, report.sample_sd) = mean_and_sd(report.rep_values);
  report.correction = plan.correction;
  report.asymptotic_mean = plan.mean;
  report.asymptotic_var = plan.var;
  report.warnings = plan.warnings;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

McReport run_size(const ExperimentConfig& cfg, const ProgressFn& progress) {
  if (!cfg.cov.is_identity()) throw InvalidArgument("size experiments need an identity covariance");
  return run_experiment(cfg, progress);
}

McReport run_power(const ExperimentConfig& cfg, const ProgressFn& progress) {
  if (cfg.cov.is_identity()) throw InvalidArgument("power experiments need a non-identity covariance");
  return run_experiment(cfg, progress);
}

McReport run_calibrated_moments(const ExperimentConfig& cfg, const ProgressFn& progress) {
  if (cfg.statistic != StatisticKind::GnCalib) {
    throw InvalidArgument("calibrated moments need statistic gn-calib");
  }
  return run_experiment(cfg, progress);
}

std::vector<QqPoint> qq_export(const std::vector<double>& values, int grid) {
  if (values.empty()) throw InvalidArgument("Q-Q export needs at least one value");
  if (grid < 1) throw InvalidArgument("Q-Q grid must be at least 1");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const auto count = static_cast<double>(sorted.size());
  std::vector<QqPoint> out;
  out.reserve(static_cast<std::size_t>(grid));
  for (int k = 1; k <= grid; ++k) {
    const double u = (k - 0.5) / grid;
    // Order statistic i (0-based) sits at level (i + 1/2) / N.
    const double pos = u * count - 0.5;
    double emp;
    if (pos <= 0.0) {
      emp = sorted.front();
    } else if (pos >= count - 1.0) {
      emp = sorted.back();
    } else {
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const double frac = pos - static_cast<double>(lo);
      emp = frac == 0.0 ? sorted[lo] : sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    }
    out.push_back({normal_quantile(u), emp});
  }
  return out;
}

std::vector<QqPoint> qq_export(const McReport& report, int grid) {
  return qq_export(report.rep_values, grid);
}

}  // namespace lssclt
