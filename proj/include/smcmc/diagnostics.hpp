#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace smcmc {

/// Biased (1/S normalized) sample autocorrelation of the demeaned series,
/// computed with a zero-padded FFT. Returns rho(0..S-1) with rho(0) = 1.
/// Throws PreconditionError for S < 4 or a (numerically) constant series.
std::vector<double> autocorrelation(std::span<const double> x);

/// S divided by the integrated autocorrelation time 1 + 2 sum_k rho(k), the
/// sum truncated before the first nonpositive Geyer pair rho(2m) + rho(2m+1),
/// and the result clamped to (0, S].
double effective_sample_size(std::span<const double> x);

/// Linear-interpolation order-statistic quantile (type 7). prob in [0, 1].
double quantile(std::span<const double> x, double prob);

struct SummaryRow {
  std::string name;
  std::optional<double> actual;
  double q025 = 0.0;
  double q500 = 0.0;
  double q975 = 0.0;
  double n_eff = 0.0;
};

struct Summary {
  std::vector<SummaryRow> rows;
  double min_n_eff = 0.0;
  double min_n_eff_per_sec = 0.0;  // uses wall-clock seconds when provided
};

/// Per-parameter quantiles and effective sample sizes for a sample matrix
/// (rows are iterations), keyed by name. Columns with fewer than 4 rows get
/// n_eff = S; zero-variance columns get n_eff = 1.
Summary summarize(const Eigen::MatrixXd& samples, const std::vector<std::string>& names,
                  const std::optional<Eigen::VectorXd>& actual, double wall_seconds);

std::string format_summary_table(const Summary& summary);

}  // namespace smcmc
