#include "smcmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <sstream>

#include "smcmc/errors.hpp"
#include "smcmc/periodogram.hpp"

namespace smcmc {

std::vector<double> autocorrelation(std::span<const double> x) {
  const std::size_t s = x.size();
  if (s < 4) throw PreconditionError(detail::msg("autocorrelation: need >= 4 samples, got ", s));
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(s);

  std::size_t padded = 1;
  while (padded < 2 * s) padded <<= 1;
  std::vector<std::complex<double>> buf(padded, 0.0);
  for (std::size_t t = 0; t < s; ++t) buf[t] = x[t] - mean;

  detail::fft_pow2(buf, false);
  for (auto& c : buf) c = std::norm(c);
  detail::fft_pow2(buf, true);

  // Unscaled inverse FFT: divide by padded; biased normalization divides the
  // lag-k sum by S (it cancels in the ratio but keeps acov(0) interpretable).
  const double acov0 = buf[0].real() / static_cast<double>(padded) / static_cast<double>(s);
  if (!(acov0 > (1.0 + mean * mean) * 1e-15)) {
    throw PreconditionError("autocorrelation: series is constant (degenerate variance)");
  }
  std::vector<double> rho(s);
  for (std::size_t k = 0; k < s; ++k) {
    rho[k] = buf[k].real() / static_cast<double>(padded) / static_cast<double>(s) / acov0;
  }
  rho[0] = 1.0;
  return rho;
}

double effective_sample_size(std::span<const double> x) {
  const auto rho = autocorrelation(x);
  const double s = static_cast<double>(x.size());
  double pair_sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < rho.size(); ++m) {
    const double pair = rho[2 * m] + rho[2 * m + 1];
    if (pair < 0.0) break;
    pair_sum += pair;
  }
  const double tau = 2.0 * pair_sum - 1.0;
  if (!(tau > 1e-12)) return s;  // anticorrelated chain: clamp to the upper bound
  return std::min(s, s / tau);
}

double quantile(std::span<const double> x, double prob) {
  if (x.empty()) throw PreconditionError("quantile: empty input");
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw PreconditionError(detail::msg("quantile: prob must lie in [0,1], got ", prob));
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Summary summarize(const Eigen::MatrixXd& samples, const std::vector<std::string>& names,
                  const std::optional<Eigen::VectorXd>& actual, double wall_seconds) {
  const int dim = static_cast<int>(samples.cols());
  const int s = static_cast<int>(samples.rows());
  if (s < 1) throw PreconditionError("summarize: empty chain");
  if (static_cast<int>(names.size()) != dim) {
    throw PreconditionError(detail::msg("summarize: ", names.size(), " names for ", dim,
                                        " parameter columns"));
  }
  if (actual && actual->size() != dim) {
    throw PreconditionError("summarize: actual vector has wrong dimension");
  }
  Summary out;
  out.min_n_eff = std::numeric_limits<double>::infinity();
  std::vector<double> col(static_cast<std::size_t>(s));
  for (int j = 0; j < dim; ++j) {
    for (int t = 0; t < s; ++t) col[static_cast<std::size_t>(t)] = samples(t, j);
    SummaryRow row;
    row.name = names[static_cast<std::size_t>(j)];
    if (actual) row.actual = (*actual)[j];
    row.q025 = quantile(col, 0.025);
    row.q500 = quantile(col, 0.5);
    row.q975 = quantile(col, 0.975);
    if (s < 4) {
      row.n_eff = static_cast<double>(s);
    } else {
      try {
        row.n_eff = effective_sample_size(col);
      } catch (const PreconditionError&) {
        row.n_eff = 1.0;  // stuck chain: one effective draw
      }
    }
    out.min_n_eff = std::min(out.min_n_eff, row.n_eff);
    out.rows.push_back(std::move(row));
  }
  out.min_n_eff_per_sec = wall_seconds > 0.0 ? out.min_n_eff / wall_seconds : 0.0;
  return out;
}

std::string format_summary_table(const Summary& summary) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "name" << std::right << std::setw(12) << "actual"
     << std::setw(12) << "q025" << std::setw(12) << "q500" << std::setw(12) << "q975"
     << std::setw(12) << "n_eff" << '\n';
  os << std::setprecision(4) << std::fixed;
  for (const auto& row : summary.rows) {
    os << std::left << std::setw(14) << row.name << std::right;
    if (row.actual) {
      os << std::setw(12) << *row.actual;
    } else {
      os << std::setw(12) << "-";
    }
    os << std::setw(12) << row.q025 << std::setw(12) << row.q500 << std::setw(12) << row.q975
       << std::setw(12) << std::setprecision(1) << row.n_eff << std::setprecision(4) << '\n';
  }
  os << "min n_eff: " << std::setprecision(1) << summary.min_n_eff;
  if (summary.min_n_eff_per_sec > 0.0) {
    os << "   min n_eff / s: " << summary.min_n_eff_per_sec;
  }
  os << '\n';
  return os.str();
}

}  // namespace smcmc
