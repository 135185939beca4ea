#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smcmc/chain.hpp"
#include "smcmc/diagnostics.hpp"

namespace smcmc {

/// Dialect used throughout: comma separators, '.' decimal point, LF line
/// endings, one header row, optional '#'-prefixed metadata lines above the
/// header. Values are written with 17 significant digits so doubles survive a
/// round trip bit-exactly.

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> y;
  double delta_t = 0.0;
  std::uint64_t seed = 0;
};

void write_timeseries_csv(const std::string& path, const TimeSeries& ts);
TimeSeries read_timeseries_csv(const std::string& path);

void write_chain_csv(const std::string& path, const Chain& chain);

void write_summary_csv(const std::string& path, const Summary& summary);

struct BenchmarkRow {
  std::string sampler;
  std::string engine;
  double cpu_seconds = 0.0;
  double min_n_eff = 0.0;
  double min_n_eff_per_sec = 0.0;
  bool failed = false;
  std::string error;
};

std::string format_benchmark_table(const std::vector<BenchmarkRow>& rows);
void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows);

}  // namespace smcmc
