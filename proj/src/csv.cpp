#include "smcmc/csv.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "smcmc/errors.hpp"

namespace smcmc {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(detail::msg("cannot open '", path, "' for writing"));
  out << std::setprecision(17);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& path, std::size_t lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(detail::msg(path, ":", lineno, ": expected a number, got '", s, "'"));
  }
}

}  // namespace

void write_timeseries_csv(const std::string& path, const TimeSeries& ts) {
  if (ts.t.size() != ts.y.size()) {
    throw PreconditionError("write_timeseries_csv: t and y lengths differ");
  }
  std::ofstream out = open_out(path);
  out << "# delta_t=" << ts.delta_t << " seed=" << ts.seed << "\n";
  out << "t,y\n";
  for (std::size_t i = 0; i < ts.t.size(); ++i) out << ts.t[i] << "," << ts.y[i] << "\n";
  if (!out) throw ConfigError(detail::msg("write to '", path, "' failed"));
}

TimeSeries read_timeseries_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(detail::msg("cannot open '", path, "' for reading"));
  TimeSeries ts;
  bool have_delta_t = false;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "delta_t") {
          ts.delta_t = parse_double(value, path, lineno);
          have_delta_t = true;
        } else if (key == "seed") {
          ts.seed = std::stoull(value);
        }
      }
      continue;
    }
    if (!have_header) {
      if (line != "t,y") {
        throw ConfigError(detail::msg(path, ":", lineno, ": expected header 't,y', got '", line,
                                      "'"));
      }
      have_header = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw ConfigError(detail::msg(path, ":", lineno, ": expected 2 fields, got ",
                                    fields.size()));
    }
    ts.t.push_back(parse_double(fields[0], path, lineno));
    ts.y.push_back(parse_double(fields[1], path, lineno));
  }
  if (!have_header) throw ConfigError(detail::msg(path, ": missing 't,y' header"));
  if (ts.y.empty()) throw ConfigError(detail::msg(path, ": no data rows"));
  if (!have_delta_t) {
    if (ts.t.size() < 2) throw ConfigError(detail::msg(path, ": cannot infer delta_t"));
    ts.delta_t = ts.t[1] - ts.t[0];
  }
  if (!(ts.delta_t > 0.0)) throw ConfigError(detail::msg(path, ": delta_t must be positive"));
  return ts;
}

void write_chain_csv(const std::string& path, const Chain& chain) {
  std::ofstream out = open_out(path);
  out << "iteration";
  for (const auto& name : chain.param_names) out << "," << name;
  out << ",log_posterior,accepted\n";
  for (int i = 0; i < chain.n_kept(); ++i) {
    out << chain.burn_in + i + 1;
    for (int j = 0; j < chain.samples.cols(); ++j) out << "," << chain.samples(i, j);
    out << "," << chain.log_posts[i] << ","
        << static_cast<int>(chain.accepted[static_cast<std::size_t>(i)]) << "\n";
  }
  if (!out) throw ConfigError(detail::msg("write to '", path, "' failed"));
}

void write_summary_csv(const std::string& path, const Summary& summary) {
  std::ofstream out = open_out(path);
  out << "name,actual,q025,q500,q975,n_eff\n";
  for (const auto& row : summary.rows) {
    out << row.name << ",";
    if (row.actual) out << *row.actual;
    out << "," << row.q025 << "," << row.q500 << "," << row.q975 << "," << row.n_eff << "\n";
  }
  if (!out) throw ConfigError(detail::msg("write to '", path, "' failed"));
}

std::string format_benchmark_table(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "sampler" << std::setw(26) << "derivative implementation"
     << std::right << std::setw(14) << "CPU time (s)" << std::setw(12) << "min N Eff"
     << std::setw(16) << "min N Eff / s" << '\n';
  for (const auto& row : rows) {
    os << std::left << std::setw(10) << row.sampler << std::setw(26) << row.engine << std::right;
    if (row.failed) {
      os << "  failed: " << row.error << '\n';
      continue;
    }
    os << std::fixed << std::setprecision(2) << std::setw(14) << row.cpu_seconds
       << std::setprecision(1) << std::setw(12) << row.min_n_eff << std::setprecision(2)
       << std::setw(16) << row.min_n_eff_per_sec << '\n';
    os.unsetf(std::ios::fixed);
    os << std::setprecision(6);
  }
  return os.str();
}

void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows) {
  std::ofstream out = open_out(path);
  out << "sampler,derivative_implementation,cpu_time_s,min_n_eff,min_n_eff_per_s,error\n";
  for (const auto& row : rows) {
    out << row.sampler << "," << row.engine << ",";
    if (!row.failed) {
      out << row.cpu_seconds << "," << row.min_n_eff << "," << row.min_n_eff_per_sec << ",";
    } else {
      out << ",,,\"" << row.error << "\"";
    }
    out << "\n";
  }
  if (!out) throw ConfigError(detail::msg("write to '", path, "' failed"));
}

}  // namespace smcmc
