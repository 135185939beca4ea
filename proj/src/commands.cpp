#include "smcmc/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "smcmc/csv.hpp"
#include "smcmc/diagnostics.hpp"
#include "smcmc/simulate.hpp"

namespace smcmc {

namespace {

namespace fs = std::filesystem;

// Fixed stream ids so every piece of randomness has its own deterministic
// substream of the config seed: per-condition process noise (2c) and
// observation noise (2c+1), the chain, and the derivative-check points.
constexpr std::uint64_t kChainStream = 0x10000;
constexpr std::uint64_t kCheckStream = 0x20000;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

HarmonicOscillatorModel make_model(const RunConfig& cfg) {
  return HarmonicOscillatorModel(cfg.model.sigma_obs, cfg.model.delta_t);
}

fs::path ensure_output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError(detail::msg("cannot create output directory '", cfg.output_dir, "': ",
                                  ec.message()));
  }
  return dir;
}

std::vector<TimeSeries> simulate_series(const RunConfig& cfg) {
  if (!cfg.simulate.has_value()) throw ConfigError("this config has no simulate block");
  const SimulateBlock& sim = *cfg.simulate;
  const HarmonicOscillatorModel model = make_model(cfg);
  const ParamVector theta{&cfg.params, sim.truth};
  SimulateOptions opts;
  opts.substeps = sim.substeps;
  opts.warmup_seconds = sim.warmup_seconds;
  std::vector<TimeSeries> out;
  for (int c = 0; c < cfg.model.n_conditions; ++c) {
    const std::uint64_t process_seed = sub_seed(cfg.seed, 2 * static_cast<std::uint64_t>(c));
    const std::uint64_t obs_seed = sub_seed(cfg.seed, 2 * static_cast<std::uint64_t>(c) + 1);
    Trajectory traj = simulate_sde(model, theta, c, sim.duration, cfg.model.delta_t,
                                   process_seed, opts);
    TimeSeries ts;
    ts.t = traj.t;
    ts.y = observe(traj, model.observed_component(), cfg.model.sigma_obs, obs_seed);
    ts.delta_t = cfg.model.delta_t;
    ts.seed = process_seed;
    out.push_back(std::move(ts));
  }
  return out;
}

std::optional<Eigen::VectorXd> read_manifest_truth(const std::string& path, int expected_dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError(detail::msg("cannot open manifest '", path, "'"));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(detail::msg("manifest '", path, "' is not valid JSON: ", e.what()));
  }
  if (!j.contains("truth_flat") || !j["truth_flat"].is_array()) {
    throw ConfigError(detail::msg("manifest '", path, "' has no truth_flat array"));
  }
  const auto& arr = j["truth_flat"];
  if (static_cast<int>(arr.size()) != expected_dim) {
    throw ConfigError(detail::msg("manifest '", path, "': truth_flat has ", arr.size(),
                                  " values, expected ", expected_dim));
  }
  Eigen::VectorXd truth(expected_dim);
  for (int i = 0; i < expected_dim; ++i) {
    if (!arr[static_cast<std::size_t>(i)].is_number()) {
      throw ConfigError(detail::msg("manifest '", path, "': truth_flat[", i, "] is not a number"));
    }
    truth[i] = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return truth;
}

struct Dataset {
  std::vector<TimeSeries> series;
  std::vector<SpectralData> spectra;
  std::optional<Eigen::VectorXd> truth;
};

Dataset load_dataset(const RunConfig& cfg) {
  Dataset ds;
  if (cfg.data.has_value()) {
    for (const auto& file : cfg.data->files) {
      TimeSeries ts = read_timeseries_csv(file);
      const double rel = std::fabs(ts.delta_t - cfg.model.delta_t) /
                         std::max(ts.delta_t, cfg.model.delta_t);
      if (rel > 1e-9) {
        throw ConfigError(detail::msg(file, ": delta_t ", ts.delta_t,
                                      " does not match model.delta_t ", cfg.model.delta_t));
      }
      ds.series.push_back(std::move(ts));
    }
    if (!cfg.data->manifest.empty()) {
      ds.truth = read_manifest_truth(cfg.data->manifest, cfg.params.dim());
    }
  } else {
    ds.series = simulate_series(cfg);
    ds.truth = cfg.simulate->truth;
  }
  for (const auto& ts : ds.series) ds.spectra.push_back(periodogram(ts.y, ts.delta_t));
  return ds;
}

Eigen::VectorXd resolve_init(const RunConfig& cfg, const Dataset& ds) {
  switch (cfg.sampler.init_kind) {
    case InitKind::truth:
      if (!ds.truth.has_value()) {
        throw ConfigError(
            "sampler.init 'truth' needs a simulate block or a data manifest with truth_flat");
      }
      return *ds.truth;
    case InitKind::explicit_vector:
      return cfg.sampler.init_values;
    case InitKind::box_center:
    default: {
      Eigen::VectorXd init(cfg.params.dim());
      for (int i = 0; i < cfg.params.dim(); ++i) {
        init[i] = 0.5 * (cfg.params.lower_of(i) + cfg.params.upper_of(i));
      }
      return init;
    }
  }
}

void require_in_support(const ParamSpec& spec, const Eigen::VectorXd& init) {
  if (!spec.in_support(init)) {
    std::ostringstream os;
    os.precision(17);
    os << "initial point outside the parameter bounds: [";
    for (int i = 0; i < init.size(); ++i) os << (i ? ", " : "") << init[i];
    os << "]";
    throw PreconditionError(os.str());
  }
}

int env_thread_cap() {
  const char* raw = std::getenv("SPECTRAL_MCMC_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  try {
    const int n = std::stoi(raw);
    if (n < 1) throw std::invalid_argument(raw);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(detail::msg("SPECTRAL_MCMC_THREADS='", raw,
                                  "' is not a positive integer"));
  }
}

struct BenchmarkCell {
  SamplerKind sampler;
  DerivEngine engine;
};

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.simulate.has_value()) {
    throw ConfigError("simulate command requires a simulate block");
  }
  const fs::path dir = ensure_output_dir(cfg);
  const std::vector<TimeSeries> series = simulate_series(cfg);

  nlohmann::json manifest;
  manifest["model"] = {{"type", cfg.model.type},
                       {"delta_t", cfg.model.delta_t},
                       {"sigma_obs", cfg.model.sigma_obs},
                       {"n_conditions", cfg.model.n_conditions}};
  manifest["duration"] = cfg.simulate->duration;
  manifest["warmup_seconds"] = cfg.simulate->warmup_seconds;
  manifest["substeps"] = cfg.simulate->substeps;
  manifest["seed"] = cfg.seed;
  manifest["param_names"] = cfg.params.flat_names();
  manifest["truth_flat"] = std::vector<double>(cfg.simulate->truth.data(),
                                               cfg.simulate->truth.data() +
                                                   cfg.simulate->truth.size());
  std::vector<std::string> files;
  std::vector<std::uint64_t> seeds;
  for (std::size_t c = 0; c < series.size(); ++c) {
    const std::string name = detail::msg("data_c", c + 1, ".csv");
    const fs::path path = dir / name;
    write_timeseries_csv(path.string(), series[c]);
    files.push_back(name);
    seeds.push_back(series[c].seed);
    log << "wrote " << path.string() << " (" << series[c].y.size() << " rows)\n";
  }
  manifest["files"] = files;
  manifest["condition_seeds"] = seeds;

  const fs::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw ConfigError(detail::msg("cannot open '", manifest_path.string(), "'"));
  out << manifest.dump(2) << "\n";
  if (!out) throw ConfigError(detail::msg("write to '", manifest_path.string(), "' failed"));
  log << "wrote " << manifest_path.string() << "\n";
  return 0;
}

int cmd_sample(const RunConfig& cfg, std::ostream& log) {
  if (cfg.sampler.iterations < 1) {
    throw ConfigError("sample command requires a sampler block with iterations >= 1");
  }
  const Dataset ds = load_dataset(cfg);
  const HarmonicOscillatorModel model = make_model(cfg);
  const Posterior<HarmonicOscillatorModel> posterior(model, cfg.params, ds.spectra,
                                                     cfg.derivatives.engine,
                                                     cfg.derivatives.fd_step);
  const Eigen::VectorXd init = resolve_init(cfg, ds);
  require_in_support(cfg.params, init);

  SamplerSettings settings;
  settings.kind = cfg.sampler.algorithm;
  settings.smmala = cfg.sampler.smmala;
  settings.nuts = cfg.sampler.nuts;
  const int burn_in = resolved_burn_in(cfg.sampler);

  Chain chain = run_chain(posterior, init, cfg.sampler.iterations, burn_in, settings,
                          sub_seed(cfg.seed, kChainStream), cfg.params.flat_names());
  chain.engine_name = to_string(cfg.derivatives.engine);

  const Summary summary =
      summarize(chain.samples, chain.param_names, ds.truth, chain.wall_seconds);

  const fs::path dir = ensure_output_dir(cfg);
  write_chain_csv((dir / "chain.csv").string(), chain);
  write_summary_csv((dir / "summary.csv").string(), summary);
  const std::string table = format_summary_table(summary);
  {
    std::ofstream out(dir / "summary.txt");
    if (!out) throw ConfigError(detail::msg("cannot open '", (dir / "summary.txt").string(), "'"));
    out << table;
  }

  log << table;
  log << "sampler: " << chain.sampler_name << "  engine: " << chain.engine_name
      << "  kept: " << chain.n_kept() << "  burn-in: " << chain.burn_in
      << "  accept rate: " << chain.accept_rate();
  if (settings.kind == SamplerKind::nuts) log << "  divergences: " << chain.n_divergent;
  log << "\n";
  log << "cpu seconds: " << chain.cpu_seconds << "  wall seconds: " << chain.wall_seconds << "\n";
  log << "wrote " << (dir / "chain.csv").string() << ", " << (dir / "summary.csv").string()
      << ", " << (dir / "summary.txt").string() << "\n";
  return 0;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& log) {
  const Dataset ds = load_dataset(cfg);
  const HarmonicOscillatorModel model = make_model(cfg);
  const int kept = cfg.sampler.iterations >= 1 ? cfg.sampler.iterations : 1000;
  const std::uint64_t chain_seed = sub_seed(cfg.seed, kChainStream);

  const BenchmarkCell cells[4] = {{SamplerKind::smmala, DerivEngine::fd},
                                  {SamplerKind::smmala, DerivEngine::ad},
                                  {SamplerKind::nuts, DerivEngine::fd},
                                  {SamplerKind::nuts, DerivEngine::ad}};
  std::vector<BenchmarkRow> rows(4);

  auto run_cell = [&](int idx) {
    const BenchmarkCell& cell = cells[idx];
    BenchmarkRow row;
    row.sampler = to_string(cell.sampler);
    row.engine = cell.engine == DerivEngine::fd ? "finite differences" : "dual numbers";
    try {
      const Posterior<HarmonicOscillatorModel> posterior(model, cfg.params, ds.spectra,
                                                         cell.engine, cfg.derivatives.fd_step);
      const Eigen::VectorXd init = resolve_init(cfg, ds);
      require_in_support(cfg.params, init);
      SamplerSettings settings;
      settings.kind = cell.sampler;
      settings.smmala = cfg.sampler.smmala;
      settings.nuts = cfg.sampler.nuts;
      // Equal kept-draw budgets: smMALA runs exactly `kept` iterations; NUTS
      // gets an adaptation phase of the same length on top, discarded as
      // burn-in (the usual HMC warmup split of half adapt, half sample).
      const int burn_in = cell.sampler == SamplerKind::nuts ? kept : 0;
      const Chain chain = run_chain(posterior, init, kept + burn_in, burn_in, settings,
                                    chain_seed, cfg.params.flat_names());
      const Summary summary =
          summarize(chain.samples, chain.param_names, ds.truth, chain.wall_seconds);
      row.cpu_seconds = chain.cpu_seconds;
      row.min_n_eff = summary.min_n_eff;
      row.min_n_eff_per_sec = chain.cpu_seconds > 0.0 ? summary.min_n_eff / chain.cpu_seconds
                                                      : 0.0;
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows[static_cast<std::size_t>(idx)] = std::move(row);
  };

  const int threads = std::min(env_thread_cap(), 4);
  if (threads <= 1) {
    for (int i = 0; i < 4; ++i) run_cell(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < 4; i = next.fetch_add(1)) run_cell(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  const std::string table = format_benchmark_table(rows);
  log << table;
  const fs::path dir = ensure_output_dir(cfg);
  write_benchmark_csv((dir / "benchmark.csv").string(), rows);
  log << "wrote " << (dir / "benchmark.csv").string() << "\n";
  return 0;
}

int cmd_check_derivatives(const RunConfig& cfg, std::ostream& log) {
  const Dataset ds = load_dataset(cfg);
  const HarmonicOscillatorModel model = make_model(cfg);
  const Posterior<HarmonicOscillatorModel> post_fd(model, cfg.params, ds.spectra, DerivEngine::fd,
                                                   cfg.derivatives.fd_step);
  const Posterior<HarmonicOscillatorModel> post_ad(model, cfg.params, ds.spectra,
                                                   DerivEngine::ad);

  Rng rng(sub_seed(cfg.seed, kCheckStream));
  constexpr int kPoints = 20;
  double max_grad_disc = 0.0;
  double max_hess_disc = 0.0;
  for (int p = 0; p < kPoints; ++p) {
    Eigen::VectorXd theta(cfg.params.dim());
    for (int i = 0; i < cfg.params.dim(); ++i) {
      theta[i] = cfg.params.lower_of(i) +
                 rng.uniform() * (cfg.params.upper_of(i) - cfg.params.lower_of(i));
    }
    const Eigen::VectorXd g_fd = post_fd.gradient(theta);
    const Eigen::VectorXd g_ad = post_ad.gradient(theta);
    const Eigen::MatrixXd h_fd = post_fd.hessian(theta);
    const Eigen::MatrixXd h_ad = post_ad.hessian(theta);
    const double grad_disc =
        (g_ad - g_fd).cwiseAbs().maxCoeff() / (1.0 + g_ad.cwiseAbs().maxCoeff());
    const double hess_disc =
        (h_ad - h_fd).cwiseAbs().maxCoeff() / (1.0 + h_ad.cwiseAbs().maxCoeff());
    max_grad_disc = std::max(max_grad_disc, grad_disc);
    max_hess_disc = std::max(max_hess_disc, hess_disc);
  }
  log << "max relative gradient discrepancy (ad vs fd) over " << kPoints
      << " points: " << max_grad_disc << "\n";
  log << "max relative Hessian  discrepancy (ad vs fd) over " << kPoints
      << " points: " << max_hess_disc << "\n";
  if (max_grad_disc > 1e-4) {
    log << "FAIL: gradient discrepancy exceeds 1e-4\n";
    return 3;
  }
  log << "OK\n";
  return 0;
}

int dispatch_command(const std::string& name, const RunConfig& cfg, std::ostream& log,
                     std::ostream& err) {
  try {
    if (name == "simulate") return cmd_simulate(cfg, log);
    if (name == "sample") return cmd_sample(cfg, log);
    if (name == "benchmark") return cmd_benchmark(cfg, log);
    if (name == "check-derivatives") return cmd_check_derivatives(cfg, log);
    throw ConfigError(detail::msg("unknown command '", name, "'"));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    err << "precondition error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace smcmc
