#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "smcmc/nuts.hpp"
#include "smcmc/posterior.hpp"
#include "smcmc/smmala.hpp"

namespace smcmc {

struct Chain {
  std::string sampler_name;
  std::string engine_name;
  std::vector<std::string> param_names;
  Eigen::MatrixXd samples;     // post-burn-in draws, one row per kept iteration
  Eigen::VectorXd log_posts;   // log posterior at each kept draw
  std::vector<char> accepted;  // per kept iteration
  long accept_count = 0;       // over kept iterations
  long n_divergent = 0;        // over all iterations (NUTS only)
  int iterations = 0;
  int burn_in = 0;
  std::uint64_t seed = 0;
  double cpu_seconds = 0.0;   // thread CPU time of the sampling loop
  double wall_seconds = 0.0;  // wall time of the sampling loop

  int n_kept() const { return static_cast<int>(samples.rows()); }
  double accept_rate() const {
    return n_kept() > 0 ? static_cast<double>(accept_count) / n_kept() : 0.0;
  }
};

enum class SamplerKind { smmala, nuts };

inline const char* to_string(SamplerKind k) {
  return k == SamplerKind::smmala ? "smmala" : "nuts";
}

struct SamplerSettings {
  SamplerKind kind = SamplerKind::smmala;
  SmmalaConfig smmala;
  NutsConfig nuts;  // nuts.n_adapt is overridden with the chain's burn_in
};

/// Runs `iterations` transitions from init and keeps the last
/// iterations - burn_in states. NUTS adapts during the burn-in and freezes
/// afterwards. Deterministic given (seed, settings, target). The timers cover
/// the transition loop only.
Chain run_chain(const LogDensity& target, const Eigen::VectorXd& init, int iterations,
                int burn_in, const SamplerSettings& settings, std::uint64_t seed,
                std::vector<std::string> param_names);

}  // namespace smcmc
