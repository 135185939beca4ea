#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "smcmc/chain.hpp"
#include "smcmc/params.hpp"
#include "smcmc/posterior.hpp"

namespace smcmc {

struct ModelConfig {
  std::string type = "harmonic_oscillator";
  double delta_t = 0.0;
  double sigma_obs = 0.0;
  int n_conditions = 1;
};

struct SimulateBlock {
  double duration = 0.0;
  Eigen::VectorXd truth;  // flattened per the parameter spec
  double warmup_seconds = 0.0;
  int substeps = 0;  // 0 = automatic
};

struct DataBlock {
  std::vector<std::string> files;   // one per condition
  std::string manifest;             // optional; supplies truth for init/reporting
};

enum class InitKind { truth, box_center, explicit_vector };

struct SamplerBlock {
  SamplerKind algorithm = SamplerKind::smmala;
  int iterations = 0;
  std::optional<int> burn_in;  // absent: 0 for explicit init, iterations/2 otherwise
  SmmalaConfig smmala;
  NutsConfig nuts;
  InitKind init_kind = InitKind::box_center;
  Eigen::VectorXd init_values;  // for explicit_vector
};

struct DerivBlock {
  DerivEngine engine = DerivEngine::ad;
  double fd_step = 0.0;  // 0 = automatic step selection
};

/// Parsed run configuration. Exactly one of `simulate` / `data` is present.
struct RunConfig {
  ModelConfig model;
  ParamSpec params{{{"omega0", 1.0, 200.0, false},
                    {"sigma_in", 0.1, 500.0, false},
                    {"zeta", 0.01, 0.99, true}},
                   1};
  std::optional<SimulateBlock> simulate;
  std::optional<DataBlock> data;
  SamplerBlock sampler;
  DerivBlock derivatives;
  std::uint64_t seed = 12345;
  std::string output_dir = ".";
};

/// Parses and validates a JSON config file. Unknown keys anywhere are
/// rejected with the offending path in the message; all failures throw
/// ConfigError.
RunConfig load_config(const std::string& path);

/// Same grammar, from an in-memory string ("<config>" used in diagnostics).
RunConfig parse_config(const std::string& text);

/// Burn-in actually used by a run: the explicit value if configured, else 0
/// when the initial point is pinned (truth or an explicit vector), else half
/// the iterations.
int resolved_burn_in(const SamplerBlock& sampler);

}  // namespace smcmc
