#include "smcmc/chain.hpp"

#include <ctime>
#include <utility>

namespace smcmc {

namespace {

double thread_cpu_seconds() {
  timespec ts{};
  if (clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts) != 0) return 0.0;
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

double wall_seconds_now() {
  timespec ts{};
  if (clock_gettime(CLOCK_MONOTONIC, &ts) != 0) return 0.0;
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

}  // namespace

Chain run_chain(const LogDensity& target, const Eigen::VectorXd& init, int iterations,
                int burn_in, const SamplerSettings& settings, std::uint64_t seed,
                std::vector<std::string> param_names) {
  if (iterations < 1) throw PreconditionError("run_chain: iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) {
    throw PreconditionError(detail::msg("run_chain: burn_in ", burn_in,
                                        " must lie in [0, iterations) with iterations ",
                                        iterations));
  }
  if (static_cast<int>(param_names.size()) != target.dim()) {
    throw PreconditionError("run_chain: one parameter name required per dimension");
  }

  const int n_kept = iterations - burn_in;
  Chain chain;
  chain.sampler_name = to_string(settings.kind);
  chain.param_names = std::move(param_names);
  chain.samples.resize(n_kept, target.dim());
  chain.log_posts.resize(n_kept);
  chain.accepted.assign(static_cast<std::size_t>(n_kept), 0);
  chain.iterations = iterations;
  chain.burn_in = burn_in;
  chain.seed = seed;

  Rng rng(seed);

  if (settings.kind == SamplerKind::smmala) {
    SmmalaSampler sampler(target, init, settings.smmala);
    const double cpu0 = thread_cpu_seconds();
    const double wall0 = wall_seconds_now();
    for (int it = 0; it < iterations; ++it) {
      const SmmalaStepInfo info = sampler.step(rng);
      const int kept = it - burn_in;
      if (kept >= 0) {
        chain.samples.row(kept) = sampler.position();
        chain.log_posts[kept] = info.log_post;
        chain.accepted[static_cast<std::size_t>(kept)] = info.accepted ? 1 : 0;
        chain.accept_count += info.accepted ? 1 : 0;
      }
    }
    chain.cpu_seconds = thread_cpu_seconds() - cpu0;
    chain.wall_seconds = wall_seconds_now() - wall0;
  } else {
    NutsConfig cfg = settings.nuts;
    cfg.n_adapt = burn_in;
    NutsSampler sampler(target, init, cfg, rng);
    const double cpu0 = thread_cpu_seconds();
    const double wall0 = wall_seconds_now();
    for (int it = 0; it < iterations; ++it) {
      const NutsStepInfo info = sampler.step(rng);
      chain.n_divergent += info.divergent ? 1 : 0;
      const int kept = it - burn_in;
      if (kept >= 0) {
        chain.samples.row(kept) = sampler.position();
        chain.log_posts[kept] = info.log_post;
        chain.accepted[static_cast<std::size_t>(kept)] = info.accepted ? 1 : 0;
        chain.accept_count += info.accepted ? 1 : 0;
      }
    }
    chain.cpu_seconds = thread_cpu_seconds() - cpu0;
    chain.wall_seconds = wall_seconds_now() - wall0;
  }
  return chain;
}

}  // namespace smcmc
