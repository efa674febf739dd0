#pragma once

#include "varbai/bandit.hpp"
#include "varbai/types.hpp"

#include <string>
#include <vector>

namespace varbai {
namespace baselines {

/// Constants shared by the gap-index baselines. `c` is the exponent
/// constant of the cited bounds (1/144 for the plain index, 1/512 for the
/// variance-adaptive one); `c_prime` = 1/(4 log2 K); `gamma` is the
/// confidence width of the variance-based-rejects baseline.
struct BaselineConfig {
  double b = 1.0;        // reward support bound
  double H = 1.0;        // complexity input (oracle)
  double c = 1.0 / 144.0;
  double c_prime = 1.0;
  double gamma = 1.96;
};

struct Outcome {
  Index identified = -1;
  std::vector<long> pulls;
  long total_pulls = 0;
};

/// b = max_i mu_i + sigma_i sqrt(log n), from the source's effective
/// instance.
double compute_support_bound(const BanditInstance& instance, long n);

/// Exploration scale folded into the gap indices:
/// a = (c / c_prime) * (4/9) * (n - K) / H.
double exploration_scale(const BaselineConfig& config, long n, Index num_arms);

// Pure index formulas, exposed for unit testing.
double gape_index(double gap, double b, double a, long pulls);
double gapev_index(double gap, double variance, double a, double b, long pulls);

Outcome unif_run(long n, const RewardSource& source, Rng& rng);
Outcome gape_run(long n, const RewardSource& source, const BaselineConfig& config,
                 Rng& rng);
Outcome gapev_run(long n, const RewardSource& source, const BaselineConfig& config,
                  Rng& rng);
Outcome vbr_run(long n, const RewardSource& source, double gamma, Rng& rng);

}  // namespace baselines
}  // namespace varbai
