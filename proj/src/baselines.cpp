#include "varbai/baselines.hpp"

#include "varbai/pull_rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace varbai {
namespace baselines {

namespace {

Index argmax_mean(const std::vector<ArmEstimator>& est) {
  Index best = 0;
  for (Index i = 1; i < static_cast<Index>(est.size()); ++i) {
    if (est[static_cast<std::size_t>(i)].mean >
        est[static_cast<std::size_t>(best)].mean) {
      best = i;
    }
  }
  return best;
}

}  // namespace

double compute_support_bound(const BanditInstance& instance, long n) {
  if (n < 2) throw std::invalid_argument("support bound needs n >= 2");
  const double root_log_n = std::sqrt(std::log(static_cast<double>(n)));
  double b = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < instance.num_arms(); ++i) {
    b = std::max(b, instance.mean(i) + std::sqrt(instance.variance(i)) * root_log_n);
  }
  return b;
}

double exploration_scale(const BaselineConfig& config, long n, Index num_arms) {
  return (config.c / config.c_prime) * (4.0 / 9.0) *
         static_cast<double>(n - num_arms) / config.H;
}

double gape_index(double gap, double b, double a, long pulls) {
  return -gap + b * std::sqrt(a / static_cast<double>(pulls));
}

double gapev_index(double gap, double variance, double a, double b, long pulls) {
  return -gap + std::sqrt(2.0 * a * variance / static_cast<double>(pulls)) +
         7.0 * a * b / (3.0 * static_cast<double>(pulls - 1));
}

Outcome unif_run(long n, const RewardSource& source, Rng& rng) {
  const Index k = source.num_arms();
  const long per_arm = n / k;
  if (per_arm < 1) throw std::invalid_argument("budget too small for unif");
  std::vector<ArmEstimator> est(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    for (long t = 0; t < per_arm; ++t) {
      est[static_cast<std::size_t>(i)].add(source.sample(i, rng));
    }
  }
  Outcome out;
  out.identified = argmax_mean(est);
  out.pulls.assign(static_cast<std::size_t>(k), per_arm);
  out.total_pulls = per_arm * k;
  return out;
}

namespace {

Outcome gap_index_run(long n, const RewardSource& source,
                      const BaselineConfig& config, Rng& rng, bool variance_adaptive) {
  const Index k = source.num_arms();
  const long init_pulls = variance_adaptive ? 2 : 1;
  if (n < init_pulls * k) {
    throw std::invalid_argument("budget too small for gap-index baseline");
  }
  const double a = exploration_scale(config, n, k);

  std::vector<ArmEstimator> est(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    for (long t = 0; t < init_pulls; ++t) {
      est[static_cast<std::size_t>(i)].add(source.sample(i, rng));
    }
  }

  for (long round = init_pulls * k; round < n; ++round) {
    const Index leader = argmax_mean(est);
    double second = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < k; ++i) {
      if (i != leader) second = std::max(second, est[static_cast<std::size_t>(i)].mean);
    }
    Index pick = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < k; ++i) {
      const ArmEstimator& e = est[static_cast<std::size_t>(i)];
      const double gap =
          i == leader ? est[static_cast<std::size_t>(leader)].mean - second
                      : est[static_cast<std::size_t>(leader)].mean - e.mean;
      const double idx = variance_adaptive
                             ? gapev_index(gap, e.variance(), a, config.b, e.count)
                             : gape_index(gap, config.b, a, e.count);
      if (i == 0 || idx > best_index) {
        best_index = idx;
        pick = i;
      }
    }
    est[static_cast<std::size_t>(pick)].add(source.sample(pick, rng));
  }

  Outcome out;
  out.identified = argmax_mean(est);
  out.total_pulls = n;
  for (const auto& e : est) out.pulls.push_back(e.count);
  return out;
}

}  // namespace

Outcome gape_run(long n, const RewardSource& source, const BaselineConfig& config,
                 Rng& rng) {
  return gap_index_run(n, source, config, rng, /*variance_adaptive=*/false);
}

Outcome gapev_run(long n, const RewardSource& source, const BaselineConfig& config,
                  Rng& rng) {
  return gap_index_run(n, source, config, rng, /*variance_adaptive=*/true);
}

Outcome vbr_run(long n, const RewardSource& source, double gamma, Rng& rng) {
  const Index k = source.num_arms();
  if (n < k * (k + 1) / 2) {
    throw std::invalid_argument("budget too small for vbr");
  }

  // Successive-rejects schedule: per-arm cumulative targets from the
  // log-bar normalizer; one arm rejected per stage.
  double log_bar = 0.5;
  for (Index i = 2; i <= k; ++i) log_bar += 1.0 / static_cast<double>(i);
  std::vector<long> cumulative(static_cast<std::size_t>(k), 0);
  for (Index stage = 1; stage <= k - 1; ++stage) {
    cumulative[static_cast<std::size_t>(stage)] = static_cast<long>(std::ceil(
        static_cast<double>(n - k) / (log_bar * static_cast<double>(k + 1 - stage))));
  }

  std::vector<Index> active(static_cast<std::size_t>(k));
  std::iota(active.begin(), active.end(), Index{0});
  std::vector<ArmEstimator> est(static_cast<std::size_t>(k));
  long spent = 0;

  Outcome out;
  for (Index stage = 1; stage <= k - 1; ++stage) {
    const auto size = static_cast<long>(active.size());
    const long per_arm = std::max<long>(
        1, cumulative[static_cast<std::size_t>(stage)] -
               cumulative[static_cast<std::size_t>(stage - 1)]);
    // Later stages must still afford one pull per surviving arm.
    long reserved = 0;
    for (long remaining_size = size - 1; remaining_size >= 2; --remaining_size) {
      reserved += remaining_size;
    }
    const long budget = std::min(per_arm * size, n - spent - reserved);

    // Allocation proportional to an optimistic variance estimate; the
    // raw empirical variance can collapse on a couple of lucky draws and
    // starve an arm for the rest of the stage.
    constexpr double kVarDelta = 0.05;
    const long ucb_min_count = forced_pulls_per_arm(kVarDelta);

    std::vector<long> stage_pulls(active.size(), 0);
    for (long t = 0; t < budget; ++t) {
      // Floor one pull per arm per stage, then round robin over the arms
      // whose variance UCB is not yet defined, then the highest UCB/count.
      std::size_t pick = 0;
      int best_tier = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t pos = 0; pos < active.size(); ++pos) {
        const ArmEstimator& e = est[static_cast<std::size_t>(active[pos])];
        int tier;
        double score;
        if (stage_pulls[pos] == 0) {
          tier = 2;
          score = 0.0;
        } else if (e.count < ucb_min_count) {
          tier = 1;
          score = -static_cast<double>(e.count);
        } else {
          tier = 0;
          score = variance_ucb(e, kVarDelta).value / static_cast<double>(e.count);
        }
        if (tier > best_tier || (tier == best_tier && score > best_score)) {
          best_tier = tier;
          best_score = score;
          pick = pos;
        }
      }
      const Index arm = active[pick];
      est[static_cast<std::size_t>(arm)].add(source.sample(arm, rng));
      ++stage_pulls[pick];
      ++spent;
    }

    // Reject the arm with the lowest gamma-width upper confidence value.
    std::size_t reject = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < active.size(); ++pos) {
      const ArmEstimator& e = est[static_cast<std::size_t>(active[pos])];
      const double sd = e.count >= 2 ? std::sqrt(e.variance()) : 0.0;
      const double ucb = e.mean + gamma * sd / std::sqrt(static_cast<double>(e.count));
      if (ucb < worst) {
        worst = ucb;
        reject = pos;
      }
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(reject));
  }

  out.identified = active.front();
  out.total_pulls = spent;
  for (const auto& e : est) out.pulls.push_back(e.count);
  return out;
}

}  // namespace baselines
}  // namespace varbai
