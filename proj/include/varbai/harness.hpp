#pragma once

#include "varbai/bandit.hpp"
#include "varbai/instance_gen.hpp"
#include "varbai/types.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace varbai {
namespace harness {

/// Algorithm parameters shared across the registry. The gap-index
/// baselines derive their oracle inputs (b, H) from the true instance.
struct AlgoParams {
  double delta = 0.05;
  double gamma = 1.96;
};

const std::vector<std::string>& algorithm_names();
bool is_algorithm(const std::string& name);

/// Runs one algorithm once; returns the identified arm.
Index run_algorithm(const std::string& name, const BanditInstance& instance,
                    const RewardSource& source, long n, const AlgoParams& params,
                    Rng& rng);

/// Produces the (instance, source) pair for one run index. Must be a
/// deterministic function of the rng state so instances pair across
/// algorithms.
using InstanceMaker =
    std::function<std::pair<BanditInstance, RewardSource>(Rng& rng)>;

InstanceMaker synthetic_maker(const gen::SyntheticSpec& spec);
InstanceMaker movielens_maker(const gen::CompletedRatings& completed,
                              const gen::SyntheticSpec& spec);

struct SweepRow {
  std::string algorithm;
  Index num_arms = 0;
  long n = 0;
  int runs = 0;
  long mistakes = 0;
  double mistake_prob = 0.0;
  double std_err = 0.0;
  double mean_runtime_ms = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

struct ExperimentConfig {
  std::vector<std::string> algorithms;
  gen::SyntheticSpec synthetic;
  std::string completed_ratings_path;  // empty = synthetic instances
  std::vector<Index> arm_counts;
  std::vector<long> budgets;
  int runs = 5000;
  std::uint64_t base_seed = 0;
  AlgoParams params;
  bool fixed_instance = false;  // one instance draw reused for every run
  bool record_timing = true;    // timing column is zeroed when false
  int threads = 0;              // 0 = hardware concurrency
};

/// Seed of the instance stream for run index `run`; shared by all
/// algorithms so they face the same instance (paired protocol). Reward
/// streams are keyed by the algorithm name on top of this.
std::uint64_t instance_seed(std::uint64_t base_seed, Index num_arms, int run);
std::uint64_t reward_seed(std::uint64_t base_seed, Index num_arms, int run,
                          const std::string& algorithm);

/// Monte Carlo estimate of the mistake probability for one grid cell.
/// `observer`, when set, receives every (run index, instance, source,
/// identified arm).
using CellObserver = std::function<void(int run, const BanditInstance&,
                                        const RewardSource&, Index identified)>;

SweepRow run_cell(const std::string& algorithm, const InstanceMaker& maker,
                  Index num_arms, long n, int runs, std::uint64_t base_seed,
                  const AlgoParams& params, bool fixed_instance = false,
                  bool record_timing = true, int threads = 1,
                  const CellObserver& observer = nullptr);

SweepTable sweep(const ExperimentConfig& config);

/// Fixed-header CSV, numbers at 10 significant digits.
void write_csv(std::ostream& os, const SweepTable& table);
std::string to_csv(const SweepTable& table);
/// Flat key=value provenance record of the config.
void write_config_record(std::ostream& os, const ExperimentConfig& config);

}  // namespace harness
}  // namespace varbai
