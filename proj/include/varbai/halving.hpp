#pragma once

#include "varbai/bandit.hpp"
#include "varbai/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace varbai {

class PullRule;

/// Per-stage state of the sequential-halving loop. Estimators hold only
/// observations from the current stage and are reset at stage boundaries.
struct StageState {
  int stage_index = 1;          // 1-based
  std::vector<Index> surviving; // ordered
  long per_stage_budget = 0;
  long round = 1;               // 1-based round t about to be played
  std::vector<ArmEstimator> estimators;  // parallel to `surviving`

  std::size_t position_of(Index arm) const;
  long pulls(std::size_t pos) const { return estimators[pos].count; }
};

struct StageTrace {
  std::vector<Index> surviving;
  std::vector<long> pulls;
  std::vector<double> means;
};

struct RunResult {
  Index identified = -1;
  std::vector<StageTrace> stages;
  long total_pulls = 0;
  std::vector<std::string> warnings;
};

/// Number of halving stages for K arms.
int num_stages(Index num_arms);

/// Keeps the `keep` arms with the highest stage means, sorted by mean
/// descending, ties broken by lower arm index. Errors on an unpulled arm.
std::vector<Index> eliminate(const std::map<Index, double>& means, std::size_t keep);

using SamplerFn = std::function<double(Index arm, Rng& rng)>;
using TraceSink = std::function<void(const PullRecord&)>;

/// Runs the full halving loop: ceil(log2 K) stages, floor(n/m) pulls per
/// stage delegated to `rule`, worse half eliminated on stage means.
RunResult run(long budget, const PullRule& rule, Index num_arms,
              const SamplerFn& sample, Rng& rng, const TraceSink& trace = nullptr);

RunResult run(long budget, const PullRule& rule, const RewardSource& source,
              Rng& rng, const TraceSink& trace = nullptr);

}  // namespace varbai
