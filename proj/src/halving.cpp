#include "varbai/halving.hpp"

#include "varbai/pull_rules.hpp"

#include <algorithm>
#include <stdexcept>

namespace varbai {

std::size_t StageState::position_of(Index arm) const {
  for (std::size_t pos = 0; pos < surviving.size(); ++pos) {
    if (surviving[pos] == arm) return pos;
  }
  throw std::logic_error("arm " + std::to_string(arm) + " is not surviving");
}

int num_stages(Index num_arms) {
  if (num_arms < 2) throw std::invalid_argument("need at least 2 arms");
  int m = 0;
  Index k = num_arms;
  while (k > 1) {
    k = (k + 1) / 2;
    ++m;
  }
  return m;
}

std::vector<Index> eliminate(const std::map<Index, double>& means, std::size_t keep) {
  if (keep > means.size()) {
    throw std::invalid_argument("cannot keep more arms than present");
  }
  std::vector<std::pair<Index, double>> ranked(means.begin(), means.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<Index> kept;
  kept.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) kept.push_back(ranked[i].first);
  return kept;
}

RunResult run(long budget, const PullRule& rule, Index num_arms,
              const SamplerFn& sample, Rng& rng, const TraceSink& trace) {
  const int m = num_stages(num_arms);
  const long stage_budget = budget / m;
  if (stage_budget < num_arms) {
    throw std::invalid_argument(
        "budget too small: per-stage budget " + std::to_string(stage_budget) +
        " cannot pull each of " + std::to_string(num_arms) + " arms once");
  }

  RunResult result;
  StageState state;
  state.surviving.resize(static_cast<std::size_t>(num_arms));
  for (Index i = 0; i < num_arms; ++i) {
    state.surviving[static_cast<std::size_t>(i)] = i;
  }

  for (int s = 1; s <= m; ++s) {
    state.stage_index = s;
    state.per_stage_budget = stage_budget;
    state.round = 1;
    state.estimators.assign(state.surviving.size(), ArmEstimator{});
    if (auto note = rule.stage_note(state)) result.warnings.push_back(*note);

    for (long t = 1; t <= stage_budget; ++t) {
      state.round = t;
      const Index arm = rule.next(state);
      const double reward = sample(arm, rng);
      state.estimators[state.position_of(arm)].add(reward);
      if (trace) trace(PullRecord{s, t, arm, reward});
    }
    result.total_pulls += stage_budget;

    StageTrace st;
    st.surviving = state.surviving;
    std::map<Index, double> stage_means;
    for (std::size_t pos = 0; pos < state.surviving.size(); ++pos) {
      const ArmEstimator& est = state.estimators[pos];
      if (est.count == 0) {
        throw std::runtime_error("arm " + std::to_string(state.surviving[pos]) +
                                 " received zero pulls in stage " +
                                 std::to_string(s));
      }
      st.pulls.push_back(est.count);
      st.means.push_back(est.mean);
      stage_means[state.surviving[pos]] = est.mean;
    }
    result.stages.push_back(std::move(st));

    const std::size_t keep = (state.surviving.size() + 1) / 2;
    state.surviving = eliminate(stage_means, keep);
  }

  if (state.surviving.size() != 1) {
    throw std::logic_error("halving did not converge to a single arm");
  }
  result.identified = state.surviving.front();
  return result;
}

RunResult run(long budget, const PullRule& rule, const RewardSource& source,
              Rng& rng, const TraceSink& trace) {
  return run(
      budget, rule, source.num_arms(),
      [&source](Index arm, Rng& r) { return source.sample(arm, r); }, rng, trace);
}

}  // namespace varbai
