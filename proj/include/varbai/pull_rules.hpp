#pragma once

#include "varbai/bandit.hpp"
#include "varbai/halving.hpp"
#include "varbai/types.hpp"

#include <optional>
#include <string>
#include <variant>

namespace varbai {

/// High-probability upper bound on a reward variance from chi-square
/// concentration. Defined only when pulls - 1 > 4 log(1/delta).
struct VarianceUpperBound {
  double value = 0.0;
  long pulls_used = 0;
  double delta = 0.0;
};

/// Ideal per-arm pull counts for one stage, proportional to variances.
struct Allocation {
  VecX pulls;  // sums to the stage budget
};

/// lambda_i = sigma_i^2 / sum_j sigma_j^2 * stage_budget.
Allocation ideal_allocation(const VecX& variances, long stage_budget);

/// Chi-square concentration factors (lower, upper): the empirical-to-true
/// variance ratio exceeds the first and stays below the second, each with
/// probability at least 1 - delta.
std::pair<double, double> chi_square_bounds(long n, double delta);

/// sigma_hat^2 / (1 - 2 sqrt(log(1/delta) / N)) with N = count - 1.
VarianceUpperBound variance_ucb(const ArmEstimator& est, double delta);

/// Rounds of forced round robin per arm in the adaptive rule.
long forced_pulls_per_arm(double delta);

// Per-round arm selection. Each returns an arm index from the surviving
// set; ties go to the lowest arm index, and unpulled arms rank first.
Index sh_next(const StageState& stage);
Index shvar_next(const StageState& stage, const VecX& variances);
Index shadavar_next(const StageState& stage, double delta);

class PullRule {
 public:
  static PullRule sh();
  static PullRule shvar(VecX variances);
  static PullRule shadavar(double delta);

  Index next(const StageState& stage) const;
  /// Warning emitted once at stage start when the rule cannot operate as
  /// designed (adaptive rule with a budget too small for forced
  /// exploration falls back to round robin).
  std::optional<std::string> stage_note(const StageState& stage) const;
  std::string name() const;

 private:
  struct Sh {};
  struct ShVar {
    VecX variances;
  };
  struct ShAdaVar {
    double delta;
  };
  using Impl = std::variant<Sh, ShVar, ShAdaVar>;
  explicit PullRule(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

}  // namespace varbai
