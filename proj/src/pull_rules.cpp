#include "varbai/pull_rules.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace varbai {

Allocation ideal_allocation(const VecX& variances, long stage_budget) {
  if (stage_budget < 1) {
    throw std::invalid_argument("stage budget must be at least 1");
  }
  if (variances.size() == 0 || variances.minCoeff() <= 0.0) {
    throw std::invalid_argument("ideal allocation needs positive variances");
  }
  Allocation a;
  a.pulls = variances * (static_cast<double>(stage_budget) / variances.sum());
  return a;
}

std::pair<double, double> chi_square_bounds(long n, double delta) {
  if (n < 1) throw std::invalid_argument("chi_square_bounds needs n >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const double r = std::log(1.0 / delta) / static_cast<double>(n);
  return {1.0 - 2.0 * std::sqrt(r), 1.0 + 2.0 * std::sqrt(r) + 2.0 * r};
}

VarianceUpperBound variance_ucb(const ArmEstimator& est, double delta) {
  const double log_term = std::log(1.0 / delta);
  const long n = est.count - 1;
  if (!(static_cast<double>(n) > 4.0 * log_term)) {
    throw std::domain_error(
        "variance bound undefined: need count - 1 > 4 log(1/delta)");
  }
  const double denom = 1.0 - 2.0 * std::sqrt(log_term / static_cast<double>(n));
  return VarianceUpperBound{est.variance() / denom, est.count, delta};
}

long forced_pulls_per_arm(double delta) {
  return static_cast<long>(std::ceil(4.0 * std::log(1.0 / delta) + 1.0));
}

namespace {

// Argmax over surviving arms with unpulled arms ranked first; all ties go
// to the lower arm index. `score` maps a surviving-list position to a value.
template <class ScoreFn>
Index argmax_arm(const StageState& stage, ScoreFn&& score) {
  Index best_arm = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  bool best_unpulled = false;
  for (std::size_t pos = 0; pos < stage.surviving.size(); ++pos) {
    const Index arm = stage.surviving[pos];
    const bool unpulled = stage.estimators[pos].count == 0;
    const double s = unpulled ? 0.0 : score(pos);
    const bool better =
        best_arm < 0 ||
        (unpulled && (!best_unpulled || arm < best_arm)) ||
        (!unpulled && !best_unpulled &&
         (s > best_score || (s == best_score && arm < best_arm)));
    if (better) {
      best_arm = arm;
      best_score = s;
      best_unpulled = unpulled;
    }
  }
  return best_arm;
}

Index round_robin(const StageState& stage) {
  const auto k = static_cast<std::size_t>((stage.round - 1) %
                                          static_cast<long>(stage.surviving.size()));
  return stage.surviving[k];
}

}  // namespace

Index sh_next(const StageState& stage) { return round_robin(stage); }

Index shvar_next(const StageState& stage, const VecX& variances) {
  return argmax_arm(stage, [&](std::size_t pos) {
    return variances(stage.surviving[pos]) /
           static_cast<double>(stage.estimators[pos].count);
  });
}

Index shadavar_next(const StageState& stage, double delta) {
  const long per_arm = forced_pulls_per_arm(delta);
  const long forced = per_arm * static_cast<long>(stage.surviving.size());
  if (stage.per_stage_budget < forced + 1 || stage.round <= forced) {
    return round_robin(stage);
  }
  const double log_term = std::log(1.0 / delta);
  return argmax_arm(stage, [&](std::size_t pos) {
    const ArmEstimator& est = stage.estimators[pos];
    const long n = est.count - 1;
    const double denom =
        1.0 - 2.0 * std::sqrt(log_term / static_cast<double>(n));
    // The forced phase leaves the bound defined except when 4 log(1/delta)
    // is an exact integer; an undefined bound means maximal optimism.
    if (!(static_cast<double>(n) > 4.0 * log_term) || denom <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    return est.variance() / denom / static_cast<double>(est.count);
  });
}

PullRule PullRule::sh() { return PullRule(Impl{Sh{}}); }

PullRule PullRule::shvar(VecX variances) {
  if (variances.size() == 0 || variances.minCoeff() <= 0.0) {
    throw std::invalid_argument("shvar needs strictly positive variances");
  }
  return PullRule(Impl{ShVar{std::move(variances)}});
}

PullRule PullRule::shadavar(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  return PullRule(Impl{ShAdaVar{delta}});
}

Index PullRule::next(const StageState& stage) const {
  return std::visit(
      [&](const auto& rule) -> Index {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, Sh>) {
          return sh_next(stage);
        } else if constexpr (std::is_same_v<T, ShVar>) {
          return shvar_next(stage, rule.variances);
        } else {
          return shadavar_next(stage, rule.delta);
        }
      },
      impl_);
}

std::optional<std::string> PullRule::stage_note(const StageState& stage) const {
  if (const auto* ada = std::get_if<ShAdaVar>(&impl_)) {
    const long forced = forced_pulls_per_arm(ada->delta) *
                        static_cast<long>(stage.surviving.size());
    if (stage.per_stage_budget < forced + 1) {
      return "stage " + std::to_string(stage.stage_index) +
             ": budget too small for forced exploration (" +
             std::to_string(stage.per_stage_budget) + " < " +
             std::to_string(forced + 1) + "), falling back to round robin";
    }
  }
  return std::nullopt;
}

std::string PullRule::name() const {
  return std::visit(
      [](const auto& rule) -> std::string {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, Sh>) {
          return "sh";
        } else if constexpr (std::is_same_v<T, ShVar>) {
          return "shvar";
        } else {
          return "shadavar";
        }
      },
      impl_);
}

}  // namespace varbai
