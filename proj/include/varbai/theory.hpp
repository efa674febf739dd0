#pragma once

#include "varbai/bandit.hpp"
#include "varbai/types.hpp"

#include <iosfwd>
#include <string>

namespace varbai {
namespace theory {

/// A bound value together with a vacuity flag. Values are never clamped:
/// a bound above 1 (or an alpha factor at or below 0) is reported as is
/// and flagged vacuous.
struct BoundValue {
  double value = 0.0;
  bool vacuous = false;
};

/// Complexity parameter: max over suboptimal ranks i >= 2 (arms sorted by
/// decreasing mean) of i / gap_i^2.
double h2(const BanditInstance& instance);

/// Mistake bound of plain sequential halving:
/// 3 log2(K) exp(-n / (8 H2 log2 K)).
BoundValue sh_bound(long n, Index num_arms, double h2_value);

/// Known-variance bound:
/// 2 log2(K) exp(-n dmin^2 / (4 log2(K) sum_j sigma_j^2)).
BoundValue shvar_bound(long n, const BanditInstance& instance);

/// Alternative known-variance bound through the pull-count floor:
/// 2 log2(K) exp(-(n - K ln K) dmin^2 / (4 sigma_max^2 K log2 K)).
BoundValue shvar2_bound(long n, const BanditInstance& instance);

/// Budget-dependent discount factor of the adaptive bound; approaches 1
/// as n grows. Reported as is (and flagged) when the numerator is not
/// positive.
BoundValue shadavar_alpha(long n, Index num_arms, double delta);

struct ShAdaVarBound {
  BoundValue bound;
  BoundValue alpha;
  bool budget_condition_met = false;  // n >= K log2(K) (4 log(Kn/delta) + 1)
};

/// Adaptive-variance bound: the shvar2 exponent multiplied by alpha.
ShAdaVarBound shadavar_bound(long n, const BanditInstance& instance, double delta);

enum class PullBoundMode { kKnown, kAdaptive };

/// Per-stage pull-count floor: (sigma_i^2 / sigma_max^2)(n_s/k - 1),
/// additionally scaled by the stage alpha factor in adaptive mode.
double pull_lower_bound(Index stage_size, long stage_budget, double sigma_i_sq,
                        double sigma_max_sq, PullBoundMode mode, double delta);

// Complexity inputs handed to the gap-index baselines (computed from the
// true instance, which the experimental protocol grants them).
double gape_complexity(const BanditInstance& instance, double support_bound);
double gapev_complexity(const BanditInstance& instance, double support_bound);

struct TheoryReport {
  Index num_arms = 0;
  long n = 0;
  double delta = 0.0;
  double h2 = 0.0;
  double delta_min = 0.0;
  double sigma_max_sq = 0.0;
  double sum_var = 0.0;
  BoundValue sh;
  BoundValue shvar;
  BoundValue shvar2;
  BoundValue shadavar;
  BoundValue alpha;
  bool budget_condition_met = false;
};

TheoryReport report(const BanditInstance& instance, long n, double delta);

/// Aligned human-readable rendering.
void print_report(std::ostream& os, const TheoryReport& r);
/// Flat key=value record.
void write_report_record(std::ostream& os, const TheoryReport& r);

}  // namespace theory
}  // namespace varbai
