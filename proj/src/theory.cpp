#include "varbai/theory.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace varbai {
namespace theory {

namespace {

double log2k(Index k) { return std::log2(static_cast<double>(k)); }

// Shared algebraic core of the alpha factors:
// (1 - 2 sqrt(x)) / (1 + 2 sqrt(x) + 2 x) with x = log_term / denom.
BoundValue alpha_ratio(double log_term, double denom) {
  if (!(denom > 0.0)) return {0.0, true};
  const double x = log_term / denom;
  const double root = 2.0 * std::sqrt(x);
  const double value = (1.0 - root) / (1.0 + root + 2.0 * x);
  return {value, !(value > 0.0)};
}

}  // namespace

double h2(const BanditInstance& instance) {
  std::vector<double> means(instance.means().data(),
                            instance.means().data() + instance.num_arms());
  std::sort(means.begin(), means.end(), std::greater<double>());
  if (means[0] == means[1]) {
    throw std::invalid_argument("h2 needs a unique best arm");
  }
  double best = 0.0;
  for (std::size_t rank = 2; rank <= means.size(); ++rank) {
    const double gap = means[0] - means[rank - 1];
    best = std::max(best, static_cast<double>(rank) / (gap * gap));
  }
  return best;
}

BoundValue sh_bound(long n, Index num_arms, double h2_value) {
  if (n < 1) throw std::invalid_argument("sh_bound needs n >= 1");
  const double l2k = log2k(num_arms);
  const double value =
      3.0 * l2k * std::exp(-static_cast<double>(n) / (8.0 * h2_value * l2k));
  return {value, value >= 1.0};
}

BoundValue shvar_bound(long n, const BanditInstance& instance) {
  const double l2k = log2k(instance.num_arms());
  const double dmin = instance.delta_min();
  const double value =
      2.0 * l2k *
      std::exp(-static_cast<double>(n) * dmin * dmin /
               (4.0 * l2k * instance.sum_var()));
  return {value, value >= 1.0};
}

BoundValue shvar2_bound(long n, const BanditInstance& instance) {
  const auto k = static_cast<double>(instance.num_arms());
  const double l2k = log2k(instance.num_arms());
  const double dmin = instance.delta_min();
  const double effective = static_cast<double>(n) - k * std::log(k);
  const double value =
      2.0 * l2k *
      std::exp(-effective * dmin * dmin / (4.0 * instance.sigma_max_sq() * k * l2k));
  return {value, effective <= 0.0 || value >= 1.0};
}

BoundValue shadavar_alpha(long n, Index num_arms, double delta) {
  const auto k = static_cast<double>(num_arms);
  const double log_term = std::log(k * static_cast<double>(n) / delta);
  return alpha_ratio(log_term, static_cast<double>(n) / k - 2.0);
}

ShAdaVarBound shadavar_bound(long n, const BanditInstance& instance, double delta) {
  ShAdaVarBound out;
  out.alpha = shadavar_alpha(n, instance.num_arms(), delta);

  const auto k = static_cast<double>(instance.num_arms());
  const double l2k = log2k(instance.num_arms());
  const double log_term = std::log(k * static_cast<double>(n) / delta);
  out.budget_condition_met =
      static_cast<double>(n) >= k * l2k * (4.0 * log_term + 1.0);

  const double dmin = instance.delta_min();
  const double effective = static_cast<double>(n) - k * std::log(k);
  const double exponent =
      -out.alpha.value * effective * dmin * dmin /
      (4.0 * instance.sigma_max_sq() * k * l2k);
  const double value = 2.0 * l2k * std::exp(exponent);
  out.bound = {value, out.alpha.vacuous || effective <= 0.0 || value >= 1.0};
  return out;
}

double pull_lower_bound(Index stage_size, long stage_budget, double sigma_i_sq,
                        double sigma_max_sq, PullBoundMode mode, double delta) {
  const auto k = static_cast<double>(stage_size);
  if (static_cast<double>(stage_budget) < k) {
    throw std::invalid_argument("stage budget must cover the stage size");
  }
  double bound = sigma_i_sq / sigma_max_sq * (static_cast<double>(stage_budget) / k - 1.0);
  if (mode == PullBoundMode::kAdaptive) {
    const double log_term = std::log(1.0 / delta);
    bound *= alpha_ratio(log_term, static_cast<double>(stage_budget) / k - 2.0).value;
  }
  return bound;
}

double gape_complexity(const BanditInstance& instance, double support_bound) {
  const VecX gaps = instance.gaps();
  const double dmin = instance.delta_min();
  double h = 0.0;
  for (Index i = 0; i < instance.num_arms(); ++i) {
    const double gap = i == instance.best_arm() ? dmin : gaps(i);
    h += support_bound * support_bound / (gap * gap);
  }
  return h;
}

double gapev_complexity(const BanditInstance& instance, double support_bound) {
  const VecX gaps = instance.gaps();
  const double dmin = instance.delta_min();
  double h = 0.0;
  for (Index i = 0; i < instance.num_arms(); ++i) {
    const double gap = i == instance.best_arm() ? dmin : gaps(i);
    const double sd = std::sqrt(instance.variance(i));
    const double width =
        sd + std::sqrt(sd * sd + (16.0 / 3.0) * support_bound * gap);
    h += width * width / (gap * gap);
  }
  return h;
}

TheoryReport report(const BanditInstance& instance, long n, double delta) {
  TheoryReport r;
  r.num_arms = instance.num_arms();
  r.n = n;
  r.delta = delta;
  r.h2 = h2(instance);
  r.delta_min = instance.delta_min();
  r.sigma_max_sq = instance.sigma_max_sq();
  r.sum_var = instance.sum_var();
  r.sh = sh_bound(n, instance.num_arms(), r.h2);
  r.shvar = shvar_bound(n, instance);
  r.shvar2 = shvar2_bound(n, instance);
  const ShAdaVarBound ada = shadavar_bound(n, instance, delta);
  r.shadavar = ada.bound;
  r.alpha = ada.alpha;
  r.budget_condition_met = ada.budget_condition_met;
  return r;
}

namespace {

void print_bound(std::ostream& os, const char* label, const BoundValue& b) {
  os << "  " << label << " " << b.value << (b.vacuous ? "  (vacuous)" : "") << '\n';
}

}  // namespace

void print_report(std::ostream& os, const TheoryReport& r) {
  os.precision(10);
  os << "instance: K=" << r.num_arms << "  n=" << r.n << "  delta=" << r.delta
     << '\n'
     << "  H2            " << r.h2 << '\n'
     << "  delta_min     " << r.delta_min << '\n'
     << "  sigma_max^2   " << r.sigma_max_sq << '\n'
     << "  sum sigma^2   " << r.sum_var << '\n';
  print_bound(os, "sh bound      ", r.sh);
  print_bound(os, "shvar bound   ", r.shvar);
  print_bound(os, "shvar2 bound  ", r.shvar2);
  print_bound(os, "shadavar bound ", r.shadavar);
  print_bound(os, "alpha         ", r.alpha);
  os << "  budget condition met: " << (r.budget_condition_met ? "yes" : "no")
     << '\n';
}

void write_report_record(std::ostream& os, const TheoryReport& r) {
  os.precision(17);
  os << "K=" << r.num_arms << "\nn=" << r.n << "\ndelta=" << r.delta
     << "\nh2=" << r.h2 << "\ndelta_min=" << r.delta_min
     << "\nsigma_max_sq=" << r.sigma_max_sq << "\nsum_var=" << r.sum_var
     << "\nsh_bound=" << r.sh.value << "\nsh_vacuous=" << r.sh.vacuous
     << "\nshvar_bound=" << r.shvar.value
     << "\nshvar_vacuous=" << r.shvar.vacuous
     << "\nshvar2_bound=" << r.shvar2.value
     << "\nshvar2_vacuous=" << r.shvar2.vacuous
     << "\nshadavar_bound=" << r.shadavar.value
     << "\nshadavar_vacuous=" << r.shadavar.vacuous
     << "\nalpha=" << r.alpha.value << "\nalpha_vacuous=" << r.alpha.vacuous
     << "\nbudget_condition_met=" << r.budget_condition_met << '\n';
}

}  // namespace theory
}  // namespace varbai
