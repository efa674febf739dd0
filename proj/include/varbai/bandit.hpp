#pragma once

#include "varbai/types.hpp"

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace varbai {

/// A K-armed problem instance: per-arm reward means and variances.
/// Validated instances have K >= 2, strictly positive variances, and a
/// unique best arm.
class BanditInstance {
 public:
  BanditInstance(VecX means, VecX variances);

  /// Skips the positive-variance check. Test fixtures only.
  static BanditInstance unchecked(VecX means, VecX variances);

  Index num_arms() const { return means_.size(); }
  double mean(Index arm) const { return means_(arm); }
  double variance(Index arm) const { return variances_(arm); }
  const VecX& means() const { return means_; }
  const VecX& variances() const { return variances_; }

  Index best_arm() const { return best_arm_; }
  /// Suboptimality gaps, 0 at the best arm.
  VecX gaps() const;
  /// Smallest positive gap.
  double delta_min() const;
  double sigma_max_sq() const { return variances_.maxCoeff(); }
  double sum_var() const { return variances_.sum(); }

  /// FNV-1a over the raw bytes of means and variances. Used by the
  /// harness to audit instance pairing across algorithms.
  std::uint64_t hash() const;

 private:
  BanditInstance() = default;
  VecX means_;
  VecX variances_;
  Index best_arm_ = 0;
};

/// Checks that the maximum mean is attained exactly once; returns its index.
Index unique_best_arm(const VecX& means);

/// Sampling backend. Gaussian draws mean + sd * z; Tabular draws a
/// uniformly random element of the arm's pool of recorded rewards.
class RewardSource {
 public:
  static RewardSource gaussian(BanditInstance instance);
  static RewardSource tabular(std::vector<VecX> pools);

  Index num_arms() const;
  double sample(Index arm, Rng& rng) const;

  bool is_tabular() const;
  /// The instance the source realizes: the Gaussian parameters, or the
  /// pools' empirical means and (population) variances.
  const BanditInstance& instance() const;

 private:
  struct Gaussian {
    BanditInstance instance;
  };
  struct Tabular {
    std::vector<VecX> pools;
    BanditInstance effective;
  };
  explicit RewardSource(Gaussian g) : impl_(std::move(g)) {}
  explicit RewardSource(Tabular t) : impl_(std::move(t)) {}
  std::variant<Gaussian, Tabular> impl_;
};

/// Streaming mean/variance accumulator (Welford update on the sum of
/// squared deviations).
struct ArmEstimator {
  long count = 0;
  double mean = 0.0;
  double sum_sq_dev = 0.0;

  void add(double y);
  /// Unbiased empirical variance; requires count >= 2.
  double variance() const;
  bool has_variance() const { return count >= 2; }

  static ArmEstimator merged(const ArmEstimator& a, const ArmEstimator& b);
};

struct PullRecord {
  int stage = 0;
  long round = 0;
  Index arm = 0;
  double reward = 0.0;
};

// Instance file format: two lines, `means` and `variances`, each followed
// by K whitespace-separated values at 17 significant digits.
void write_instance(std::ostream& os, const BanditInstance& instance);
void write_instance_file(const std::string& path, const BanditInstance& instance);
BanditInstance read_instance(std::istream& is);
BanditInstance read_instance_file(const std::string& path);

}  // namespace varbai
