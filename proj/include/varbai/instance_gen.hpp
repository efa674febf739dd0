#pragma once

#include "varbai/bandit.hpp"
#include "varbai/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace varbai {
namespace gen {

/// Synthetic Gaussian family: means 1 - sqrt((i-1)/K) with alternating
/// low/high variances, perturbed per draw.
struct SyntheticSpec {
  Index num_arms = 16;
  double perturb_mean_sd = 0.05;
  double perturb_var_low = 0.5;
  double perturb_var_high = 1.5;
  double even_arm_var_slope = 0.9;
  double even_arm_var_intercept = 0.1;
  double odd_arm_var = 0.1;
  bool perturb = true;
};

/// Unperturbed template means and variances of the family.
std::pair<VecX, VecX> synthetic_template(const SyntheticSpec& spec);

/// Draws a perturbed instance; resamples (up to 100 attempts) until the
/// best arm is unique.
BanditInstance synthetic_instance(const SyntheticSpec& spec, Rng& rng);

struct Rating {
  int user = 0;
  int movie = 0;
  double rating = 0.0;
};

/// Ratings with densely re-indexed user/movie ids.
struct RatingsTable {
  std::vector<Rating> ratings;
  int num_users = 0;
  int num_movies = 0;
};

/// Parses `UserID::MovieID::Rating::Timestamp` lines. `max_users` /
/// `max_movies` (0 = unlimited) keep only the first so many distinct ids
/// in order of appearance.
RatingsTable ingest_ratings(const std::string& path, int max_users = 0,
                            int max_movies = 0);

struct CompletedRatings {
  MatX matrix;  // users x movies
  VecX movie_means;
  VecX movie_vars;  // population variance over users
  std::vector<double> loss_history;  // regularized observed-entry loss per iter
  double observed_rmse = 0.0;
};

struct AlsOptions {
  int rank = 5;
  double reg = 0.1;
  int iterations = 20;
  double init_scale = 0.01;  // factors start uniform(-scale, scale)
};

/// Alternating ridge least squares on the observed entries only.
CompletedRatings complete_matrix(const RatingsTable& ratings, const AlsOptions& opts,
                                 Rng& rng);

void write_completed(const std::string& path, const CompletedRatings& completed);
CompletedRatings read_completed(const std::string& path);

/// Draws synthetic targets and matches each to its nearest distinct movie
/// by (mean, variance) distance; the returned source samples the matched
/// movies' rating columns.
std::pair<BanditInstance, RewardSource> movielens_instance(
    const CompletedRatings& completed, const SyntheticSpec& spec, Rng& rng);

/// Position of the movie minimizing (mean - m)^2 + (var - v)^2 among
/// those not yet taken.
Index nearest_movie(const VecX& means, const VecX& vars, double target_mean,
                    double target_var, const std::vector<bool>& taken);

}  // namespace gen
}  // namespace varbai
