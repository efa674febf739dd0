#include "varbai/instance_gen.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace varbai {
namespace gen {

namespace {
constexpr double kVarianceFloor = 1e-4;
constexpr int kResampleAttempts = 100;
}  // namespace

std::pair<VecX, VecX> synthetic_template(const SyntheticSpec& spec) {
  const Index k = spec.num_arms;
  if (k < 1) throw std::invalid_argument("need at least 1 arm");
  VecX means(k), vars(k);
  for (Index i = 0; i < k; ++i) {
    const long arm = i + 1;  // 1-based, as the parity rule expects
    const double mu =
        1.0 - std::sqrt(static_cast<double>(arm - 1) / static_cast<double>(k));
    means(i) = mu;
    vars(i) = arm % 2 == 0
                  ? spec.even_arm_var_slope * mu * mu + spec.even_arm_var_intercept
                  : spec.odd_arm_var;
  }
  return {std::move(means), std::move(vars)};
}

BanditInstance synthetic_instance(const SyntheticSpec& spec, Rng& rng) {
  auto [base_means, base_vars] = synthetic_template(spec);
  for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
    VecX means = base_means;
    VecX vars = base_vars;
    if (spec.perturb) {
      std::normal_distribution<double> mean_noise(0.0, spec.perturb_mean_sd);
      std::uniform_real_distribution<double> var_noise(spec.perturb_var_low,
                                                       spec.perturb_var_high);
      for (Index i = 0; i < means.size(); ++i) {
        means(i) += mean_noise(rng);
        vars(i) = std::max(vars(i) * var_noise(rng), kVarianceFloor);
      }
    }
    try {
      unique_best_arm(means);
    } catch (const std::invalid_argument&) {
      continue;
    }
    return BanditInstance(std::move(means), std::move(vars));
  }
  throw std::runtime_error("could not draw an instance with a unique best arm");
}

RatingsTable ingest_ratings(const std::string& path, int max_users, int max_movies) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);

  RatingsTable table;
  std::unordered_map<long, int> user_ids, movie_ids;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    long user = 0, movie = 0;
    double rating = 0.0;
    std::size_t p1 = line.find("::");
    std::size_t p2 = p1 == std::string::npos ? p1 : line.find("::", p1 + 2);
    std::size_t p3 = p2 == std::string::npos ? p2 : line.find("::", p2 + 2);
    try {
      if (p3 == std::string::npos) throw std::invalid_argument("bad layout");
      user = std::stol(line.substr(0, p1));
      movie = std::stol(line.substr(p1 + 2, p2 - p1 - 2));
      rating = std::stod(line.substr(p2 + 2, p3 - p2 - 2));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed rating line");
    }

    auto uit = user_ids.find(user);
    if (uit == user_ids.end()) {
      if (max_users > 0 && static_cast<int>(user_ids.size()) >= max_users) continue;
      uit = user_ids.emplace(user, static_cast<int>(user_ids.size())).first;
    }
    auto mit = movie_ids.find(movie);
    if (mit == movie_ids.end()) {
      if (max_movies > 0 && static_cast<int>(movie_ids.size()) >= max_movies) continue;
      mit = movie_ids.emplace(movie, static_cast<int>(movie_ids.size())).first;
    }
    table.ratings.push_back(Rating{uit->second, mit->second, rating});
  }
  if (table.ratings.empty()) {
    throw std::runtime_error(path + ": no ratings found");
  }
  table.num_users = static_cast<int>(user_ids.size());
  table.num_movies = static_cast<int>(movie_ids.size());
  return table;
}

CompletedRatings complete_matrix(const RatingsTable& ratings, const AlsOptions& opts,
                                 Rng& rng) {
  const int n_users = ratings.num_users;
  const int n_movies = ratings.num_movies;
  const int r = opts.rank;

  std::vector<std::vector<std::pair<int, double>>> by_user(
      static_cast<std::size_t>(n_users));
  std::vector<std::vector<std::pair<int, double>>> by_movie(
      static_cast<std::size_t>(n_movies));
  for (const Rating& x : ratings.ratings) {
    by_user[static_cast<std::size_t>(x.user)].emplace_back(x.movie, x.rating);
    by_movie[static_cast<std::size_t>(x.movie)].emplace_back(x.user, x.rating);
  }
  for (int u = 0; u < n_users; ++u) {
    if (by_user[static_cast<std::size_t>(u)].empty()) {
      throw std::invalid_argument("user " + std::to_string(u) + " has no ratings");
    }
  }
  for (int m = 0; m < n_movies; ++m) {
    if (by_movie[static_cast<std::size_t>(m)].empty()) {
      throw std::invalid_argument("movie " + std::to_string(m) + " has no ratings");
    }
  }

  std::uniform_real_distribution<double> init(-opts.init_scale, opts.init_scale);
  MatX users(n_users, r), movies(n_movies, r);
  for (Index i = 0; i < users.size(); ++i) users.data()[i] = init(rng);
  for (Index i = 0; i < movies.size(); ++i) movies.data()[i] = init(rng);

  // Ridge solve for the rows of `out` given the fixed factor `other`.
  auto solve_side = [&](MatX& out,
                        const std::vector<std::vector<std::pair<int, double>>>& obs,
                        const MatX& other) {
    const MatX reg = opts.reg * MatX::Identity(r, r);
    for (std::size_t row = 0; row < obs.size(); ++row) {
      MatX gram = reg;
      VecX rhs = VecX::Zero(r);
      for (const auto& [j, y] : obs[row]) {
        const auto v = other.row(j);
        gram.noalias() += v.transpose() * v;
        rhs.noalias() += v.transpose() * y;
      }
      Eigen::LDLT<MatX> ldlt(gram);
      if (ldlt.info() != Eigen::Success) {
        throw std::runtime_error("singular normal equations in matrix completion");
      }
      out.row(static_cast<Index>(row)) = ldlt.solve(rhs).transpose();
    }
  };

  CompletedRatings result;
  for (int iter = 0; iter < opts.iterations; ++iter) {
    solve_side(users, by_user, movies);
    solve_side(movies, by_movie, users);

    double sq_err = 0.0;
    for (const Rating& x : ratings.ratings) {
      const double pred = users.row(x.user).dot(movies.row(x.movie));
      sq_err += (pred - x.rating) * (pred - x.rating);
    }
    const double loss = sq_err + opts.reg * (users.squaredNorm() + movies.squaredNorm());
    result.loss_history.push_back(loss);
    result.observed_rmse =
        std::sqrt(sq_err / static_cast<double>(ratings.ratings.size()));
  }

  result.matrix.noalias() = users * movies.transpose();
  result.movie_means = result.matrix.colwise().mean();
  result.movie_vars.resize(n_movies);
  for (int m = 0; m < n_movies; ++m) {
    result.movie_vars(m) =
        (result.matrix.col(m).array() - result.movie_means(m)).square().mean();
  }
  return result;
}

void write_completed(const std::string& path, const CompletedRatings& completed) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "varbai-ratings v1\n"
     << "users " << completed.matrix.rows() << " movies " << completed.matrix.cols()
     << '\n';
  for (Index u = 0; u < completed.matrix.rows(); ++u) {
    for (Index m = 0; m < completed.matrix.cols(); ++m) {
      if (m > 0) os << ' ';
      os << completed.matrix(u, m);
    }
    os << '\n';
  }
}

CompletedRatings read_completed(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string magic, version, key1, key2;
  Index n_users = 0, n_movies = 0;
  is >> magic >> version >> key1 >> n_users >> key2 >> n_movies;
  if (magic != "varbai-ratings" || version != "v1" || key1 != "users" ||
      key2 != "movies" || n_users < 1 || n_movies < 1) {
    throw std::runtime_error(path + ": not a varbai-ratings v1 file");
  }
  CompletedRatings out;
  out.matrix.resize(n_users, n_movies);
  for (Index u = 0; u < n_users; ++u) {
    for (Index m = 0; m < n_movies; ++m) {
      if (!(is >> out.matrix(u, m))) {
        throw std::runtime_error(path + ": truncated ratings matrix");
      }
    }
  }
  out.movie_means = out.matrix.colwise().mean();
  out.movie_vars.resize(n_movies);
  for (Index m = 0; m < n_movies; ++m) {
    out.movie_vars(m) =
        (out.matrix.col(m).array() - out.movie_means(m)).square().mean();
  }
  return out;
}

Index nearest_movie(const VecX& means, const VecX& vars, double target_mean,
                    double target_var, const std::vector<bool>& taken) {
  Index best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Index m = 0; m < means.size(); ++m) {
    if (taken[static_cast<std::size_t>(m)]) continue;
    const double dm = means(m) - target_mean;
    const double dv = vars(m) - target_var;
    const double dist = dm * dm + dv * dv;
    if (dist < best_dist) {
      best_dist = dist;
      best = m;
    }
  }
  if (best < 0) throw std::logic_error("no movie left to match");
  return best;
}

std::pair<BanditInstance, RewardSource> movielens_instance(
    const CompletedRatings& completed, const SyntheticSpec& spec, Rng& rng) {
  const Index k = spec.num_arms;
  if (k > completed.matrix.cols()) {
    throw std::invalid_argument("more arms requested than movies available");
  }
  auto [base_means, base_vars] = synthetic_template(spec);
  std::normal_distribution<double> mean_noise(0.0, spec.perturb_mean_sd);
  std::uniform_real_distribution<double> var_noise(spec.perturb_var_low,
                                                   spec.perturb_var_high);

  for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
    std::vector<bool> taken(static_cast<std::size_t>(completed.matrix.cols()), false);
    std::vector<VecX> pools;
    pools.reserve(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
      double target_mean = base_means(i);
      double target_var = base_vars(i);
      if (spec.perturb) {
        target_mean += mean_noise(rng);
        target_var = std::max(target_var * var_noise(rng), kVarianceFloor);
      }
      const Index movie =
          nearest_movie(completed.movie_means, completed.movie_vars, target_mean,
                        target_var, taken);
      taken[static_cast<std::size_t>(movie)] = true;
      pools.push_back(completed.matrix.col(movie));
    }
    try {
      RewardSource source = RewardSource::tabular(std::move(pools));
      BanditInstance instance = source.instance();
      return {std::move(instance), std::move(source)};
    } catch (const std::invalid_argument&) {
      continue;  // non-unique best arm among the matched pools
    }
  }
  throw std::runtime_error("could not match movies with a unique best arm");
}

}  // namespace gen
}  // namespace varbai
