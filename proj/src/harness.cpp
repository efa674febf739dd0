#include "varbai/harness.hpp"

#include "varbai/baselines.hpp"
#include "varbai/halving.hpp"
#include "varbai/pull_rules.hpp"
#include "varbai/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace varbai {
namespace harness {

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {
      "unif", "sh", "shvar", "shadavar", "gape", "gapev", "vbr"};
  return names;
}

bool is_algorithm(const std::string& name) {
  const auto& names = algorithm_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Index run_algorithm(const std::string& name, const BanditInstance& instance,
                    const RewardSource& source, long n, const AlgoParams& params,
                    Rng& rng) {
  if (name == "unif") {
    return baselines::unif_run(n, source, rng).identified;
  }
  if (name == "sh") {
    return run(n, PullRule::sh(), source, rng).identified;
  }
  if (name == "shvar") {
    return run(n, PullRule::shvar(instance.variances()), source, rng).identified;
  }
  if (name == "shadavar") {
    return run(n, PullRule::shadavar(params.delta), source, rng).identified;
  }
  if (name == "gape" || name == "gapev") {
    baselines::BaselineConfig config;
    config.b = baselines::compute_support_bound(instance, n);
    config.c = name == "gape" ? 1.0 / 144.0 : 1.0 / 512.0;
    config.c_prime =
        1.0 / (4.0 * std::log2(static_cast<double>(instance.num_arms())));
    config.H = name == "gape" ? theory::gape_complexity(instance, config.b)
                              : theory::gapev_complexity(instance, config.b);
    config.gamma = params.gamma;
    return name == "gape"
               ? baselines::gape_run(n, source, config, rng).identified
               : baselines::gapev_run(n, source, config, rng).identified;
  }
  if (name == "vbr") {
    return baselines::vbr_run(n, source, params.gamma, rng).identified;
  }
  throw std::invalid_argument("unknown algorithm: " + name);
}

InstanceMaker synthetic_maker(const gen::SyntheticSpec& spec) {
  return [spec](Rng& rng) {
    BanditInstance instance = gen::synthetic_instance(spec, rng);
    RewardSource source = RewardSource::gaussian(instance);
    return std::make_pair(std::move(instance), std::move(source));
  };
}

InstanceMaker movielens_maker(const gen::CompletedRatings& completed,
                              const gen::SyntheticSpec& spec) {
  return [&completed, spec](Rng& rng) {
    return gen::movielens_instance(completed, spec, rng);
  };
}

std::uint64_t instance_seed(std::uint64_t base_seed, Index num_arms, int run) {
  return mix_seed(base_seed, fnv1a("instance") ^ static_cast<std::uint64_t>(num_arms),
                  static_cast<std::uint64_t>(run));
}

std::uint64_t reward_seed(std::uint64_t base_seed, Index num_arms, int run,
                          const std::string& algorithm) {
  return mix_seed(base_seed, fnv1a(algorithm) ^ static_cast<std::uint64_t>(num_arms),
                  static_cast<std::uint64_t>(run) | (1ULL << 40));
}

SweepRow run_cell(const std::string& algorithm, const InstanceMaker& maker,
                  Index num_arms, long n, int runs, std::uint64_t base_seed,
                  const AlgoParams& params, bool fixed_instance,
                  bool record_timing, int threads, const CellObserver& observer) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");

  std::optional<std::pair<BanditInstance, RewardSource>> fixed;
  if (fixed_instance) {
    Rng rng = make_rng(instance_seed(base_seed, num_arms, 0));
    fixed = maker(rng);
  }

  std::vector<char> mistakes(static_cast<std::size_t>(runs), 0);
  std::vector<double> elapsed_ms(static_cast<std::size_t>(runs), 0.0);

  auto worker = [&](int begin, int end) {
    for (int run_idx = begin; run_idx < end; ++run_idx) {
      std::optional<std::pair<BanditInstance, RewardSource>> drawn;
      if (!fixed) {
        Rng inst_rng = make_rng(instance_seed(base_seed, num_arms, run_idx));
        drawn = maker(inst_rng);
      }
      const auto& [instance, source] = fixed ? *fixed : *drawn;
      Rng rng = make_rng(reward_seed(base_seed, num_arms, run_idx, algorithm));

      const auto start = std::chrono::steady_clock::now();
      Index identified;
      try {
        identified = run_algorithm(algorithm, instance, source, n, params, rng);
      } catch (const std::exception& e) {
        throw std::runtime_error("run " + std::to_string(run_idx) + " of " +
                                 algorithm + " (K=" + std::to_string(num_arms) +
                                 ", n=" + std::to_string(n) + ") failed: " + e.what());
      }
      if (record_timing) {
        elapsed_ms[static_cast<std::size_t>(run_idx)] =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - start)
                .count();
      }
      if (identified != instance.best_arm()) {
        mistakes[static_cast<std::size_t>(run_idx)] = 1;
      }
      if (observer) observer(run_idx, instance, source, identified);
    }
  };

  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, runs));
  if (n_threads == 1 || observer) {
    worker(0, runs);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (runs + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(runs, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  SweepRow row;
  row.algorithm = algorithm;
  row.num_arms = num_arms;
  row.n = n;
  row.runs = runs;
  row.mistakes = std::accumulate(mistakes.begin(), mistakes.end(), 0L);
  row.mistake_prob = static_cast<double>(row.mistakes) / runs;
  row.std_err = std::sqrt(row.mistake_prob * (1.0 - row.mistake_prob) / runs);
  row.mean_runtime_ms =
      record_timing
          ? std::accumulate(elapsed_ms.begin(), elapsed_ms.end(), 0.0) / runs
          : 0.0;
  return row;
}

SweepTable sweep(const ExperimentConfig& config) {
  if (config.algorithms.empty() || config.arm_counts.empty() ||
      config.budgets.empty()) {
    throw std::invalid_argument("sweep needs algorithms, K values, and n values");
  }
  for (const auto& name : config.algorithms) {
    if (!is_algorithm(name)) {
      throw std::invalid_argument("unknown algorithm: " + name);
    }
  }

  std::optional<gen::CompletedRatings> completed;
  if (!config.completed_ratings_path.empty()) {
    completed = gen::read_completed(config.completed_ratings_path);
  }

  SweepTable table;
  for (const auto& algorithm : config.algorithms) {
    for (Index k : config.arm_counts) {
      gen::SyntheticSpec spec = config.synthetic;
      spec.num_arms = k;
      const InstanceMaker maker = completed
                                      ? movielens_maker(*completed, spec)
                                      : synthetic_maker(spec);
      for (long n : config.budgets) {
        table.rows.push_back(run_cell(algorithm, maker, k, n, config.runs,
                                      config.base_seed, config.params,
                                      config.fixed_instance, config.record_timing,
                                      config.threads));
      }
    }
  }
  return table;
}

namespace {

std::string fmt10(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const SweepTable& table) {
  os << "algorithm,K,n,runs,mistakes,mistake_prob,std_err,mean_runtime_ms\n";
  for (const SweepRow& r : table.rows) {
    os << r.algorithm << ',' << r.num_arms << ',' << r.n << ',' << r.runs << ','
       << r.mistakes << ',' << fmt10(r.mistake_prob) << ',' << fmt10(r.std_err)
       << ',' << fmt10(r.mean_runtime_ms) << '\n';
  }
}

std::string to_csv(const SweepTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

void write_config_record(std::ostream& os, const ExperimentConfig& config) {
  os << "algorithms=";
  for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
    if (i > 0) os << ',';
    os << config.algorithms[i];
  }
  os << "\nK=";
  for (std::size_t i = 0; i < config.arm_counts.size(); ++i) {
    if (i > 0) os << ',';
    os << config.arm_counts[i];
  }
  os << "\nn=";
  for (std::size_t i = 0; i < config.budgets.size(); ++i) {
    if (i > 0) os << ',';
    os << config.budgets[i];
  }
  os << "\nruns=" << config.runs << "\nseed=" << config.base_seed
     << "\ndelta=" << fmt10(config.params.delta)
     << "\ngamma=" << fmt10(config.params.gamma)
     << "\nfixed_instance=" << config.fixed_instance
     << "\nratings=" << config.completed_ratings_path << '\n';
}

}  // namespace harness
}  // namespace varbai
