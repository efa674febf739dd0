// Command-line surface for the variance-adaptive best-arm identification
// library: single runs, Monte Carlo sweeps, bound reports, instance
// generation, and the ratings-completion pipeline.

#include "varbai/baselines.hpp"
#include "varbai/bandit.hpp"
#include "varbai/halving.hpp"
#include "varbai/harness.hpp"
#include "varbai/instance_gen.hpp"
#include "varbai/pull_rules.hpp"
#include "varbai/theory.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace varbai;

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

VecX to_vec(const std::vector<double>& v) {
  return Eigen::Map<const VecX>(v.data(), static_cast<Index>(v.size()));
}

BanditInstance load_or_parse_instance(const std::string& instance_path,
                                      const std::string& means_csv,
                                      const std::string& vars_csv) {
  if (!instance_path.empty()) return read_instance_file(instance_path);
  if (means_csv.empty() || vars_csv.empty()) {
    throw CLI::ValidationError(
        "provide either --instance or both --means and --vars");
  }
  return BanditInstance(to_vec(parse_csv_doubles(means_csv)),
                        to_vec(parse_csv_doubles(vars_csv)));
}

struct SweepOptions {
  std::string algs = "unif,sh,shvar,shadavar";
  std::vector<Index> arm_counts = {16};
  std::vector<long> budgets;
  int runs = 5000;
  std::uint64_t seed = 0;
  double delta = 0.05;
  double gamma = 1.96;
  std::string ratings;
  std::string out;
  std::string record;
  bool fixed_instance = false;
  bool no_timing = false;
  int threads = 0;
};

int cmd_sweep(const SweepOptions& opt) {
  harness::ExperimentConfig config;
  std::stringstream ss(opt.algs);
  std::string name;
  while (std::getline(ss, name, ',')) config.algorithms.push_back(name);
  config.arm_counts = opt.arm_counts;
  config.budgets = opt.budgets;
  config.runs = opt.runs;
  config.base_seed = opt.seed;
  config.params.delta = opt.delta;
  config.params.gamma = opt.gamma;
  config.completed_ratings_path = opt.ratings;
  config.fixed_instance = opt.fixed_instance;
  config.record_timing = !opt.no_timing;
  config.threads = opt.threads;

  const harness::SweepTable table = harness::sweep(config);
  if (opt.out.empty()) {
    harness::write_csv(std::cout, table);
  } else {
    std::ofstream os(opt.out);
    if (!os) throw std::runtime_error("cannot open " + opt.out + " for writing");
    harness::write_csv(os, table);
  }
  if (!opt.record.empty()) {
    std::ofstream os(opt.record);
    if (!os) throw std::runtime_error("cannot open " + opt.record + " for writing");
    harness::write_config_record(os, config);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-budget best-arm identification with heterogeneous "
               "reward variances"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Run one algorithm once and "
                                 "print the identified arm and stage trace");
  std::string sim_alg = "shvar";
  std::string sim_instance, sim_means, sim_vars, sim_trace;
  Index sim_k = 16;
  long sim_n = 1000;
  std::uint64_t sim_seed = 0;
  double sim_delta = 0.05, sim_gamma = 1.96;
  bool sim_no_perturb = false;
  sim->add_option("--alg", sim_alg, "Algorithm name")->default_val("shvar");
  sim->add_option("--instance", sim_instance, "Instance file (means/variances)");
  sim->add_option("--means", sim_means, "Comma-separated means");
  sim->add_option("--vars", sim_vars, "Comma-separated variances");
  sim->add_option("--K", sim_k, "Arms for a generated synthetic instance");
  sim->add_option("--n", sim_n, "Pull budget (leftover n - m*floor(n/m) is "
                  "discarded by the halving loop)");
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--delta", sim_delta, "Failure probability of the adaptive "
                  "variance bounds")->default_val(0.05);
  sim->add_option("--gamma", sim_gamma, "Confidence width of vbr")
      ->default_val(1.96);
  sim->add_option("--trace", sim_trace, "Write one line per pull to this file");
  sim->add_flag("--no-perturb", sim_no_perturb, "Disable instance perturbation");

  // --- sweep ------------------------------------------------------------
  auto* sw = app.add_subcommand("sweep", "Monte Carlo sweep over algorithms, "
                                "arm counts, and budgets; emits a CSV table");
  SweepOptions sweep_opt;
  sw->set_config("--config", "", "Flat key=value config file; command-line "
                 "flags override file values");
  sw->add_option("--algs", sweep_opt.algs, "Comma-separated algorithm names")
      ->default_val("unif,sh,shvar,shadavar");
  sw->add_option("--K", sweep_opt.arm_counts, "Arm counts")->delimiter(',');
  sw->add_option("--n", sweep_opt.budgets, "Budgets")->delimiter(',')->required();
  sw->add_option("--runs", sweep_opt.runs, "Runs per cell")->default_val(5000);
  sw->add_option("--seed", sweep_opt.seed, "Base seed; fully determines output");
  sw->add_option("--delta", sweep_opt.delta, "Adaptive-rule failure probability")
      ->default_val(0.05);
  sw->add_option("--gamma", sweep_opt.gamma, "vbr confidence width")
      ->default_val(1.96);
  sw->add_option("--ratings", sweep_opt.ratings,
                 "Completed-ratings artifact; switches to tabular instances");
  sw->add_option("--out", sweep_opt.out, "Output CSV path (default stdout)");
  sw->add_option("--record", sweep_opt.record, "Write the full config here");
  sw->add_flag("--fixed-instance", sweep_opt.fixed_instance,
               "Reuse one instance draw for every run (debugging)");
  sw->add_flag("--no-timing", sweep_opt.no_timing,
               "Zero the runtime column for byte-reproducible output");
  sw->add_option("--threads", sweep_opt.threads,
                 "Run-level parallelism (0 = all cores)");

  // --- bounds -----------------------------------------------------------
  auto* bd = app.add_subcommand("bounds", "Evaluate every mistake bound for "
                                "an instance");
  std::string bd_instance, bd_means, bd_vars, bd_record;
  long bd_n = 1000;
  double bd_delta = 0.05;
  bd->add_option("--instance", bd_instance, "Instance file");
  bd->add_option("--means", bd_means, "Comma-separated means");
  bd->add_option("--vars", bd_vars, "Comma-separated variances");
  bd->add_option("--n", bd_n, "Budget")->required();
  bd->add_option("--delta", bd_delta, "Failure probability")->default_val(0.05);
  bd->add_option("--record", bd_record, "Write a key=value record here");

  // --- gen-instance -----------------------------------------------------
  auto* gi = app.add_subcommand("gen-instance", "Draw a synthetic instance "
                                "and write it to a file");
  Index gi_k = 16;
  std::uint64_t gi_seed = 0;
  std::string gi_out;
  bool gi_no_perturb = false;
  gi->add_option("--K", gi_k, "Number of arms")->default_val(16);
  gi->add_option("--seed", gi_seed, "Random seed");
  gi->add_option("--out", gi_out, "Output path (default stdout)");
  gi->add_flag("--no-perturb", gi_no_perturb, "Emit the unperturbed template");

  // --- prepare-movielens ------------------------------------------------
  auto* pm = app.add_subcommand("prepare-movielens", "Complete a ratings file "
                                "(UserID::MovieID::Rating::Timestamp) by "
                                "low-rank alternating least squares");
  std::string pm_in, pm_out;
  int pm_max_users = 0, pm_max_movies = 0, pm_rank = 5, pm_iters = 20;
  double pm_reg = 0.1;
  std::uint64_t pm_seed = 0;
  pm->add_option("--ratings", pm_in, "Input ratings file")->required();
  pm->add_option("--out", pm_out, "Output completed-ratings artifact")->required();
  pm->add_option("--max-users", pm_max_users, "Keep only the first N users (0 = all)");
  pm->add_option("--max-movies", pm_max_movies, "Keep only the first N movies (0 = all)");
  pm->add_option("--rank", pm_rank, "Factorization rank")->default_val(5);
  pm->add_option("--reg", pm_reg, "Ridge regularization")->default_val(0.1);
  pm->add_option("--iters", pm_iters, "ALS iterations")->default_val(20);
  pm->add_option("--seed", pm_seed, "Factor initialization seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      if (!harness::is_algorithm(sim_alg)) {
        throw std::runtime_error("unknown algorithm: " + sim_alg);
      }
      BanditInstance instance = [&] {
        if (!sim_instance.empty() || !sim_means.empty()) {
          return load_or_parse_instance(sim_instance, sim_means, sim_vars);
        }
        gen::SyntheticSpec spec;
        spec.num_arms = sim_k;
        spec.perturb = !sim_no_perturb;
        Rng rng = make_rng(mix_seed(sim_seed, fnv1a("instance")));
        return gen::synthetic_instance(spec, rng);
      }();
      RewardSource source = RewardSource::gaussian(instance);
      Rng rng = make_rng(mix_seed(sim_seed, fnv1a(sim_alg)));
      harness::AlgoParams params{sim_delta, sim_gamma};

      std::ofstream trace_os;
      TraceSink sink = nullptr;
      if (!sim_trace.empty()) {
        trace_os.open(sim_trace);
        if (!trace_os) throw std::runtime_error("cannot open " + sim_trace);
        trace_os.precision(17);
        sink = [&trace_os](const PullRecord& r) {
          trace_os << r.stage << ' ' << r.round << ' ' << r.arm << ' '
                   << r.reward << '\n';
        };
      }

      std::cout.precision(10);
      if (sim_alg == "sh" || sim_alg == "shvar" || sim_alg == "shadavar") {
        const PullRule rule =
            sim_alg == "sh" ? PullRule::sh()
            : sim_alg == "shvar" ? PullRule::shvar(instance.variances())
                                 : PullRule::shadavar(sim_delta);
        const RunResult result = run(sim_n, rule, source, rng, sink);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << "identified " << result.identified << " (best "
                  << instance.best_arm() << "), " << result.total_pulls
                  << " pulls\n";
        for (std::size_t s = 0; s < result.stages.size(); ++s) {
          const StageTrace& st = result.stages[s];
          std::cout << "stage " << s + 1 << ':';
          for (std::size_t i = 0; i < st.surviving.size(); ++i) {
            std::cout << "  arm " << st.surviving[i] << " pulls " << st.pulls[i]
                      << " mean " << st.means[i];
          }
          std::cout << '\n';
        }
      } else {
        const Index identified =
            harness::run_algorithm(sim_alg, instance, source, sim_n, params, rng);
        std::cout << "identified " << identified << " (best "
                  << instance.best_arm() << ")\n";
      }
      return 0;
    }

    if (sw->parsed()) return cmd_sweep(sweep_opt);

    if (bd->parsed()) {
      const BanditInstance instance =
          load_or_parse_instance(bd_instance, bd_means, bd_vars);
      const theory::TheoryReport report = theory::report(instance, bd_n, bd_delta);
      theory::print_report(std::cout, report);
      if (!bd_record.empty()) {
        std::ofstream os(bd_record);
        if (!os) throw std::runtime_error("cannot open " + bd_record);
        theory::write_report_record(os, report);
      }
      return 0;
    }

    if (gi->parsed()) {
      gen::SyntheticSpec spec;
      spec.num_arms = gi_k;
      spec.perturb = !gi_no_perturb;
      Rng rng = make_rng(mix_seed(gi_seed, fnv1a("instance")));
      const BanditInstance instance = gen::synthetic_instance(spec, rng);
      if (gi_out.empty()) {
        write_instance(std::cout, instance);
      } else {
        write_instance_file(gi_out, instance);
      }
      return 0;
    }

    if (pm->parsed()) {
      const gen::RatingsTable table =
          gen::ingest_ratings(pm_in, pm_max_users, pm_max_movies);
      std::cerr << "ingested " << table.ratings.size() << " ratings ("
                << table.num_users << " users, " << table.num_movies
                << " movies)\n";
      gen::AlsOptions opts;
      opts.rank = pm_rank;
      opts.reg = pm_reg;
      opts.iterations = pm_iters;
      Rng rng = make_rng(mix_seed(pm_seed, fnv1a("als")));
      const gen::CompletedRatings completed = gen::complete_matrix(table, opts, rng);
      std::cerr << "completed matrix, observed-entry RMSE "
                << completed.observed_rmse << '\n';
      gen::write_completed(pm_out, completed);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
