#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "varbai/bandit.hpp"

#include <cmath>
#include <sstream>

using namespace varbai;

namespace {

VecX vec(std::initializer_list<double> xs) {
  VecX v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Batch-formula oracle for the streaming estimator.
std::pair<double, double> batch_mean_var(const std::vector<double>& ys) {
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(ys.size());
  double ssd = 0.0;
  for (double y : ys) ssd += (y - mean) * (y - mean);
  return {mean, ssd / static_cast<double>(ys.size() - 1)};
}

}  // namespace

TEST_CASE("instance validation") {
  CHECK_THROWS(BanditInstance(vec({1.0}), vec({1.0})));
  CHECK_THROWS(BanditInstance(vec({1.0, 0.0}), vec({1.0})));
  CHECK_THROWS(BanditInstance(vec({1.0, 0.0}), vec({1.0, 0.0})));
  CHECK_THROWS(BanditInstance(vec({1.0, 1.0, 0.0}), vec({1.0, 1.0, 1.0})));
  const BanditInstance ok(vec({1.0, 0.0}), vec({1.0, 2.0}));
  CHECK(ok.num_arms() == 2);
  CHECK(ok.best_arm() == 0);
}

TEST_CASE("gaps") {
  const BanditInstance a(vec({1.0, 0.5, 0.2}), vec({1.0, 1.0, 1.0}));
  const VecX g = a.gaps();
  CHECK(g(0) == 0.0);
  CHECK(g(1) == doctest::Approx(0.5));
  CHECK(g(2) == doctest::Approx(0.8));
  CHECK(a.delta_min() == doctest::Approx(0.5));

  // Unordered instance: the best arm is computed, not assumed first.
  const BanditInstance b(vec({0.0, 1.0}), vec({1.0, 1.0}));
  CHECK(b.best_arm() == 1);
  CHECK(b.gaps()(0) == doctest::Approx(1.0));
  CHECK(b.gaps()(1) == 0.0);
}

TEST_CASE("gaps of the 1 - sqrt((i-1)/K) family, K=4") {
  VecX means(4);
  for (int i = 1; i <= 4; ++i) means(i - 1) = 1.0 - std::sqrt((i - 1) / 4.0);
  const BanditInstance inst(means, vec({1.0, 1.0, 1.0, 1.0}));
  const VecX g = inst.gaps();
  CHECK(g(0) == 0.0);
  CHECK(g(1) == doctest::Approx(0.5));
  CHECK(g(2) == doctest::Approx(std::sqrt(0.5)));
  CHECK(g(3) == doctest::Approx(std::sqrt(0.75)));
  CHECK(inst.delta_min() == doctest::Approx(0.5));
}

TEST_CASE("estimator examples") {
  ArmEstimator e;
  e.add(4.0);
  CHECK(e.count == 1);
  CHECK(e.mean == 4.0);
  CHECK(e.sum_sq_dev == 0.0);
  CHECK_THROWS(e.variance());

  ArmEstimator two;
  two.add(1.0);
  two.add(3.0);
  CHECK(two.mean == doctest::Approx(2.0));
  CHECK(two.variance() == doctest::Approx(2.0));

  ArmEstimator eight;
  const std::vector<double> ys = {2, 4, 4, 4, 5, 5, 7, 9};
  for (double y : ys) eight.add(y);
  const auto [m, v] = batch_mean_var(ys);
  CHECK(eight.mean == doctest::Approx(m).epsilon(1e-12));
  CHECK(eight.variance() == doctest::Approx(v).epsilon(1e-12));
  CHECK(eight.mean == doctest::Approx(5.0));
  CHECK(eight.variance() == doctest::Approx(32.0 / 7.0));
}

TEST_CASE("estimator matches batch formulas on random streams") {
  Rng rng = make_rng(42);
  std::normal_distribution<double> normal(3.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> ys;
    ArmEstimator e;
    const int len = 2 + static_cast<int>(rng() % 200);
    for (int i = 0; i < len; ++i) {
      const double y = normal(rng);
      ys.push_back(y);
      e.add(y);
    }
    const auto [m, v] = batch_mean_var(ys);
    CHECK(e.mean == doctest::Approx(m).epsilon(1e-12));
    CHECK(e.variance() == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("merged estimators equal the estimator of the concatenation") {
  Rng rng = make_rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    ArmEstimator a, b, all;
    const int la = 1 + static_cast<int>(rng() % 50);
    const int lb = 1 + static_cast<int>(rng() % 50);
    for (int i = 0; i < la; ++i) {
      const double y = normal(rng);
      a.add(y);
      all.add(y);
    }
    for (int i = 0; i < lb; ++i) {
      const double y = normal(rng);
      b.add(y);
      all.add(y);
    }
    const ArmEstimator m = ArmEstimator::merged(a, b);
    CHECK(m.count == all.count);
    CHECK(m.mean == doctest::Approx(all.mean).epsilon(1e-12));
    CHECK(m.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  }
}

TEST_CASE("gaussian sampling") {
  SUBCASE("zero variance is degenerate") {
    const auto inst = BanditInstance::unchecked(vec({5.0, 0.0}), vec({0.0, 1.0}));
    const RewardSource src = RewardSource::gaussian(inst);
    Rng rng = make_rng(1);
    CHECK(src.sample(0, rng) == 5.0);
  }
  SUBCASE("arm out of range") {
    const RewardSource src =
        RewardSource::gaussian(BanditInstance(vec({1.0, 0.0}), vec({1.0, 1.0})));
    Rng rng = make_rng(1);
    CHECK_THROWS(src.sample(2, rng));
    CHECK_THROWS(src.sample(-1, rng));
  }
  SUBCASE("law of large numbers, 1e5 draws") {
    const RewardSource src =
        RewardSource::gaussian(BanditInstance(vec({0.0, -1.0}), vec({1.0, 1.0})));
    Rng rng = make_rng(20240131);
    ArmEstimator e;
    for (int i = 0; i < 100000; ++i) e.add(src.sample(0, rng));
    CHECK(std::abs(e.mean) < 0.02);
    CHECK(std::abs(e.variance() - 1.0) < 0.05);
  }
}

TEST_CASE("tabular sampling") {
  SUBCASE("singleton pool") {
    const RewardSource src = RewardSource::tabular({vec({3.0})});
    Rng rng = make_rng(5);
    CHECK(src.sample(0, rng) == 3.0);
    CHECK(src.instance().mean(0) == 3.0);
  }
  SUBCASE("empty pool rejected") {
    CHECK_THROWS(RewardSource::tabular({VecX()}));
  }
  SUBCASE("empirical mean converges to the pool mean") {
    const VecX pool = vec({1.0, 2.0, 3.0, 4.0, 5.0});
    const RewardSource src = RewardSource::tabular({pool, vec({0.0})});
    CHECK(src.instance().mean(0) == doctest::Approx(3.0));
    CHECK(src.instance().variance(0) == doctest::Approx(2.0));  // population
    Rng rng = make_rng(99);
    ArmEstimator e;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) e.add(src.sample(0, rng));
    // 3-sigma CLT band around the pool mean.
    CHECK(std::abs(e.mean - 3.0) < 3.0 * std::sqrt(2.0 / draws));
  }
}

TEST_CASE("instance file round-trips losslessly") {
  Rng rng = make_rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VecX means(5), vars(5);
  for (Index i = 0; i < 5; ++i) {
    means(i) = u(rng) + static_cast<double>(i) * 1e-9;
    vars(i) = u(rng) + 0.01;
  }
  const BanditInstance inst(means, vars);
  std::stringstream ss;
  write_instance(ss, inst);
  const BanditInstance back = read_instance(ss);
  REQUIRE(back.num_arms() == inst.num_arms());
  for (Index i = 0; i < 5; ++i) {
    CHECK(back.mean(i) == inst.mean(i));
    CHECK(back.variance(i) == inst.variance(i));
  }
}

TEST_CASE("instance file error paths") {
  std::stringstream empty;
  CHECK_THROWS(read_instance(empty));
  std::stringstream bad("means 1 0\nwobble 1 1\n");
  CHECK_THROWS(read_instance(bad));
}
