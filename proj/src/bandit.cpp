#include "varbai/bandit.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace varbai {

namespace {

void check_shapes(const VecX& means, const VecX& variances, Index min_arms) {
  if (means.size() != variances.size()) {
    throw std::invalid_argument("means and variances must have the same length");
  }
  if (means.size() < min_arms) {
    throw std::invalid_argument("an instance needs at least " +
                                std::to_string(min_arms) + " arms");
  }
}

}  // namespace

Index unique_best_arm(const VecX& means) {
  Index best = 0;
  means.maxCoeff(&best);
  const double top = means(best);
  int hits = 0;
  for (Index i = 0; i < means.size(); ++i) {
    if (means(i) == top) ++hits;
  }
  if (hits != 1) {
    throw std::invalid_argument("instance has no unique best arm");
  }
  return best;
}

BanditInstance::BanditInstance(VecX means, VecX variances) {
  check_shapes(means, variances, 2);
  for (Index i = 0; i < variances.size(); ++i) {
    if (!(variances(i) > 0.0)) {
      throw std::invalid_argument("arm " + std::to_string(i) +
                                  " has non-positive variance");
    }
  }
  best_arm_ = unique_best_arm(means);
  means_ = std::move(means);
  variances_ = std::move(variances);
}

BanditInstance BanditInstance::unchecked(VecX means, VecX variances) {
  check_shapes(means, variances, 1);
  BanditInstance inst;
  inst.best_arm_ = unique_best_arm(means);
  inst.means_ = std::move(means);
  inst.variances_ = std::move(variances);
  return inst;
}

VecX BanditInstance::gaps() const {
  return VecX::Constant(means_.size(), means_(best_arm_)) - means_;
}

double BanditInstance::delta_min() const {
  double dmin = std::numeric_limits<double>::infinity();
  const double top = means_(best_arm_);
  for (Index i = 0; i < means_.size(); ++i) {
    if (i == best_arm_) continue;
    dmin = std::min(dmin, top - means_(i));
  }
  return dmin;
}

std::uint64_t BanditInstance::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const VecX& v) {
    for (Index i = 0; i < v.size(); ++i) {
      std::uint64_t bits;
      double x = v(i);
      std::memcpy(&bits, &x, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 0x100000001b3ULL;
      }
    }
  };
  feed(means_);
  feed(variances_);
  return h;
}

RewardSource RewardSource::gaussian(BanditInstance instance) {
  return RewardSource(Gaussian{std::move(instance)});
}

RewardSource RewardSource::tabular(std::vector<VecX> pools) {
  if (pools.empty()) {
    throw std::invalid_argument("tabular source needs at least one pool");
  }
  const Index k = static_cast<Index>(pools.size());
  VecX means(k), vars(k);
  for (Index i = 0; i < k; ++i) {
    const VecX& pool = pools[static_cast<std::size_t>(i)];
    if (pool.size() == 0) {
      throw std::invalid_argument("arm " + std::to_string(i) + " has an empty pool");
    }
    const double m = pool.mean();
    means(i) = m;
    // Population variance: the pool is the full reward distribution.
    vars(i) = (pool.array() - m).square().mean();
  }
  BanditInstance eff = BanditInstance::unchecked(std::move(means), std::move(vars));
  return RewardSource(Tabular{std::move(pools), std::move(eff)});
}

Index RewardSource::num_arms() const {
  return instance().num_arms();
}

bool RewardSource::is_tabular() const {
  return std::holds_alternative<Tabular>(impl_);
}

const BanditInstance& RewardSource::instance() const {
  if (const auto* g = std::get_if<Gaussian>(&impl_)) return g->instance;
  return std::get<Tabular>(impl_).effective;
}

double RewardSource::sample(Index arm, Rng& rng) const {
  if (arm < 0 || arm >= num_arms()) {
    throw std::out_of_range("arm index " + std::to_string(arm) + " out of range");
  }
  if (const auto* g = std::get_if<Gaussian>(&impl_)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return g->instance.mean(arm) +
           std::sqrt(g->instance.variance(arm)) * normal(rng);
  }
  const VecX& pool = std::get<Tabular>(impl_).pools[static_cast<std::size_t>(arm)];
  std::uniform_int_distribution<Index> pick(0, pool.size() - 1);
  return pool(pick(rng));
}

void ArmEstimator::add(double y) {
  ++count;
  const double delta = y - mean;
  mean += delta / static_cast<double>(count);
  sum_sq_dev += delta * (y - mean);
}

double ArmEstimator::variance() const {
  if (count < 2) {
    throw std::logic_error("empirical variance needs at least 2 observations");
  }
  return sum_sq_dev / static_cast<double>(count - 1);
}

ArmEstimator ArmEstimator::merged(const ArmEstimator& a, const ArmEstimator& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  ArmEstimator out;
  out.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  out.mean = a.mean + delta * nb / (na + nb);
  out.sum_sq_dev = a.sum_sq_dev + b.sum_sq_dev + delta * delta * na * nb / (na + nb);
  return out;
}

void write_instance(std::ostream& os, const BanditInstance& instance) {
  os.precision(17);
  os << "means";
  for (Index i = 0; i < instance.num_arms(); ++i) os << ' ' << instance.mean(i);
  os << "\nvariances";
  for (Index i = 0; i < instance.num_arms(); ++i) os << ' ' << instance.variance(i);
  os << '\n';
}

void write_instance_file(const std::string& path, const BanditInstance& instance) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_instance(os, instance);
}

BanditInstance read_instance(std::istream& is) {
  std::vector<double> means, vars;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<double>* target = nullptr;
    if (key == "means") {
      target = &means;
    } else if (key == "variances") {
      target = &vars;
    } else {
      throw std::runtime_error("unknown instance field: " + key);
    }
    double x;
    while (ls >> x) target->push_back(x);
  }
  if (means.empty() || vars.empty()) {
    throw std::runtime_error("instance file missing means or variances");
  }
  VecX m = Eigen::Map<VecX>(means.data(), static_cast<Index>(means.size()));
  VecX v = Eigen::Map<VecX>(vars.data(), static_cast<Index>(vars.size()));
  return BanditInstance(std::move(m), std::move(v));
}

BanditInstance read_instance_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_instance(is);
}

}  // namespace varbai
