#include "rwre/walker.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rwre/io.hpp"
#include "rwre/numerics.hpp"
#include "rwre/rng.hpp"

namespace rwre {

JumpDistribution env_at(const Environment& env, std::int64_t x) {
  const std::uint64_t h =
      hash_combine(env.seed, static_cast<std::uint64_t>(x + env.origin));
  return JumpDistribution{quantile(env.law, to_unit_open(h))};
}

double SiteCache::p_right(std::int64_t x) {
  const auto it = memo_.find(x);
  if (it != memo_.end()) return it->second;
  const double p = env_at(*env_, x).p_right;
  memo_.emplace(x, p);
  return p;
}

double LatticeDistribution::log_prob_at(std::int64_t pos) const {
  const std::int64_t off = pos - min_pos;
  if (off < 0 || off % 2 != 0) return num::neg_inf;
  const Eigen::Index i = static_cast<Eigen::Index>(off / 2);
  if (i >= log_prob.size()) return num::neg_inf;
  return log_prob[i];
}

double LatticeDistribution::prob(std::int64_t pos) const {
  const double lp = log_prob_at(pos);
  return lp == num::neg_inf ? 0.0 : std::exp(lp);
}

double LatticeDistribution::total_mass() const {
  return std::exp(num::log_sum_exp(log_prob));
}

double LatticeDistribution::log_mass_in(double lo, double hi) const {
  num::StreamingLogSumExp acc;
  for (Eigen::Index i = 0; i < log_prob.size(); ++i) {
    const double pos = static_cast<double>(position(i));
    if (pos >= lo && pos <= hi) acc.add(log_prob[i]);
  }
  return acc.value();
}

double LatticeDistribution::mass_in(double lo, double hi) const {
  const double lm = log_mass_in(lo, hi);
  return lm == num::neg_inf ? 0.0 : std::exp(lm);
}

WalkPath simulate_quenched(const Environment& env, std::int64_t n,
                           std::uint64_t rng_seed) {
  if (n < 0) throw std::invalid_argument("step count must be >= 0");
  WalkPath path;
  path.increments.reserve(static_cast<std::size_t>(n));
  SiteCache sites(env);
  Rng rng(rng_seed);
  std::int64_t pos = 0;
  for (std::int64_t t = 0; t < n; ++t) {
    const int z = rng.bernoulli(sites.p_right(pos)) ? 1 : -1;
    path.increments.push_back(z);
    pos += z;
  }
  return path;
}

WalkPath simulate_averaged(const EnvironmentLaw& law, std::int64_t n,
                           std::uint64_t rng_seed) {
  if (n < 0) throw std::invalid_argument("step count must be >= 0");
  WalkPath path;
  path.increments.reserve(static_cast<std::size_t>(n));
  StepProbCache kernel(law);
  std::unordered_map<std::int64_t, CountVector> counts;
  Rng rng(rng_seed);
  std::int64_t pos = 0;
  for (std::int64_t t = 0; t < n; ++t) {
    CountVector& c = counts[pos];
    const double p_plus = std::exp(kernel.log_step_prob(c, +1));
    const int z = rng.bernoulli(p_plus) ? 1 : -1;
    c.bump(z);
    pos += z;
    path.increments.push_back(z);
  }
  return path;
}

LatticeDistribution quenched_distribution(const Environment& env,
                                          std::int64_t n,
                                          std::int64_t radius) {
  if (n < 0) throw std::invalid_argument("step count must be >= 0");
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  const std::int64_t r = radius;
  const std::int64_t width = 2 * r + 1;

  Eigen::ArrayXd logp(width), logq(width);
  for (std::int64_t x = -r; x <= r; ++x) {
    const JumpDistribution j = env_at(env, x);
    logp[x + r] = std::log(j.p_right);
    logq[x + r] = std::log(j.p_left());
  }

  Eigen::ArrayXd cur = Eigen::ArrayXd::Constant(width, num::neg_inf);
  Eigen::ArrayXd nxt = cur;
  cur[r] = 0.0;
  num::StreamingLogSumExp lost;

  for (std::int64_t step = 1; step <= n; ++step) {
    // Mass at the boundary cells that would step outside the radius.
    if (cur[0] != num::neg_inf) lost.add(cur[0] + logq[0]);
    if (cur[width - 1] != num::neg_inf)
      lost.add(cur[width - 1] + logp[width - 1]);
    nxt.setConstant(num::neg_inf);
    const std::int64_t lo = std::max<std::int64_t>(0, r - step);
    const std::int64_t hi = std::min<std::int64_t>(width - 1, r + step);
    for (std::int64_t i = lo; i <= hi; ++i) {
      double acc = num::neg_inf;
      if (i > 0 && cur[i - 1] != num::neg_inf) acc = cur[i - 1] + logp[i - 1];
      if (i < width - 1 && cur[i + 1] != num::neg_inf)
        acc = num::log_sum_exp(acc, cur[i + 1] + logq[i + 1]);
      nxt[i] = acc;
    }
    std::swap(cur, nxt);
  }

  // Compact onto the parity sublattice reachable in n steps.
  const std::int64_t reach = std::min(n, r);
  std::int64_t max_pos = reach;
  if (((max_pos ^ n) & 1) != 0) --max_pos;  // match the parity of n
  LatticeDistribution dist;
  dist.n = n;
  if (max_pos < 0) {
    // radius 0: everything either stays at the origin (n = 0) or escaped
    dist.min_pos = 0;
    dist.log_prob = Eigen::ArrayXd::Constant(1, cur[r]);
  } else {
    dist.min_pos = -max_pos;
    const Eigen::Index m = static_cast<Eigen::Index>(max_pos + 1);
    dist.log_prob.resize(m);
    for (Eigen::Index i = 0; i < m; ++i)
      dist.log_prob[i] = cur[dist.min_pos + 2 * i + r];
  }
  dist.lost_mass = lost.empty() ? 0.0 : std::exp(lost.value());
  return dist;
}

namespace {

struct EndpointAccumulator {
  std::vector<num::StreamingLogSumExp> slot;
};

void enumerate_paths(StepProbCache& kernel, PosteriorState& state, int depth,
                     int n, double log_weight, EndpointAccumulator& acc) {
  if (depth == n) {
    acc.slot[static_cast<std::size_t>(state.position() + n)].add(log_weight);
    return;
  }
  for (int z : {+1, -1}) {
    const double lw =
        kernel.log_step_prob(state.counts_at(state.position()), z);
    state.push(z);
    enumerate_paths(kernel, state, depth + 1, n, log_weight + lw, acc);
    state.pop(z);
  }
}

}  // namespace

LatticeDistribution averaged_distribution(const EnvironmentLaw& law, int n) {
  if (n < 0) throw std::invalid_argument("step count must be >= 0");
  if (n > 24)
    throw std::invalid_argument(
        "averaged_distribution: enumeration budget is n <= 24");
  StepProbCache kernel(law);
  PosteriorState state(law);
  EndpointAccumulator acc;
  acc.slot.resize(static_cast<std::size_t>(2 * n + 1));
  enumerate_paths(kernel, state, 0, n, 0.0, acc);

  LatticeDistribution dist;
  dist.n = n;
  dist.min_pos = -n;
  dist.log_prob.resize(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i)
    dist.log_prob[i] = acc.slot[static_cast<std::size_t>(2 * i)].value();
  return dist;
}

std::string to_csv(const LatticeDistribution& dist, const std::string& meta) {
  std::ostringstream out;
  if (!meta.empty()) out << "# " << meta << "\n";
  out << "position,probability,log_probability\n";
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    out << dist.position(i) << "," << format_double(dist.prob(dist.position(i)))
        << "," << format_double(dist.log_prob[i]) << "\n";
  }
  return out.str();
}

}  // namespace rwre
