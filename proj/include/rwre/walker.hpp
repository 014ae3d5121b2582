#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "rwre/env_law.hpp"
#include "rwre/posterior.hpp"
#include "rwre/walk_path.hpp"

namespace rwre {

// A realized environment: site x's jump distribution is a pure function of
// (seed, x + origin), drawn from `law` by inverse transform of a
// counter-based hash. No storage, so one seed reproduces an unbounded
// environment in any query order.
struct Environment {
  EnvironmentLaw law;
  std::uint64_t seed{0};
  std::int64_t origin{0};

  // The environment shifted by s: site x reads the base environment at x+s.
  Environment shifted(std::int64_t s) const {
    Environment e = *this;
    e.origin += s;
    return e;
  }
};

JumpDistribution env_at(const Environment& env, std::int64_t x);

// Memoized env_at for simulation loops; one instance per worker.
class SiteCache {
 public:
  explicit SiteCache(const Environment& env) : env_(&env) {}
  double p_right(std::int64_t x);

 private:
  const Environment* env_;
  std::unordered_map<std::int64_t, double> memo_;
};

// Exact law of S_n, stored in log space on the parity sublattice
// {min_pos, min_pos+2, ...}. lost_mass is the probability truncated at the
// DP radius (0 when radius >= n).
struct LatticeDistribution {
  std::int64_t n{0};
  std::int64_t min_pos{0};
  Eigen::ArrayXd log_prob;
  double lost_mass{0.0};

  Eigen::Index size() const { return log_prob.size(); }
  std::int64_t position(Eigen::Index i) const { return min_pos + 2 * i; }
  double log_prob_at(std::int64_t pos) const;
  double prob(std::int64_t pos) const;
  double total_mass() const;
  double log_mass_in(double lo, double hi) const;
  double mass_in(double lo, double hi) const;
};

// One quenched trajectory: step right from x with probability
// env_at(env, x).p_right. Reproducible from (env, n, rng_seed).
WalkPath simulate_quenched(const Environment& env, std::int64_t n,
                           std::uint64_t rng_seed);

// One trajectory of the environment-averaged walk, stepping with the
// sequential-Bayes kernel.
WalkPath simulate_averaged(const EnvironmentLaw& law, std::int64_t n,
                           std::uint64_t rng_seed);

// Exact n-step quenched law by forward dynamic programming on
// [-radius, radius]; mass stepping outside the radius is reported, never
// silently dropped.
LatticeDistribution quenched_distribution(const Environment& env,
                                          std::int64_t n,
                                          std::int64_t radius);

// Exact n-step averaged law by exhaustive path enumeration (n <= 24).
LatticeDistribution averaged_distribution(const EnvironmentLaw& law, int n);

std::string to_csv(const LatticeDistribution& dist,
                   const std::string& meta = "");

}  // namespace rwre
