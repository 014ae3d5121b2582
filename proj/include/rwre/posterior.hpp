#pragma once

#include <cstdint>
#include <unordered_map>

#include "rwre/env_law.hpp"
#include "rwre/walk_path.hpp"

namespace rwre {

// Sequential-Bayes state of the environment-averaged walk: the current
// position plus the per-site jump counts accumulated along the history.
// The law object must outlive the state.
class PosteriorState {
 public:
  explicit PosteriorState(const EnvironmentLaw& law, std::int64_t start = 0)
      : law_(&law), position_(start) {}

  const EnvironmentLaw& law() const { return *law_; }
  std::int64_t position() const { return position_; }
  std::int64_t steps() const { return steps_; }
  CountVector counts_at(std::int64_t site) const;
  const std::unordered_map<std::int64_t, CountVector>& counts() const {
    return counts_;
  }

  // Record a jump z out of the current position / undo the matching push.
  void push(int z);
  void pop(int z);

 private:
  const EnvironmentLaw* law_;
  std::int64_t position_;
  std::int64_t steps_{0};
  std::unordered_map<std::int64_t, CountVector> counts_;
};

// Next-step probability of the averaged walk given the history:
// moment(counts + e_z) / moment(counts) at the current site.
double step_log_probability(const PosteriorState& state, int z);
double step_probability(const PosteriorState& state, int z);

// Pure transition: returns the state after one jump, input unchanged.
PosteriorState advance(const PosteriorState& state, int z);

// Weight of a finite path under the averaged measure: the product over
// visited sites of the law's joint jump-count moments.
double log_path_weight(const EnvironmentLaw& law, const WalkPath& path);
double path_weight(const EnvironmentLaw& law, const WalkPath& path);

// Memoizes per-site log-moments keyed by jump counts. One instance per
// worker thread; the shared law is never mutated.
class StepProbCache {
 public:
  explicit StepProbCache(const EnvironmentLaw& law) : law_(&law) {}

  double log_moment_of(const CountVector& c);
  double log_step_prob(const CountVector& c, int z) {
    return log_moment_of(c.bumped(z)) - log_moment_of(c);
  }

 private:
  const EnvironmentLaw* law_;
  std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace rwre
