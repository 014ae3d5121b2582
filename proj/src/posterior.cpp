#include "rwre/posterior.hpp"

#include <cmath>
#include <stdexcept>

namespace rwre {

CountVector PosteriorState::counts_at(std::int64_t site) const {
  const auto it = counts_.find(site);
  return it == counts_.end() ? CountVector{} : it->second;
}

void PosteriorState::push(int z) {
  if (z != 1 && z != -1)
    throw std::invalid_argument("increment must be +1 or -1");
  counts_[position_].bump(z);
  position_ += z;
  ++steps_;
}

void PosteriorState::pop(int z) {
  position_ -= z;
  const auto it = counts_.find(position_);
  if (it == counts_.end())
    throw std::logic_error("pop without a matching push");
  it->second.unbump(z);
  if (it->second.zero()) counts_.erase(it);
  --steps_;
}

double step_log_probability(const PosteriorState& state, int z) {
  if (z != 1 && z != -1)
    throw std::invalid_argument("increment must be +1 or -1");
  const CountVector c = state.counts_at(state.position());
  return log_moment(state.law(), c.bumped(z)) - log_moment(state.law(), c);
}

double step_probability(const PosteriorState& state, int z) {
  return std::exp(step_log_probability(state, z));
}

PosteriorState advance(const PosteriorState& state, int z) {
  PosteriorState next = state;
  next.push(z);
  return next;
}

double log_path_weight(const EnvironmentLaw& law, const WalkPath& path) {
  double acc = 0.0;
  for (const auto& [site, counts] : local_time_counts(path))
    acc += log_moment(law, counts);
  return acc;
}

double path_weight(const EnvironmentLaw& law, const WalkPath& path) {
  return std::exp(log_path_weight(law, path));
}

double StepProbCache::log_moment_of(const CountVector& c) {
  const std::uint64_t key = (static_cast<std::uint64_t>(c.right) << 32) |
                            static_cast<std::uint64_t>(c.left);
  const auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  const double value = log_moment(*law_, c);
  memo_.emplace(key, value);
  return value;
}

}  // namespace rwre
