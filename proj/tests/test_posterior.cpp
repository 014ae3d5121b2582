#include <cmath>
#include <vector>

#include "doctest.h"
#include "rwre/posterior.hpp"
#include "rwre/rng.hpp"

using namespace rwre;

namespace {

const EnvironmentLaw& beta22() {
  static const EnvironmentLaw law = EnvironmentLaw::beta(2.0, 2.0);
  return law;
}

std::vector<EnvironmentLaw> law_corpus() {
  return {EnvironmentLaw::point_mass(0.7),
          EnvironmentLaw::finite_mixture({{0.7, 0.5}, {0.6, 0.5}}),
          EnvironmentLaw::beta(2.0, 2.0),
          EnvironmentLaw::beta(2.0, 2.0, Interval{0.05, 0.95})};
}

WalkPath bits_to_path(unsigned bits, int n) {
  WalkPath path;
  for (int t = 0; t < n; ++t)
    path.increments.push_back((bits >> t) & 1u ? 1 : -1);
  return path;
}

PosteriorState state_after(const EnvironmentLaw& law,
                           const std::vector<int>& moves) {
  PosteriorState state(law);
  for (int z : moves) state.push(z);
  return state;
}

}  // namespace

TEST_CASE("fresh symmetric Beta state steps right with probability 1/2") {
  PosteriorState state(beta22());
  CHECK(step_probability(state, +1) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("Beta conjugacy: counts (3 right, 1 left) give q(+1) = 5/8") {
  // Loop 0->1->0 three times, then dip to -1 and return: the jumps out of
  // the origin are (+1,+1,+1,-1) and the walk ends back at the origin.
  const auto state =
      state_after(beta22(), {1, -1, 1, -1, 1, -1, -1, 1});
  REQUIRE(state.position() == 0);
  REQUIRE(state.counts_at(0) == CountVector{3, 1});
  CHECK(step_probability(state, +1) ==
        doctest::Approx(5.0 / 8.0).epsilon(1e-12));
  CHECK(step_probability(state, -1) ==
        doctest::Approx(3.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("a point-mass law ignores the history") {
  const auto law = EnvironmentLaw::point_mass(0.83);
  const auto state = state_after(law, {1, 1, -1, 1, -1, -1});
  CHECK(step_probability(state, +1) == doctest::Approx(0.83).epsilon(1e-14));
}

TEST_CASE("advance is pure and keeps exact bookkeeping") {
  PosteriorState fresh(beta22());
  const PosteriorState one = advance(fresh, +1);
  CHECK(fresh.steps() == 0);
  CHECK(fresh.counts().empty());
  CHECK(one.position() == 1);
  CHECK(one.counts_at(0) == CountVector{1, 0});

  const PosteriorState two = advance(one, -1);
  CHECK(two.position() == 0);
  CHECK(two.counts_at(0) == CountVector{1, 0});
  CHECK(two.counts_at(1) == CountVector{0, 1});

  const auto three = state_after(beta22(), {1, -1, 1});
  CHECK(three.position() == 1);
  CHECK(three.counts_at(0) == CountVector{2, 0});
  CHECK(three.counts_at(1) == CountVector{0, 1});
  CHECK(three.steps() == 3);

  CHECK_THROWS_AS(advance(fresh, 2), std::invalid_argument);
}

TEST_CASE("push/pop leave no trace") {
  PosteriorState state(beta22());
  state.push(1);
  state.push(-1);
  state.pop(-1);
  state.pop(1);
  CHECK(state.counts().empty());
  CHECK(state.position() == 0);
  CHECK(state.steps() == 0);
}

TEST_CASE("path weights for the worked examples") {
  WalkPath right_right_left{0, {1, 1, -1}};
  CHECK(path_weight(EnvironmentLaw::point_mass(0.7), right_right_left) ==
        doctest::Approx(0.147).epsilon(1e-13));

  // Sites are independent: E[p^2] at the origin and E[q] at site 1.
  WalkPath revisit{0, {1, -1, 1}};
  CHECK(path_weight(beta22(), revisit) ==
        doctest::Approx(0.3 * 0.5).epsilon(1e-12));

  WalkPath two{0, {1, -1}};
  CHECK(path_weight(beta22(), two) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("step probabilities sum to one at reachable states") {
  Rng rng(0x90125);
  for (const auto& law : law_corpus()) {
    PosteriorState state(law);
    for (int t = 0; t < 40; ++t) {
      const double total =
          step_probability(state, +1) + step_probability(state, -1);
      CHECK(std::abs(total - 1.0) <= 1e-12);
      state.push(rng.bernoulli(0.5) ? 1 : -1);
    }
  }
}

TEST_CASE("chain rule: stepping products equal the site-moment product") {
  Rng rng(0xbead);
  for (const auto& law : law_corpus()) {
    for (int rep = 0; rep < 6; ++rep) {
      const int n = 5 + static_cast<int>(rng.next_u64() % 8);
      const WalkPath path =
          bits_to_path(static_cast<unsigned>(rng.next_u64()), n);
      PosteriorState state(law);
      double log_chain = 0.0;
      for (int z : path.increments) {
        log_chain += step_log_probability(state, z);
        state.push(z);
      }
      const double direct = log_path_weight(law, path);
      CHECK(std::exp(log_chain - direct) ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("total mass over all paths of length 12 is one") {
  const int n = 12;
  for (const auto& law : law_corpus()) {
    double mass = 0.0;
    for (unsigned bits = 0; bits < (1u << n); ++bits)
      mass += path_weight(law, bits_to_path(bits, n));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("weights depend on site counts, not excursion order") {
  // Both paths make one excursion to each neighbor, in opposite orders,
  // producing identical count maps.
  WalkPath right_first{0, {1, -1, -1, 1}};
  WalkPath left_first{0, {-1, 1, 1, -1}};
  REQUIRE(local_time_counts(right_first) == local_time_counts(left_first));
  for (const auto& law : law_corpus()) {
    CHECK(path_weight(law, right_first) == path_weight(law, left_first));
  }
}

TEST_CASE("point-mass weights reduce to the Markov product") {
  const double p = 0.62;
  const auto law = EnvironmentLaw::point_mass(p);
  Rng rng(0x777);
  for (int rep = 0; rep < 5; ++rep) {
    const WalkPath path =
        bits_to_path(static_cast<unsigned>(rng.next_u64()), 14);
    double markov = 1.0;
    for (int z : path.increments) markov *= z > 0 ? p : 1.0 - p;
    CHECK(path_weight(law, path) == doctest::Approx(markov).epsilon(1e-13));
  }
}

TEST_CASE("the step cache matches the uncached kernel") {
  for (const auto& law : law_corpus()) {
    StepProbCache cache(law);
    PosteriorState state(law);
    Rng rng(0x4242);
    for (int t = 0; t < 30; ++t) {
      const CountVector c = state.counts_at(state.position());
      CHECK(cache.log_step_prob(c, +1) ==
            doctest::Approx(step_log_probability(state, +1)).epsilon(1e-14));
      state.push(rng.bernoulli(0.6) ? 1 : -1);
    }
  }
}

TEST_CASE("paths serialize as JSON arrays of unit increments") {
  WalkPath path{0, {1, -1, 1, 1}};
  const nlohmann::json j = path_to_json(path);
  CHECK(j.dump() == "[1,-1,1,1]");
  CHECK(path_from_json(j).increments == path.increments);
  CHECK_THROWS_AS(path_from_json(nlohmann::json::parse("[1,2]")),
                  std::invalid_argument);
}
