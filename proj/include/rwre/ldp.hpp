#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rwre/env_law.hpp"
#include "rwre/walker.hpp"

namespace rwre {

// Λ(θ) = log(p e^θ + q e^{-θ}) for one jump distribution.
double log_mgf(const JumpDistribution& jump, double theta);

// Legendre transform sup_θ [θ a - Λ(θ)] in closed form on [-1, 1].
double cramer_rate(const JumpDistribution& jump, double a);

// Conjugate coordinates at velocity a (|a| < 1): the maximizing tilt, the
// log-MGF there, and the rate.
struct LegendrePair {
  double theta{0.0};
  double log_mgf{0.0};
  double velocity{0.0};
  double rate{0.0};
};
LegendrePair legendre_at(const JumpDistribution& jump, double a);

enum class RateFlavor { quenched, averaged };
const char* to_string(RateFlavor f);

struct RateCell {
  double a{0.0};
  std::int64_t n{0};
  double rate{0.0};           // -(1/n) log P[S_n within window of n a]
  double std_error{0.0};      // 0 for exact cells
  std::optional<double> ess;  // effective sample size (sampled cells only)
  bool exact{true};
  bool reliable{true};
};

struct RateProfile {
  RateFlavor flavor{RateFlavor::quenched};
  double window{2.0};
  Eigen::ArrayXd grid;
  std::vector<std::int64_t> ladder;
  std::vector<RateCell> cells;  // grid-major: cells[i * ladder.size() + j]
  Eigen::ArrayXd extrapolated;
  Eigen::ArrayXd extrap_error;
  std::vector<char> point_reliable;

  const RateCell& cell(Eigen::Index grid_i, std::size_t ladder_j) const {
    return cells[static_cast<std::size_t>(grid_i) * ladder.size() + ladder_j];
  }
  // Largest amount by which the extrapolated curve rises above a chord;
  // <= 0 for a convex profile.
  double max_convexity_violation() const;
};

// Exact finite-n quenched rates by dynamic programming, extrapolated in 1/n
// by an affine fit over the top half of the ladder. Deterministic.
RateProfile estimate_quenched_rate(const Environment& env,
                                   const Eigen::ArrayXd& grid,
                                   const std::vector<std::int64_t>& ladder,
                                   double window = 2.0);

struct TiltSchedule {
  std::vector<double> theta;  // explicit tilt per grid point; empty = bisect
  int pilot_replicas{64};
  double drift_tol{0.005};
  double theta_min{-6.0};
  double theta_max{6.0};
  int max_bisect_iter{60};
};

// Averaged rates: exhaustive enumeration for rungs with n <= 24,
// self-normalized importance sampling under an exponentially tilted
// posterior kernel for larger rungs. Cells whose effective sample size
// falls below 100 are flagged unreliable instead of reporting a rate.
RateProfile estimate_averaged_rate(const EnvironmentLaw& law,
                                   const Eigen::ArrayXd& grid,
                                   const std::vector<std::int64_t>& ladder,
                                   double window, const TiltSchedule& tilt,
                                   int replicas, std::uint64_t seed,
                                   int threads = 1);

struct EntropyEstimate {
  double value{0.0};
  double std_error{0.0};
};

// An i.i.d. increment strategy: +1 with probability rho.
struct StrategyLaw {
  double rho{0.5};
  double mean_drift() const { return 2.0 * rho - 1.0; }
};

// Per-step relative entropy of an i.i.d. strategy against the
// sequential-Bayes kernel of the law, time-averaged after a 10% burn-in and
// averaged across replicas. Requires nonzero strategy drift.
EntropyEstimate entropy_rate_iid(const EnvironmentLaw& law,
                                 const StrategyLaw& strategy,
                                 std::int64_t horizon, int replicas,
                                 std::uint64_t seed, int threads = 1);

// Upper bound for the averaged rate at velocity a from the i.i.d. strategy
// family: mean a forces rho = (1+a)/2. Errors on a = 0 and |a| >= 1.
EntropyEstimate averaged_rate_upper_bound(const EnvironmentLaw& law, double a,
                                          std::int64_t horizon, int replicas,
                                          std::uint64_t seed, int threads = 1);

// Shared zero-velocity rate: 0 when 1/2 lies in the support hull, otherwise
// -log(2 sqrt(p(1-p))) at the hull endpoint nearest 1/2.
double rate_at_zero(const EnvironmentLaw& law);

struct SuperadditivityCase {
  std::int64_t k{0};
  std::int64_t l{0};
  double log_prob_joint{0.0};   // log Q[S_{k+l} in the combined window]
  double log_prob_first{0.0};   // log Q[S_k in window]
  double log_prob_second{0.0};  // log Q^shifted[S_l in window]
  double margin{0.0};           // joint - first - second
};

struct SuperadditivityReport {
  double a{0.0};
  double window{2.0};
  std::vector<SuperadditivityCase> cases;
};

// Exact DP check of the concatenation inequality. The combined window is
// the Minkowski sum of the two component windows, so for a homogeneous
// environment the margin is nonnegative up to rounding.
SuperadditivityReport check_superadditivity(
    const Environment& env, double a,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
    double window = 2.0);

std::string to_csv(const RateProfile& profile, const std::string& meta = "");
nlohmann::json to_json(const RateProfile& profile);
nlohmann::json to_json(const SuperadditivityReport& report);

}  // namespace rwre
