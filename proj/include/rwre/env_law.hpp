#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rwre {

// One lattice site's jump distribution: right with probability p_right,
// left with the complement. Valid values are strictly inside (0,1).
struct JumpDistribution {
  double p_right{0.5};
  double p_left() const { return 1.0 - p_right; }
};

inline bool valid_probability(double p) { return p > 0.0 && p < 1.0; }

// Number of recorded jumps out of one site, split by direction.
struct CountVector {
  std::int64_t right{0};
  std::int64_t left{0};

  std::int64_t total() const { return right + left; }
  bool zero() const { return right == 0 && left == 0; }
  void bump(int z) { (z > 0 ? right : left) += 1; }
  void unbump(int z) { (z > 0 ? right : left) -= 1; }
  CountVector bumped(int z) const {
    CountVector c = *this;
    c.bump(z);
    return c;
  }
  friend bool operator==(const CountVector&, const CountVector&) = default;
};

struct Interval {
  double lo{0.0};
  double hi{0.0};
  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
};

// Law of a single site's rightward jump probability: a point mass, a finite
// mixture of point masses, or a Beta(alpha,beta) density optionally clipped
// to a closed subinterval of (0,1).
class EnvironmentLaw {
 public:
  enum class Kind { point, mixture, beta };

  static EnvironmentLaw point_mass(double p);
  static EnvironmentLaw finite_mixture(
      const std::vector<std::pair<double, double>>& atoms_pw);
  static EnvironmentLaw beta(double alpha, double beta,
                             std::optional<Interval> clip = std::nullopt);

  Kind kind() const { return kind_; }
  double point_p() const;
  const Eigen::ArrayXd& atom_p() const;
  const Eigen::ArrayXd& atom_w() const;
  double alpha() const;
  double beta_param() const;
  const std::optional<Interval>& clip() const;
  double log_clip_norm() const;  // log ∫_clip t^(a-1)(1-t)^(b-1) dt

  std::string describe() const;

 private:
  EnvironmentLaw() = default;

  Kind kind_{Kind::point};
  double p_{0.5};
  Eigen::ArrayXd atom_p_;
  Eigen::ArrayXd atom_w_;
  double alpha_{1.0};
  double beta_{1.0};
  std::optional<Interval> clip_;
  double log_clip_norm_{0.0};
};

enum class LawFunctional { log_ratio, q_over_p, p_over_q };

// E[ p^right (1-p)^left ] under the law; exactly 1 for zero counts.
double moment(const EnvironmentLaw& law, const CountVector& counts);
double log_moment(const EnvironmentLaw& law, const CountVector& counts);

// Convex hull of the support of the law (clip interval for Beta laws).
Interval support_hull(const EnvironmentLaw& law);

// { 2p - 1 : p in the support hull }; 0 inside means the nestling case.
Interval mean_drift_range(const EnvironmentLaw& law);

// E[log(p/(1-p))], E[(1-p)/p] or E[p/(1-p)]. Beta laws must be clipped.
double expectation(const EnvironmentLaw& law, LawFunctional f);

// The law of 1-p: atoms mirrored, Beta parameters swapped, clip reflected.
EnvironmentLaw mirrored(const EnvironmentLaw& law);

// Inverse-transform sample for u in (0,1).
double quantile(const EnvironmentLaw& law, double u);

nlohmann::json law_to_json(const EnvironmentLaw& law);
EnvironmentLaw law_from_json(const nlohmann::json& spec);

}  // namespace rwre
