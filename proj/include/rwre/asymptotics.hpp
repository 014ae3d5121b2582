#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rwre/env_law.hpp"

namespace rwre {

enum class Direction { transient_right, transient_left, recurrent };

enum class Regime {
  ballistic_right,
  ballistic_left,
  transient_right_zero_speed,
  transient_left_zero_speed,
  recurrent
};

const char* to_string(Direction d);
const char* to_string(Regime r);

struct RegimeReport {
  double criterion_value{0.0};  // E[log p/q]
  double q_over_p_mean{0.0};    // E[q/p]
  double p_over_q_mean{0.0};    // E[p/q]
  double speed{0.0};
  Regime regime{Regime::recurrent};
};

// Sign of E[log p/q] decides the transience direction; |value| <= 1e-12 of
// the exactly computed expectation is declared recurrent.
Direction solomon_criterion(const EnvironmentLaw& law);

// Limiting velocity: (1 - E[q/p]) / (1 + E[q/p]) for right-transient laws
// with E[q/p] < 1, the mirrored expression for left-transient laws, and 0
// in the recurrent and zero-speed cases.
double lln_speed(const EnvironmentLaw& law);

RegimeReport classify_regime(const EnvironmentLaw& law);

nlohmann::json to_json(const RegimeReport& report);

struct SpeedEstimate {
  std::int64_t n{0};
  double mean{0.0};
  double std_error{0.0};
  Eigen::ArrayXd velocity;               // S_n/n per replica
  std::vector<std::int64_t> endpoint;    // S_n per replica
  std::vector<std::uint64_t> env_seed;

  double median_velocity() const;
  double fraction_positive() const;  // share of replicas with S_n > 0
};

// Replica-averaged endpoint velocity under quenched sampling with a fresh
// environment per replica. Deterministic in (law, n, replicas, seed),
// independent of the thread count.
SpeedEstimate estimate_speed_mc(const EnvironmentLaw& law, std::int64_t n,
                                int replicas, std::uint64_t seed,
                                int threads = 1);

std::string to_csv(const SpeedEstimate& est, const std::string& meta = "");

}  // namespace rwre
