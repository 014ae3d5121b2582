#include "rwre/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rwre/io.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"
#include "rwre/walker.hpp"

namespace rwre {

namespace {
constexpr double kRecurrentTol = 1e-12;
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::transient_right:
      return "transient_right";
    case Direction::transient_left:
      return "transient_left";
    case Direction::recurrent:
      return "recurrent";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::ballistic_right:
      return "ballistic_right";
    case Regime::ballistic_left:
      return "ballistic_left";
    case Regime::transient_right_zero_speed:
      return "transient_right_zero_speed";
    case Regime::transient_left_zero_speed:
      return "transient_left_zero_speed";
    case Regime::recurrent:
      return "recurrent";
  }
  return "?";
}

Direction solomon_criterion(const EnvironmentLaw& law) {
  const double value = expectation(law, LawFunctional::log_ratio);
  if (value > kRecurrentTol) return Direction::transient_right;
  if (value < -kRecurrentTol) return Direction::transient_left;
  return Direction::recurrent;
}

double lln_speed(const EnvironmentLaw& law) {
  switch (solomon_criterion(law)) {
    case Direction::recurrent:
      return 0.0;
    case Direction::transient_right: {
      const double ratio = expectation(law, LawFunctional::q_over_p);
      return ratio < 1.0 ? (1.0 - ratio) / (1.0 + ratio) : 0.0;
    }
    case Direction::transient_left: {
      const double ratio = expectation(law, LawFunctional::p_over_q);
      return ratio < 1.0 ? -(1.0 - ratio) / (1.0 + ratio) : 0.0;
    }
  }
  return 0.0;
}

RegimeReport classify_regime(const EnvironmentLaw& law) {
  RegimeReport report;
  report.criterion_value = expectation(law, LawFunctional::log_ratio);
  report.q_over_p_mean = expectation(law, LawFunctional::q_over_p);
  report.p_over_q_mean = expectation(law, LawFunctional::p_over_q);
  report.speed = lln_speed(law);
  if (report.criterion_value > kRecurrentTol) {
    report.regime = report.q_over_p_mean < 1.0
                        ? Regime::ballistic_right
                        : Regime::transient_right_zero_speed;
  } else if (report.criterion_value < -kRecurrentTol) {
    report.regime = report.p_over_q_mean < 1.0
                        ? Regime::ballistic_left
                        : Regime::transient_left_zero_speed;
  } else {
    report.regime = Regime::recurrent;
  }
  return report;
}

nlohmann::json to_json(const RegimeReport& report) {
  return {{"criterion_value", report.criterion_value},
          {"q_over_p_mean", report.q_over_p_mean},
          {"p_over_q_mean", report.p_over_q_mean},
          {"speed", report.speed},
          {"regime", to_string(report.regime)}};
}

double SpeedEstimate::median_velocity() const {
  std::vector<double> v(velocity.data(), velocity.data() + velocity.size());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

double SpeedEstimate::fraction_positive() const {
  std::int64_t pos = 0;
  for (std::int64_t e : endpoint) pos += e > 0 ? 1 : 0;
  return static_cast<double>(pos) / static_cast<double>(endpoint.size());
}

SpeedEstimate estimate_speed_mc(const EnvironmentLaw& law, std::int64_t n,
                                int replicas, std::uint64_t seed,
                                int threads) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (replicas < 2) throw std::invalid_argument("replicas must be >= 2");

  SpeedEstimate est;
  est.n = n;
  est.velocity.resize(replicas);
  est.endpoint.resize(static_cast<std::size_t>(replicas));
  est.env_seed.resize(static_cast<std::size_t>(replicas));

  parallel_for_chunked(replicas, threads, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t r = b; r < e; ++r) {
      const std::uint64_t env_seed = derive_seed(seed, 1, r);
      const std::uint64_t walk_seed = derive_seed(seed, 2, r);
      const Environment env{law, env_seed, 0};
      SiteCache sites(env);
      Rng rng(walk_seed);
      std::int64_t pos = 0;
      for (std::int64_t t = 0; t < n; ++t)
        pos += rng.bernoulli(sites.p_right(pos)) ? 1 : -1;
      est.endpoint[static_cast<std::size_t>(r)] = pos;
      est.env_seed[static_cast<std::size_t>(r)] = env_seed;
      est.velocity[r] = static_cast<double>(pos) / static_cast<double>(n);
    }
  });

  est.mean = est.velocity.mean();
  const double var =
      (est.velocity - est.mean).square().sum() / (replicas - 1.0);
  est.std_error = std::sqrt(var / replicas);
  return est;
}

std::string to_csv(const SpeedEstimate& est, const std::string& meta) {
  std::ostringstream out;
  if (!meta.empty()) out << "# " << meta << "\n";
  out << "replica,seed,n,endpoint,velocity\n";
  for (Eigen::Index r = 0; r < est.velocity.size(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    out << r << "," << est.env_seed[i] << "," << est.n << ","
        << est.endpoint[i] << "," << format_double(est.velocity[r]) << "\n";
  }
  return out.str();
}

}  // namespace rwre
