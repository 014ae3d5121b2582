#include "rwre/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rwre/io.hpp"
#include "rwre/numerics.hpp"
#include "rwre/parallel.hpp"
#include "rwre/posterior.hpp"
#include "rwre/rng.hpp"

namespace rwre {

double log_mgf(const JumpDistribution& jump, double theta) {
  // log(p e^θ + q e^{-θ}) without overflow for large |θ|.
  const double lp = std::log(jump.p_right) + theta;
  const double lq = std::log(jump.p_left()) - theta;
  return num::log_sum_exp(lp, lq);
}

double cramer_rate(const JumpDistribution& jump, double a) {
  if (a < -1.0 || a > 1.0)
    throw std::invalid_argument("cramer_rate: velocity must lie in [-1,1]");
  const double u = 0.5 * (1.0 + a);
  const double v = 0.5 * (1.0 - a);
  double rate = 0.0;
  if (u > 0.0) rate += u * std::log(u / jump.p_right);
  if (v > 0.0) rate += v * std::log(v / jump.p_left());
  return std::max(rate, 0.0);
}

LegendrePair legendre_at(const JumpDistribution& jump, double a) {
  if (!(a > -1.0 && a < 1.0))
    throw std::invalid_argument("legendre_at: velocity must lie in (-1,1)");
  LegendrePair out;
  out.velocity = a;
  out.theta = 0.5 * std::log(jump.p_left() * (1.0 + a) /
                             (jump.p_right * (1.0 - a)));
  out.log_mgf = log_mgf(jump, out.theta);
  out.rate = out.theta * a - out.log_mgf;
  return out;
}

const char* to_string(RateFlavor f) {
  return f == RateFlavor::quenched ? "quenched" : "averaged";
}

double RateProfile::max_convexity_violation() const {
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
    const double span = grid[i + 1] - grid[i - 1];
    if (span <= 0.0) continue;
    const double chord = (extrapolated[i - 1] * (grid[i + 1] - grid[i]) +
                          extrapolated[i + 1] * (grid[i] - grid[i - 1])) /
                         span;
    worst = std::max(worst, extrapolated[i] - chord);
  }
  return worst;
}

namespace {

void validate_rate_inputs(const Eigen::ArrayXd& grid,
                          const std::vector<std::int64_t>& ladder,
                          double window) {
  if (grid.size() == 0) throw std::invalid_argument("empty velocity grid");
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (!(grid[i] > -1.0 && grid[i] < 1.0))
      throw std::invalid_argument("grid velocities must lie in (-1,1)");
  if (ladder.empty()) throw std::invalid_argument("empty ladder");
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    if (ladder[j] < 1)
      throw std::invalid_argument("ladder entries must be >= 1");
    if (j > 0 && ladder[j] <= ladder[j - 1])
      throw std::invalid_argument("ladder must be strictly increasing");
  }
  if (!(window >= 1.0))
    throw std::invalid_argument("window must be at least one lattice site");
}

// Affine fit in 1/n over the top half of the ladder's usable cells.
void extrapolate_profile(RateProfile& profile) {
  const std::size_t rungs = profile.ladder.size();
  profile.extrapolated.resize(profile.grid.size());
  profile.extrap_error.resize(profile.grid.size());
  profile.point_reliable.assign(static_cast<std::size_t>(profile.grid.size()),
                                1);
  for (Eigen::Index i = 0; i < profile.grid.size(); ++i) {
    std::vector<const RateCell*> usable;
    bool dropped = false;
    for (std::size_t j = 0; j < rungs; ++j) {
      const RateCell& c = profile.cell(i, j);
      if (c.reliable && std::isfinite(c.rate)) {
        usable.push_back(&c);
      } else {
        dropped = true;
      }
    }
    if (usable.empty()) {
      profile.extrapolated[i] = std::numeric_limits<double>::quiet_NaN();
      profile.extrap_error[i] = std::numeric_limits<double>::quiet_NaN();
      profile.point_reliable[static_cast<std::size_t>(i)] = 0;
      continue;
    }
    if (usable.size() == 1) {
      profile.extrapolated[i] = usable[0]->rate;
      profile.extrap_error[i] = usable[0]->std_error;
      profile.point_reliable[static_cast<std::size_t>(i)] =
          dropped ? 0 : 1;
      continue;
    }
    const std::size_t fit_count = std::max<std::size_t>(
        2, (usable.size() + 1) / 2);  // largest-n half of the ladder
    const std::size_t first = usable.size() - fit_count;
    Eigen::ArrayXd x(fit_count), y(fit_count);
    double stat = 0.0;
    for (std::size_t j = 0; j < fit_count; ++j) {
      const RateCell& c = *usable[first + j];
      x[static_cast<Eigen::Index>(j)] = 1.0 / static_cast<double>(c.n);
      y[static_cast<Eigen::Index>(j)] = c.rate;
      stat = std::max(stat, c.std_error);
    }
    const num::AffineFit fit = num::affine_fit(x, y);
    profile.extrapolated[i] = std::max(fit.intercept, 0.0);
    profile.extrap_error[i] = fit.residual_rms + stat;
    profile.point_reliable[static_cast<std::size_t>(i)] = dropped ? 0 : 1;
  }
}

RateCell cell_from_distribution(const LatticeDistribution& dist, double a,
                                std::int64_t n, double window) {
  RateCell cell;
  cell.a = a;
  cell.n = n;
  cell.exact = true;
  cell.std_error = 0.0;
  const double target = static_cast<double>(n) * a;
  const double lp = dist.log_mass_in(target - window, target + window);
  if (lp == num::neg_inf) {
    cell.rate = std::numeric_limits<double>::infinity();
    cell.reliable = false;
  } else {
    cell.rate = -lp / static_cast<double>(n);
    cell.reliable = true;
  }
  return cell;
}

}  // namespace

RateProfile estimate_quenched_rate(const Environment& env,
                                   const Eigen::ArrayXd& grid,
                                   const std::vector<std::int64_t>& ladder,
                                   double window) {
  validate_rate_inputs(grid, ladder, window);
  RateProfile profile;
  profile.flavor = RateFlavor::quenched;
  profile.window = window;
  profile.grid = grid;
  profile.ladder = ladder;
  profile.cells.resize(static_cast<std::size_t>(grid.size()) * ladder.size());
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const std::int64_t n = ladder[j];
    const LatticeDistribution dist = quenched_distribution(env, n, n);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      profile.cells[static_cast<std::size_t>(i) * ladder.size() + j] =
          cell_from_distribution(dist, grid[i], n, window);
  }
  extrapolate_profile(profile);
  return profile;
}

namespace {

struct TiltedSample {
  std::int64_t endpoint{0};
  double log_weight{0.0};
};

// One trajectory under the exponentially tilted kernel
// q_θ(z|w) ∝ q(z|w) e^{θ z}; log_weight is the exact likelihood ratio
// log dQ̄/dQ̄_θ along the path: -θ S_n + Σ_t log Z_θ(w_t).
TiltedSample sample_tilted_path(StepProbCache& kernel, std::int64_t n,
                                double theta, std::uint64_t seed) {
  Rng rng(seed);
  std::unordered_map<std::int64_t, CountVector> counts;
  std::int64_t pos = 0;
  double sum_log_z = 0.0;
  for (std::int64_t t = 0; t < n; ++t) {
    CountVector& c = counts[pos];
    const double wp = std::exp(kernel.log_step_prob(c, +1) + theta);
    const double wq = std::exp(kernel.log_step_prob(c, -1) - theta);
    const double z_norm = wp + wq;
    const int z = rng.next_unit() < wp / z_norm ? +1 : -1;
    sum_log_z += std::log(z_norm);
    c.bump(z);
    pos += z;
  }
  return {pos, -theta * static_cast<double>(pos) + sum_log_z};
}

// Mean drift of short pilot runs under tilt θ, with common random numbers
// across θ evaluations so the bisection sees a stable monotone response.
double pilot_drift(const EnvironmentLaw& law, std::int64_t n, double theta,
                   int pilots, std::uint64_t seed) {
  StepProbCache kernel(law);
  double acc = 0.0;
  for (int r = 0; r < pilots; ++r) {
    const TiltedSample s =
        sample_tilted_path(kernel, n, theta, derive_seed(seed, 3, r));
    acc += static_cast<double>(s.endpoint) / static_cast<double>(n);
  }
  return acc / pilots;
}

double match_tilt(const EnvironmentLaw& law, std::int64_t n, double a,
                  const TiltSchedule& tilt, std::uint64_t seed) {
  double lo = tilt.theta_min;
  double hi = tilt.theta_max;
  const int pilots = std::max(1, tilt.pilot_replicas);
  if (pilot_drift(law, n, lo, pilots, seed) >= a) return lo;
  if (pilot_drift(law, n, hi, pilots, seed) <= a) return hi;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < tilt.max_bisect_iter && hi - lo > 1e-4; ++it) {
    mid = 0.5 * (lo + hi);
    const double d = pilot_drift(law, n, mid, pilots, seed) - a;
    if (std::abs(d) <= tilt.drift_tol) return mid;
    (d < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// The likelihood ratio has unit mean under the tilted kernel, so the window
// probability is estimated by the unbiased mean of weight * indicator. Only
// the weights of paths landing in the window enter, and near the matched
// tilt their spread stays bounded in n (about exp(|θ| * window width)),
// unlike a self-normalizing denominator whose effective sample size decays
// exponentially with n.
RateCell sampled_rate_cell(const EnvironmentLaw& law, double a,
                           std::int64_t n, double window, double theta,
                           int replicas, std::uint64_t seed, int threads) {
  std::vector<double> log_w(static_cast<std::size_t>(replicas),
                            num::neg_inf);
  const double target = static_cast<double>(n) * a;
  parallel_for_chunked(replicas, threads, [&](std::int64_t b, std::int64_t e) {
    StepProbCache kernel(law);
    for (std::int64_t r = b; r < e; ++r) {
      const TiltedSample s =
          sample_tilted_path(kernel, n, theta, derive_seed(seed, 4, r));
      const double pos = static_cast<double>(s.endpoint);
      if (pos >= target - window && pos <= target + window)
        log_w[static_cast<std::size_t>(r)] = s.log_weight;
    }
  });

  RateCell cell;
  cell.a = a;
  cell.n = n;
  cell.exact = false;
  double shift = num::neg_inf;
  for (double lw : log_w) shift = std::max(shift, lw);
  if (shift == num::neg_inf) {
    cell.ess = 0.0;
    cell.rate = std::numeric_limits<double>::quiet_NaN();
    cell.std_error = std::numeric_limits<double>::quiet_NaN();
    cell.reliable = false;
    return cell;
  }
  double sum_v = 0.0, sum_v2 = 0.0;
  for (double lw : log_w) {
    if (lw == num::neg_inf) continue;
    const double v = std::exp(lw - shift);
    sum_v += v;
    sum_v2 += v * v;
  }
  cell.ess = sum_v * sum_v / sum_v2;
  if (*cell.ess < 100.0) {
    cell.rate = std::numeric_limits<double>::quiet_NaN();
    cell.std_error = std::numeric_limits<double>::quiet_NaN();
    cell.reliable = false;
    return cell;
  }
  const double r_count = static_cast<double>(replicas);
  const double mean_v = sum_v / r_count;  // P / exp(shift)
  // Sample variance of the shifted summands v * indicator.
  const double var_v =
      (sum_v2 - sum_v * sum_v / r_count) / (r_count - 1.0);
  const double se_rel = std::sqrt(var_v / r_count) / mean_v;
  const double log_p = shift + std::log(mean_v);
  cell.rate = -log_p / static_cast<double>(n);
  cell.std_error = se_rel / static_cast<double>(n);
  cell.reliable = true;
  return cell;
}

}  // namespace

RateProfile estimate_averaged_rate(const EnvironmentLaw& law,
                                   const Eigen::ArrayXd& grid,
                                   const std::vector<std::int64_t>& ladder,
                                   double window, const TiltSchedule& tilt,
                                   int replicas, std::uint64_t seed,
                                   int threads) {
  validate_rate_inputs(grid, ladder, window);
  if (replicas < 0) throw std::invalid_argument("replicas must be >= 0");
  if (!tilt.theta.empty() &&
      tilt.theta.size() != static_cast<std::size_t>(grid.size()))
    throw std::invalid_argument(
        "explicit tilt schedule must match the grid size");
  for (std::int64_t n : ladder)
    if (n > 24 && replicas == 0)
      throw std::invalid_argument(
          "ladder rung exceeds the n <= 24 enumeration budget and sampling "
          "is disabled (replicas = 0)");

  RateProfile profile;
  profile.flavor = RateFlavor::averaged;
  profile.window = window;
  profile.grid = grid;
  profile.ladder = ladder;
  profile.cells.resize(static_cast<std::size_t>(grid.size()) * ladder.size());

  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const std::int64_t n = ladder[j];
    if (n <= 24) {
      const LatticeDistribution dist =
          averaged_distribution(law, static_cast<int>(n));
      for (Eigen::Index i = 0; i < grid.size(); ++i)
        profile.cells[static_cast<std::size_t>(i) * ladder.size() + j] =
            cell_from_distribution(dist, grid[i], n, window);
      continue;
    }
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const std::uint64_t point_seed =
          derive_seed(derive_seed(seed, 5, static_cast<std::uint64_t>(i)), 6,
                      static_cast<std::uint64_t>(j));
      const double theta =
          tilt.theta.empty()
              ? match_tilt(law, n, grid[i], tilt, point_seed)
              : tilt.theta[static_cast<std::size_t>(i)];
      profile.cells[static_cast<std::size_t>(i) * ladder.size() + j] =
          sampled_rate_cell(law, grid[i], n, window, theta, replicas,
                            point_seed, threads);
    }
  }
  extrapolate_profile(profile);
  return profile;
}

EntropyEstimate entropy_rate_iid(const EnvironmentLaw& law,
                                 const StrategyLaw& strategy,
                                 std::int64_t horizon, int replicas,
                                 std::uint64_t seed, int threads) {
  const double rho = strategy.rho;
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("strategy probability must lie in (0,1)");
  if (std::abs(strategy.mean_drift()) < 1e-12)
    throw std::invalid_argument(
        "strategy drift must be nonzero for the kernel comparison");
  if (horizon < 10) throw std::invalid_argument("horizon must be >= 10");
  if (replicas < 2) throw std::invalid_argument("replicas must be >= 2");

  const std::int64_t burn = horizon / 10;
  const double log_rho = std::log(rho);
  const double log_comp = std::log1p(-rho);

  Eigen::ArrayXd value(replicas);
  parallel_for_chunked(replicas, threads, [&](std::int64_t b, std::int64_t e) {
    StepProbCache kernel(law);
    for (std::int64_t r = b; r < e; ++r) {
      Rng rng(derive_seed(seed, 7, r));
      std::unordered_map<std::int64_t, CountVector> counts;
      std::int64_t pos = 0;
      double acc = 0.0;
      for (std::int64_t t = 0; t < horizon; ++t) {
        CountVector& c = counts[pos];
        if (t >= burn) {
          const double lq_plus = kernel.log_step_prob(c, +1);
          const double lq_minus = kernel.log_step_prob(c, -1);
          acc += rho * (log_rho - lq_plus) +
                 (1.0 - rho) * (log_comp - lq_minus);
        }
        const int z = rng.bernoulli(rho) ? +1 : -1;
        c.bump(z);
        pos += z;
      }
      value[r] = acc / static_cast<double>(horizon - burn);
    }
  });

  EntropyEstimate est;
  est.value = value.mean();
  const double var = (value - est.value).square().sum() / (replicas - 1.0);
  est.std_error = std::sqrt(var / replicas);
  return est;
}

EntropyEstimate averaged_rate_upper_bound(const EnvironmentLaw& law, double a,
                                          std::int64_t horizon, int replicas,
                                          std::uint64_t seed, int threads) {
  if (!(a > -1.0 && a < 1.0))
    throw std::invalid_argument("velocity must lie in (-1,1)");
  if (a == 0.0)
    throw std::domain_error(
        "the i.i.d. strategy family has no transient member with zero mean");
  return entropy_rate_iid(law, StrategyLaw{0.5 * (1.0 + a)}, horizon,
                          replicas, seed, threads);
}

double rate_at_zero(const EnvironmentLaw& law) {
  const Interval hull = support_hull(law);
  if (hull.contains(0.5)) return 0.0;
  const double p = hull.hi < 0.5 ? hull.hi : hull.lo;  // endpoint nearest 1/2
  return -std::log(2.0 * std::sqrt(p * (1.0 - p)));
}

namespace {

// Nearest lattice point to `target` with the parity of `steps`.
std::int64_t round_to_parity(double target, std::int64_t steps) {
  std::int64_t r = std::llround(target);
  if (((r ^ steps) & 1) != 0)
    r += target > static_cast<double>(r) ? 1 : -1;
  return r;
}

}  // namespace

SuperadditivityReport check_superadditivity(
    const Environment& env, double a,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
    double window) {
  if (!(a >= -1.0 && a <= 1.0))
    throw std::invalid_argument("velocity must lie in [-1,1]");
  if (!(window >= 1.0))
    throw std::invalid_argument("window must be at least one lattice site");

  SuperadditivityReport report;
  report.a = a;
  report.window = window;
  for (const auto& [k, l] : pairs) {
    if (k < 1 || l < 1)
      throw std::invalid_argument("segment lengths must be >= 1");
    SuperadditivityCase item;
    item.k = k;
    item.l = l;
    const std::int64_t n = k + l;
    const double ka = static_cast<double>(k) * a;
    const double la = static_cast<double>(l) * a;
    const double na = static_cast<double>(n) * a;

    item.log_prob_first =
        quenched_distribution(env, k, k).log_mass_in(ka - window, ka + window);
    const std::int64_t shift = round_to_parity(ka, k);
    item.log_prob_second = quenched_distribution(env.shifted(shift), l, l)
                               .log_mass_in(la - window, la + window);
    // Combined window = Minkowski sum of the two component windows.
    item.log_prob_joint = quenched_distribution(env, n, n).log_mass_in(
        na - 2.0 * window, na + 2.0 * window);
    item.margin =
        item.log_prob_joint - item.log_prob_first - item.log_prob_second;
    report.cases.push_back(item);
  }
  return report;
}

std::string to_csv(const RateProfile& profile, const std::string& meta) {
  std::ostringstream out;
  if (!meta.empty()) out << "# " << meta << "\n";
  out << "a,n,finite_n_rate,extrapolated_rate,error,flavor\n";
  for (Eigen::Index i = 0; i < profile.grid.size(); ++i) {
    for (std::size_t j = 0; j < profile.ladder.size(); ++j) {
      const RateCell& c = profile.cell(i, j);
      out << format_double(c.a) << "," << c.n << ","
          << format_double(c.rate) << "," << format_double(profile.extrapolated[i])
          << "," << format_double(profile.extrap_error[i]) << ","
          << to_string(profile.flavor) << "\n";
    }
  }
  return out.str();
}

nlohmann::json to_json(const RateProfile& profile) {
  nlohmann::json cells = nlohmann::json::array();
  for (const RateCell& c : profile.cells) {
    nlohmann::json jc = {{"a", c.a},
                         {"n", c.n},
                         {"rate", c.rate},
                         {"std_error", c.std_error},
                         {"exact", c.exact},
                         {"reliable", c.reliable}};
    if (c.ess) jc["ess"] = *c.ess;
    cells.push_back(jc);
  }
  nlohmann::json j = {{"flavor", to_string(profile.flavor)},
                      {"window", profile.window},
                      {"cells", cells}};
  j["grid"] = std::vector<double>(profile.grid.data(),
                                  profile.grid.data() + profile.grid.size());
  j["ladder"] = profile.ladder;
  j["extrapolated"] = std::vector<double>(
      profile.extrapolated.data(),
      profile.extrapolated.data() + profile.extrapolated.size());
  j["error"] = std::vector<double>(
      profile.extrap_error.data(),
      profile.extrap_error.data() + profile.extrap_error.size());
  std::vector<bool> reliable;
  for (char c : profile.point_reliable) reliable.push_back(c != 0);
  j["point_reliable"] = reliable;
  return j;
}

nlohmann::json to_json(const SuperadditivityReport& report) {
  nlohmann::json cases = nlohmann::json::array();
  for (const SuperadditivityCase& c : report.cases)
    cases.push_back({{"k", c.k},
                     {"l", c.l},
                     {"log_prob_joint", c.log_prob_joint},
                     {"log_prob_first", c.log_prob_first},
                     {"log_prob_second", c.log_prob_second},
                     {"margin", c.margin}});
  return {{"a", report.a}, {"window", report.window}, {"cases", cases}};
}

}  // namespace rwre
