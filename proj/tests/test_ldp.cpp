#include <cmath>

#include "doctest.h"
#include "rwre/asymptotics.hpp"
#include "rwre/ldp.hpp"
#include "rwre/numerics.hpp"
#include "rwre/rng.hpp"
#include "support/stats.hpp"

using namespace rwre;

namespace {

EnvironmentLaw clipped_beta22() {
  return EnvironmentLaw::beta(2.0, 2.0, Interval{0.05, 0.95});
}

// Independent route to the Legendre supremum.
double golden_rate(const JumpDistribution& jump, double a) {
  return test_support::golden_max(
      [&](double theta) { return theta * a - log_mgf(jump, theta); }, -12.0,
      12.0);
}

}  // namespace

TEST_CASE("log MGF basics") {
  const JumpDistribution j{0.7};
  CHECK(log_mgf(j, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // Λ'(0) is the mean drift.
  const double h = 1e-6;
  CHECK((log_mgf(j, h) - log_mgf(j, -h)) / (2.0 * h) ==
        doctest::Approx(0.4).epsilon(1e-7));
  // Convex in θ.
  CHECK(log_mgf(j, 1.0) + log_mgf(j, -1.0) >= 2.0 * log_mgf(j, 0.0));
  // Stable for large tilts: Λ(θ) ~ θ + log p.
  CHECK(log_mgf(j, 600.0) ==
        doctest::Approx(600.0 + std::log(0.7)).epsilon(1e-12));
}

TEST_CASE("closed-form rate values at the worked points") {
  const JumpDistribution j{0.7};
  CHECK(cramer_rate(j, 0.4) == 0.0);
  CHECK(cramer_rate(j, 0.0) == doctest::Approx(0.0871763).epsilon(1e-5));
  CHECK(cramer_rate(j, 0.0) ==
        doctest::Approx(-std::log(2.0 * std::sqrt(0.21))).epsilon(1e-13));
  CHECK(cramer_rate(j, 1.0) == doctest::Approx(0.3566749).epsilon(1e-6));
  CHECK(cramer_rate(j, -1.0) ==
        doctest::Approx(-std::log(0.3)).epsilon(1e-13));
  CHECK_THROWS_AS(cramer_rate(j, 1.5), std::invalid_argument);
}

TEST_CASE("closed form matches the golden-section Legendre oracle") {
  for (double p : {0.3, 0.55, 0.7, 0.9}) {
    const JumpDistribution j{p};
    for (double a : {-0.8, -0.3, 0.0, 0.25, 0.6, 0.95}) {
      CHECK(cramer_rate(j, a) ==
            doctest::Approx(golden_rate(j, a)).epsilon(1e-8));
    }
  }
}

TEST_CASE("rate function is convex, vanishes at the mean, finite at edges") {
  const JumpDistribution j{0.7};
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(101, -1.0, 1.0);
  for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
    const double mid = cramer_rate(j, grid[i]);
    const double chord =
        0.5 * (cramer_rate(j, grid[i - 1]) + cramer_rate(j, grid[i + 1]));
    CHECK(mid <= chord + 1e-9);
  }
  CHECK(cramer_rate(j, 0.4) == 0.0);
  CHECK(std::isfinite(cramer_rate(j, 1.0)));
  CHECK(std::isfinite(cramer_rate(j, -1.0)));
}

TEST_CASE("legendre_at provides consistent conjugate coordinates") {
  const JumpDistribution j{0.65};
  for (double a : {-0.5, 0.0, 0.3, 0.8}) {
    const LegendrePair pair = legendre_at(j, a);
    CHECK(pair.rate == doctest::Approx(cramer_rate(j, a)).epsilon(1e-12));
    // The tilt is the stationary point: Λ'(θ) = a.
    const double h = 1e-6;
    const double deriv =
        (log_mgf(j, pair.theta + h) - log_mgf(j, pair.theta - h)) / (2 * h);
    CHECK(deriv == doctest::Approx(a).epsilon(1e-6));
    CHECK(pair.rate >= 0.0);
  }
}

TEST_CASE("zero-velocity rate closed forms") {
  CHECK(rate_at_zero(EnvironmentLaw::point_mass(0.7)) ==
        doctest::Approx(0.0871763).epsilon(1e-5));
  CHECK(rate_at_zero(EnvironmentLaw::point_mass(0.5)) == 0.0);
  CHECK(rate_at_zero(EnvironmentLaw::finite_mixture(
            {{0.4, 0.5}, {0.7, 0.5}})) == 0.0);
  CHECK(rate_at_zero(EnvironmentLaw::finite_mixture(
            {{0.6, 0.5}, {0.7, 0.5}})) ==
        doctest::Approx(0.0204108).epsilon(1e-4));
  // The hull endpoint nearest 1/2 decides the value.
  CHECK(rate_at_zero(EnvironmentLaw::finite_mixture(
            {{0.6, 0.5}, {0.7, 0.5}})) ==
        doctest::Approx(-std::log(2.0 * std::sqrt(0.24))).epsilon(1e-12));
  // Clipped Beta laws use the clip interval as the hull.
  CHECK(rate_at_zero(clipped_beta22()) == 0.0);
  CHECK(rate_at_zero(EnvironmentLaw::beta(2.0, 2.0, Interval{0.6, 0.9})) ==
        doctest::Approx(-std::log(2.0 * std::sqrt(0.24))).epsilon(1e-12));
}

TEST_CASE("zero-velocity rate is mirror invariant and detects nestling") {
  Rng rng(0x1dea);
  for (int rep = 0; rep < 40; ++rep) {
    const double p1 = 0.05 + 0.9 * rng.next_unit();
    const double p2 = 0.05 + 0.9 * rng.next_unit();
    const double w = 0.1 + 0.8 * rng.next_unit();
    const auto law = EnvironmentLaw::finite_mixture({{p1, w}, {p2, 1.0 - w}});
    // The mirror map itself rounds (1 - (1-p) is off by an ulp), so the
    // invariance holds to machine precision rather than bitwise.
    CHECK(rate_at_zero(mirrored(law)) ==
          doctest::Approx(rate_at_zero(law)).epsilon(1e-12));
    CHECK((rate_at_zero(law) > 0.0) ==
          !mean_drift_range(law).contains(0.0));
  }
}

TEST_CASE("quenched profile on a degenerate environment matches Cramer") {
  const auto law = EnvironmentLaw::point_mass(0.7);
  const Environment env{law, 4, 0};
  Eigen::ArrayXd grid(4);
  grid << 0.0, 0.2, 0.4, 0.6;
  const std::vector<std::int64_t> ladder{100, 200, 400, 800};
  const RateProfile prof = estimate_quenched_rate(env, grid, ladder);

  const JumpDistribution j{0.7};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(prof.extrapolated[i] - cramer_rate(j, grid[i])) <= 0.02);
    CHECK(prof.extrapolated[i] >= 0.0);
    CHECK(prof.point_reliable[static_cast<std::size_t>(i)] == 1);
  }
  // No deviation cost at the limiting velocity.
  CHECK(prof.extrapolated[2] <= 0.01);
  // Exact DP cells carry no statistical error.
  for (const RateCell& c : prof.cells) {
    CHECK(c.exact);
    CHECK(c.std_error == 0.0);
  }
  CHECK(prof.max_convexity_violation() <= 1e-3);
}

TEST_CASE("quenched profiles are bit-identical across runs") {
  const Environment env{clipped_beta22(), 17, 0};
  Eigen::ArrayXd grid(3);
  grid << 0.1, 0.3, 0.5;
  const std::vector<std::int64_t> ladder{50, 100, 200};
  const RateProfile a = estimate_quenched_rate(env, grid, ladder);
  const RateProfile b = estimate_quenched_rate(env, grid, ladder);
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    CHECK(a.extrapolated[i] == b.extrapolated[i]);
  for (std::size_t c = 0; c < a.cells.size(); ++c)
    CHECK(a.cells[c].rate == b.cells[c].rate);
  CHECK(to_csv(a) == to_csv(b));
}

TEST_CASE("finite-n quenched rates decrease along the ladder") {
  // Degenerate environment, velocities whose targets hit the lattice
  // exactly on every rung, so there are no window rounding effects.
  const Environment env{EnvironmentLaw::point_mass(0.7), 4, 0};
  Eigen::ArrayXd grid(2);
  grid << 0.0, 0.4;
  const std::vector<std::int64_t> ladder{250, 500, 750, 1000};
  const RateProfile prof = estimate_quenched_rate(env, grid, ladder);
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    for (std::size_t jn = 1; jn < ladder.size(); ++jn)
      CHECK(prof.cell(i, jn).rate <= prof.cell(i, jn - 1).rate + 1e-6);
}

TEST_CASE("averaged profile: exact rungs carry zero statistical error") {
  const auto law = clipped_beta22();
  Eigen::ArrayXd grid(2);
  grid << 0.1, 0.3;
  const RateProfile prof = estimate_averaged_rate(
      law, grid, {8, 12, 16}, 2.0, TiltSchedule{}, 0, 1);
  for (const RateCell& c : prof.cells) {
    CHECK(c.exact);
    CHECK(c.std_error == 0.0);
    CHECK(!c.ess.has_value());
    CHECK(c.reliable);
  }
  // Exact cells must reproduce the enumeration directly.
  const LatticeDistribution d16 = averaged_distribution(law, 16);
  const double lp = d16.log_mass_in(16 * 0.1 - 2.0, 16 * 0.1 + 2.0);
  CHECK(prof.cell(0, 2).rate == doctest::Approx(-lp / 16.0).epsilon(1e-13));
}

TEST_CASE("averaged profiles of a symmetric law are symmetric in a") {
  // Symmetric clip of a symmetric density: the averaged law of S_n is
  // symmetric, so exact enumeration rungs give a symmetric profile.
  const auto law = clipped_beta22();
  Eigen::ArrayXd grid(4);
  grid << -0.3, -0.15, 0.15, 0.3;
  const RateProfile prof = estimate_averaged_rate(
      law, grid, {8, 12, 16}, 2.0, TiltSchedule{}, 0, 1);
  CHECK(prof.extrapolated[0] ==
        doctest::Approx(prof.extrapolated[3]).epsilon(1e-10));
  CHECK(prof.extrapolated[1] ==
        doctest::Approx(prof.extrapolated[2]).epsilon(1e-10));
}

TEST_CASE("enumeration budget is enforced when sampling is disabled") {
  Eigen::ArrayXd grid(1);
  grid << 0.2;
  CHECK_THROWS_AS(estimate_averaged_rate(clipped_beta22(), grid, {8, 30},
                                         2.0, TiltSchedule{}, 0, 1),
                  std::invalid_argument);
  CHECK_NOTHROW(estimate_averaged_rate(clipped_beta22(), grid, {8, 12}, 2.0,
                                       TiltSchedule{}, 0, 1));
}

TEST_CASE("sampled averaged profile matches Cramer for a degenerate law") {
  const auto law = EnvironmentLaw::point_mass(0.7);
  Eigen::ArrayXd grid(2);
  grid << 0.2, 0.5;
  const RateProfile prof = estimate_averaged_rate(
      law, grid, {100, 200, 400}, 2.0, TiltSchedule{}, 8000, 2024, 2);
  const JumpDistribution j{0.7};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    INFO("a = ", grid[i]);
    CHECK(prof.point_reliable[static_cast<std::size_t>(i)] == 1);
    CHECK(std::abs(prof.extrapolated[i] - cramer_rate(j, grid[i])) <=
          0.02 + 3.0 * prof.extrap_error[i]);
  }
  for (const RateCell& c : prof.cells) {
    CHECK(c.reliable);
    CHECK(!c.exact);
    REQUIRE(c.ess.has_value());
    CHECK(*c.ess >= 100.0);
    CHECK(c.std_error > 0.0);
  }
}

TEST_CASE("averaged sampling is reproducible for a fixed seed") {
  const auto law = clipped_beta22();
  Eigen::ArrayXd grid(1);
  grid << 0.3;
  const RateProfile a = estimate_averaged_rate(law, grid, {60}, 2.0,
                                               TiltSchedule{}, 2000, 7, 1);
  const RateProfile b = estimate_averaged_rate(law, grid, {60}, 2.0,
                                               TiltSchedule{}, 2000, 7, 3);
  CHECK(a.cells[0].rate == b.cells[0].rate);
  CHECK(a.cells[0].std_error == b.cells[0].std_error);
}

TEST_CASE("entropy rate vanishes when the strategy equals the walk law") {
  const auto law = EnvironmentLaw::point_mass(0.7);
  const EntropyEstimate est = entropy_rate_iid(law, StrategyLaw{0.7}, 1000, 8, 42);
  // Zero up to the rounding of (k+1) log p - k log p.
  CHECK(std::abs(est.value) <= 1e-14);
  CHECK(est.std_error <= 1e-14);
}

TEST_CASE("entropy rate against a point mass is the Bernoulli KL") {
  const double p = 0.7, rho = 0.55;
  const auto law = EnvironmentLaw::point_mass(p);
  const EntropyEstimate est = entropy_rate_iid(law, StrategyLaw{rho}, 1000, 8, 42);
  const double kl = rho * std::log(rho / p) +
                    (1.0 - rho) * std::log((1.0 - rho) / (1.0 - p));
  // The summand is deterministic for a history-free kernel.
  CHECK(est.value == doctest::Approx(kl).epsilon(1e-12));
  CHECK(est.std_error <= 1e-15);
}

TEST_CASE("entropy rate for a clipped Beta law is positive and tightens") {
  const auto law = clipped_beta22();
  const EntropyEstimate few = entropy_rate_iid(law, StrategyLaw{0.75}, 4000, 8, 11, 2);
  const EntropyEstimate many = entropy_rate_iid(law, StrategyLaw{0.75}, 4000, 128, 11, 2);
  CHECK(few.value > 0.0);
  CHECK(many.value > 0.0);
  CHECK(many.std_error < few.std_error);
  for (const auto& est : {few, many}) CHECK(std::isfinite(est.value));
}

TEST_CASE("entropy rates are nonnegative for random strategies") {
  Rng rng(0xe17209);
  for (int rep = 0; rep < 6; ++rep) {
    const double p1 = 0.1 + 0.8 * rng.next_unit();
    const double p2 = 0.1 + 0.8 * rng.next_unit();
    const auto law = EnvironmentLaw::finite_mixture({{p1, 0.5}, {p2, 0.5}});
    double rho = 0.1 + 0.8 * rng.next_unit();
    if (std::abs(rho - 0.5) < 0.05) rho = 0.6;
    const EntropyEstimate est =
        entropy_rate_iid(law, StrategyLaw{rho}, 600, 4, rng.next_u64());
    CHECK(est.value >= 0.0);  // every summand is a Bernoulli KL
  }
}

TEST_CASE("entropy rate rejects drift-free strategies") {
  CHECK_THROWS_AS(entropy_rate_iid(clipped_beta22(), StrategyLaw{0.5}, 1000, 4, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(averaged_rate_upper_bound(clipped_beta22(), 0.0, 1000, 4, 1),
                  std::domain_error);
  CHECK_THROWS_AS(averaged_rate_upper_bound(clipped_beta22(), 1.0, 1000, 4, 1),
                  std::invalid_argument);
}

TEST_CASE("the i.i.d. bound is exact for degenerate kernels") {
  const auto law = EnvironmentLaw::point_mass(0.7);
  const EntropyEstimate bound =
      averaged_rate_upper_bound(law, 0.5, 2000, 8, 5);
  CHECK(bound.value ==
        doctest::Approx(cramer_rate(JumpDistribution{0.7}, 0.5))
            .epsilon(1e-10));
}

TEST_CASE("the i.i.d. bound is nonnegative at the mixture speed") {
  const auto law = EnvironmentLaw::finite_mixture({{0.7, 0.5}, {0.6, 0.5}});
  const double a = lln_speed(law);
  REQUIRE(a > 0.0);
  const EntropyEstimate bound =
      averaged_rate_upper_bound(law, a, 4000, 16, 5, 2);
  CHECK(bound.value >= 0.0);
  CHECK(std::isfinite(bound.value));
}

TEST_CASE("superadditivity margins on a homogeneous environment") {
  const Environment env{EnvironmentLaw::point_mass(0.7), 1, 0};
  const SuperadditivityReport report =
      check_superadditivity(env, 0.4, {{25, 25}, {50, 50}, {100, 100}});
  REQUIRE(report.cases.size() == 3);
  for (const auto& c : report.cases) {
    INFO("k=", c.k, " l=", c.l);
    CHECK(c.margin >= -1e-12);
    CHECK(std::isfinite(c.log_prob_joint));
  }
}

TEST_CASE("superadditivity report at a = 0 stays finite") {
  const Environment env{clipped_beta22(), 33, 0};
  const SuperadditivityReport report =
      check_superadditivity(env, 0.0, {{20, 20}, {30, 10}});
  for (const auto& c : report.cases) {
    CHECK(std::isfinite(c.margin));
    CHECK(std::isfinite(c.log_prob_first));
    CHECK(std::isfinite(c.log_prob_second));
  }
  const nlohmann::json j = to_json(report);
  CHECK(j.at("cases").size() == 2);
}

TEST_CASE("profile exports carry the full cell table") {
  const Environment env{EnvironmentLaw::point_mass(0.6), 2, 0};
  Eigen::ArrayXd grid(2);
  grid << 0.0, 0.2;
  const RateProfile prof =
      estimate_quenched_rate(env, grid, {40, 80}, 2.0);
  const std::string csv = to_csv(prof, "h");
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 2 + grid.size() * 2);  // meta + header + cells
  const nlohmann::json j = to_json(prof);
  CHECK(j.at("cells").size() == 4);
  CHECK(j.at("flavor") == "quenched");
  CHECK(j.at("extrapolated").size() == 2);
}

TEST_CASE("rate estimators validate their inputs") {
  const Environment env{EnvironmentLaw::point_mass(0.6), 2, 0};
  Eigen::ArrayXd bad_grid(1);
  bad_grid << 1.0;
  CHECK_THROWS_AS(estimate_quenched_rate(env, bad_grid, {10}),
                  std::invalid_argument);
  Eigen::ArrayXd grid(1);
  grid << 0.2;
  CHECK_THROWS_AS(estimate_quenched_rate(env, grid, {10, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_quenched_rate(env, grid, {10}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_quenched_rate(env, grid, {}),
                  std::invalid_argument);
}
