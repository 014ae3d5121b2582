// Command-line runner: every analysis is a subcommand driven by a JSON
// config plus a top-level seed, with machine-readable outputs. Identical
// (config, seed) pairs reproduce outputs byte for byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rwre/asymptotics.hpp"
#include "rwre/env_law.hpp"
#include "rwre/io.hpp"
#include "rwre/ldp.hpp"
#include "rwre/numerics.hpp"
#include "rwre/posterior.hpp"
#include "rwre/rng.hpp"
#include "rwre/walker.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
  std::string filter;
  double corrupt_moment = 0.0;  // validation harness negative control
};

struct Context {
  json resolved;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::string format = "both";
  int threads = 1;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  json cfg;
  in >> cfg;
  if (!cfg.is_object())
    throw std::invalid_argument("config must be a JSON object");
  return cfg;
}

// Fills global defaults, applies flag overrides, freezes the hash.
Context make_context(json cfg, const GlobalOpts& opts) {
  Context ctx;
  if (!cfg.contains("seed")) cfg["seed"] = 1;
  if (!cfg.contains("out")) cfg["out"] = "rwre_out";
  if (!cfg.contains("format")) cfg["format"] = "both";
  if (!cfg.contains("threads")) cfg["threads"] = 1;
  if (opts.seed) cfg["seed"] = *opts.seed;
  if (opts.out) cfg["out"] = *opts.out;
  if (opts.format) cfg["format"] = *opts.format;
  if (opts.threads) cfg["threads"] = *opts.threads;

  ctx.seed = cfg.at("seed").get<std::uint64_t>();
  ctx.out_dir = cfg.at("out").get<std::string>();
  ctx.format = cfg.at("format").get<std::string>();
  ctx.threads = cfg.at("threads").get<int>();
  if (ctx.format != "csv" && ctx.format != "json" && ctx.format != "both")
    throw std::invalid_argument("format must be one of csv, json, both");
  if (ctx.threads < 1)
    throw std::invalid_argument("threads must be >= 1");
  ctx.resolved = std::move(cfg);
  return ctx;
}

void freeze_and_echo(Context& ctx) {
  // The hash covers the experiment-defining fields only; execution details
  // (output directory, thread count, format) must not change it.
  json hashed = ctx.resolved;
  hashed.erase("out");
  hashed.erase("threads");
  hashed.erase("format");
  ctx.config_hash = rwre::fnv1a64_hex(hashed.dump());
  std::filesystem::create_directories(ctx.out_dir);
  json echoed = ctx.resolved;
  echoed["config_hash"] = ctx.config_hash;
  rwre::atomic_write_file((ctx.out_dir / "resolved_config.json").string(),
                          echoed.dump(2) + "\n");
}

std::string meta_line(const Context& ctx) {
  return "config_hash=" + ctx.config_hash +
         " seed=" + std::to_string(ctx.seed);
}

void stamp(const Context& ctx, json& j) {
  j["config_hash"] = ctx.config_hash;
  j["seed"] = ctx.seed;
}

void write_json(const Context& ctx, const std::string& name, json j) {
  stamp(ctx, j);
  rwre::atomic_write_file((ctx.out_dir / name).string(), j.dump(2) + "\n");
}

void write_csv(const Context& ctx, const std::string& name,
               const std::string& body) {
  rwre::atomic_write_file((ctx.out_dir / name).string(), body);
}

rwre::EnvironmentLaw law_from_config(const json& cfg) {
  if (!cfg.contains("law"))
    throw std::invalid_argument("config is missing the \"law\" spec");
  return rwre::law_from_json(cfg.at("law"));
}

json& section(json& cfg, const std::string& name) {
  if (!cfg.contains(name)) cfg[name] = json::object();
  if (!cfg.at(name).is_object())
    throw std::invalid_argument("config section \"" + name +
                                "\" must be an object");
  return cfg.at(name);
}

template <class T>
T field_or(json& sec, const std::string& key, T fallback) {
  if (!sec.contains(key)) sec[key] = fallback;
  return sec.at(key).get<T>();
}

std::vector<std::int64_t> ladder_from(json& sec, const std::string& key,
                                      std::vector<std::int64_t> fallback) {
  if (!sec.contains(key)) sec[key] = fallback;
  return sec.at(key).get<std::vector<std::int64_t>>();
}

Eigen::ArrayXd grid_from(json& sec, const std::string& key,
                         std::vector<double> fallback) {
  if (!sec.contains(key)) sec[key] = fallback;
  const auto v = sec.at(key).get<std::vector<double>>();
  Eigen::ArrayXd grid(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    grid[static_cast<Eigen::Index>(i)] = v[i];
  return grid;
}

// ---------------------------------------------------------------------------
// Subcommands

int run_classify(Context& ctx) {
  const rwre::EnvironmentLaw law = law_from_config(ctx.resolved);
  freeze_and_echo(ctx);
  const rwre::RegimeReport report = rwre::classify_regime(law);
  json j = rwre::to_json(report);
  j["law"] = rwre::law_to_json(law);
  write_json(ctx, "regime.json", j);
  std::cout << "regime: " << rwre::to_string(report.regime)
            << "  speed: " << report.speed << "\n";
  return kExitOk;
}

int run_speed(Context& ctx) {
  const rwre::EnvironmentLaw law = law_from_config(ctx.resolved);
  json& sec = section(ctx.resolved, "speed");
  const auto n = field_or<std::int64_t>(sec, "n", 100000);
  const auto replicas = field_or<int>(sec, "replicas", 200);
  freeze_and_echo(ctx);

  const rwre::SpeedEstimate est =
      rwre::estimate_speed_mc(law, n, replicas, ctx.seed, ctx.threads);
  if (ctx.format != "json")
    write_csv(ctx, "speed.csv", to_csv(est, meta_line(ctx)));
  if (ctx.format != "csv") {
    json j = {{"n", est.n},
              {"replicas", replicas},
              {"mean_velocity", est.mean},
              {"std_error", est.std_error},
              {"median_velocity", est.median_velocity()},
              {"fraction_positive", est.fraction_positive()},
              {"analytic_speed", rwre::lln_speed(law)}};
    write_json(ctx, "speed.json", j);
  }
  std::cout << "mean velocity: " << est.mean << " +- " << est.std_error
            << "\n";
  return kExitOk;
}

void emit_profile(const Context& ctx, const rwre::RateProfile& profile,
                  const std::string& stem) {
  if (ctx.format != "json")
    write_csv(ctx, stem + ".csv", to_csv(profile, meta_line(ctx)));
  if (ctx.format != "csv") {
    json j = rwre::to_json(profile);
    json wrapped = std::move(j);
    stamp(ctx, wrapped);
    rwre::atomic_write_file((ctx.out_dir / (stem + ".json")).string(),
                            wrapped.dump(2) + "\n");
  }
}

int run_rate(Context& ctx) {
  const rwre::EnvironmentLaw law = law_from_config(ctx.resolved);
  json& sec = section(ctx.resolved, "rate");
  const auto flavor = field_or<std::string>(sec, "flavor", "quenched");
  if (flavor != "quenched" && flavor != "averaged" && flavor != "both")
    throw std::invalid_argument(
        "rate flavor must be one of quenched, averaged, both");
  const Eigen::ArrayXd grid = grid_from(sec, "grid", {0.0, 0.2, 0.4, 0.6});
  const double window = field_or<double>(sec, "window", 2.0);
  const auto replicas = field_or<int>(sec, "replicas", 8000);
  const auto pilots = field_or<int>(sec, "pilot_replicas", 64);
  const auto drift_tol = field_or<double>(sec, "drift_tol", 0.005);
  const auto quenched_ladder =
      ladder_from(sec, "ladder", {250, 500, 750, 1000});
  const auto averaged_ladder =
      ladder_from(sec, "averaged_ladder", {8, 12, 16});
  const auto env_seed = field_or<std::uint64_t>(
      sec, "env_seed", rwre::derive_seed(ctx.seed, 0xE0));
  // Reject impossible enumeration requests before doing any work.
  if ((flavor == "averaged" || flavor == "both") && replicas == 0) {
    for (const std::int64_t n : averaged_ladder)
      if (n > 24)
        throw std::invalid_argument(
            "averaged ladder rung " + std::to_string(n) +
            " exceeds the n <= 24 enumeration budget (replicas = 0)");
  }
  freeze_and_echo(ctx);

  if (flavor == "quenched" || flavor == "both") {
    const rwre::Environment env{law, env_seed, 0};
    const rwre::RateProfile profile =
        rwre::estimate_quenched_rate(env, grid, quenched_ladder, window);
    emit_profile(ctx, profile, "rate_quenched");
    std::cout << "quenched profile written\n";
  }
  if (flavor == "averaged" || flavor == "both") {
    rwre::TiltSchedule tilt;
    tilt.pilot_replicas = pilots;
    tilt.drift_tol = drift_tol;
    const rwre::RateProfile profile = rwre::estimate_averaged_rate(
        law, grid, averaged_ladder, window, tilt, replicas, ctx.seed,
        ctx.threads);
    emit_profile(ctx, profile, "rate_averaged");
    std::cout << "averaged profile written\n";
  }
  return kExitOk;
}

int run_rate_zero(Context& ctx) {
  const rwre::EnvironmentLaw law = law_from_config(ctx.resolved);
  freeze_and_echo(ctx);
  const double value = rwre::rate_at_zero(law);
  const rwre::Interval drift = rwre::mean_drift_range(law);
  json j = {{"rate_at_zero", value},
            {"drift_range", {drift.lo, drift.hi}},
            {"nestling", drift.contains(0.0)}};
  write_json(ctx, "rate_zero.json", j);
  std::cout << "rate at zero: " << value << "\n";
  return kExitOk;
}

int run_entropy_bound(Context& ctx) {
  const rwre::EnvironmentLaw law = law_from_config(ctx.resolved);
  json& sec = section(ctx.resolved, "entropy_bound");
  const auto a = field_or<double>(sec, "a", 0.5);
  const auto horizon = field_or<std::int64_t>(sec, "horizon", 20000);
  const auto replicas = field_or<int>(sec, "replicas", 64);
  freeze_and_echo(ctx);

  const rwre::EntropyEstimate est = rwre::averaged_rate_upper_bound(
      law, a, horizon, replicas, ctx.seed, ctx.threads);
  json j = {{"a", a},
            {"rho", 0.5 * (1.0 + a)},
            {"bound", est.value},
            {"std_error", est.std_error},
            {"horizon", horizon},
            {"replicas", replicas}};
  write_json(ctx, "entropy_bound.json", j);
  std::cout << "upper bound at a=" << a << ": " << est.value << " +- "
            << est.std_error << "\n";
  return kExitOk;
}

int run_superadd(Context& ctx) {
  const rwre::EnvironmentLaw law = law_from_config(ctx.resolved);
  json& sec = section(ctx.resolved, "superadd");
  const auto a = field_or<double>(sec, "a", 0.4);
  const auto window = field_or<double>(sec, "window", 2.0);
  if (!sec.contains("pairs")) sec["pairs"] = json::array({{50, 50}});
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& p : sec.at("pairs"))
    pairs.emplace_back(p.at(0).get<std::int64_t>(),
                       p.at(1).get<std::int64_t>());
  const auto env_seed = field_or<std::uint64_t>(
      sec, "env_seed", rwre::derive_seed(ctx.seed, 0xE0));
  freeze_and_echo(ctx);

  const rwre::Environment env{law, env_seed, 0};
  const rwre::SuperadditivityReport report =
      rwre::check_superadditivity(env, a, pairs, window);
  write_json(ctx, "superadd.json", rwre::to_json(report));
  for (const auto& c : report.cases)
    std::cout << "(k=" << c.k << ", l=" << c.l << ") margin " << c.margin
              << "\n";
  return kExitOk;
}

int run_posterior_demo(Context& ctx) {
  const rwre::EnvironmentLaw law = law_from_config(ctx.resolved);
  json& sec = section(ctx.resolved, "posterior_demo");
  const auto n = field_or<std::int64_t>(sec, "n", 16);
  freeze_and_echo(ctx);

  const rwre::WalkPath path =
      rwre::simulate_averaged(law, n, rwre::derive_seed(ctx.seed, 9));
  json j = {{"n", n},
            {"path", rwre::path_to_json(path)},
            {"endpoint", path.endpoint()},
            {"log_weight", rwre::log_path_weight(law, path)}};
  write_json(ctx, "posterior_demo.json", j);
  std::cout << "endpoint after " << n << " steps: " << path.endpoint()
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate: fast oracle identities over a built-in law corpus.

struct CheckResult {
  std::string name;
  bool pass = true;
  double ms = 0.0;
  std::string detail;
};

using MomentFn =
    std::function<double(const rwre::EnvironmentLaw&, const rwre::CountVector&)>;

std::vector<rwre::EnvironmentLaw> check_corpus() {
  return {rwre::EnvironmentLaw::point_mass(0.7),
          rwre::EnvironmentLaw::finite_mixture({{0.7, 0.5}, {0.6, 0.5}}),
          rwre::EnvironmentLaw::beta(2.0, 2.0, rwre::Interval{0.05, 0.95})};
}

CheckResult check_conjugacy(const MomentFn& mom) {
  CheckResult res{"conjugacy"};
  const auto law = rwre::EnvironmentLaw::beta(2.0, 2.0);
  const rwre::CountVector seen{3, 1};
  const double q_plus = mom(law, seen.bumped(+1)) / mom(law, seen);
  if (std::abs(q_plus - 5.0 / 8.0) > 1e-12) {
    res.pass = false;
    res.detail = "posterior step probability after (3,1) is " +
                 rwre::format_double(q_plus) + ", want 0.625";
    return res;
  }
  for (std::int64_t kr = 0; kr <= 6 && res.pass; ++kr) {
    for (std::int64_t kl = 0; kl <= 6; ++kl) {
      const rwre::CountVector c{kr, kl};
      const double ratio = mom(law, c.bumped(+1)) / mom(law, c);
      const double expect =
          (2.0 + kr) / (4.0 + kr + kl);
      if (std::abs(ratio - expect) > 1e-12) {
        res.pass = false;
        res.detail = "Beta posterior recursion broken at (" +
                     std::to_string(kr) + "," + std::to_string(kl) + ")";
        break;
      }
    }
  }
  return res;
}

CheckResult check_chain_rule(const MomentFn& mom) {
  CheckResult res{"chain-rule"};
  rwre::Rng rng(0x5eedc0de);
  for (const auto& law : check_corpus()) {
    for (int rep = 0; rep < 8 && res.pass; ++rep) {
      rwre::WalkPath path;
      const int len = 4 + static_cast<int>(rng.next_u64() % 9);
      for (int t = 0; t < len; ++t)
        path.increments.push_back(rng.bernoulli(0.5) ? 1 : -1);
      // Product of stepping probabilities along the path, from the
      // library's own kernel.
      std::map<std::int64_t, rwre::CountVector> counts;
      std::int64_t pos = 0;
      double log_steps = 0.0;
      for (int z : path.increments) {
        rwre::CountVector& c = counts[pos];
        log_steps += std::log(rwre::moment(law, c.bumped(z)) /
                              rwre::moment(law, c));
        c.bump(z);
        pos += z;
      }
      // Product of per-site moments through the injectable wrapper; a
      // corrupted moment feeding this route must be caught here.
      double log_sites = 0.0;
      for (const auto& [site, c] : rwre::local_time_counts(path))
        log_sites += std::log(mom(law, c));
      if (std::abs(log_steps - log_sites) > 1e-10) {
        res.pass = false;
        res.detail = "step product and site-moment product disagree for " +
                     law.describe();
      }
    }
  }
  return res;
}

CheckResult check_normalization(const MomentFn& mom) {
  CheckResult res{"normalization"};
  rwre::Rng rng(0xfeed5eed);
  for (const auto& law : check_corpus()) {
    for (int rep = 0; rep < 16 && res.pass; ++rep) {
      const rwre::CountVector c{static_cast<std::int64_t>(rng.next_u64() % 7),
                                static_cast<std::int64_t>(rng.next_u64() % 7)};
      const double denom = mom(law, c);
      const double total =
          (mom(law, c.bumped(+1)) + mom(law, c.bumped(-1))) / denom;
      if (std::abs(total - 1.0) > 1e-12) {
        res.pass = false;
        res.detail = "step probabilities sum to " +
                     rwre::format_double(total) + " for " + law.describe();
      }
    }
  }
  return res;
}

CheckResult check_total_mass(const MomentFn& mom) {
  CheckResult res{"total-mass"};
  const int n = 10;
  for (const auto& law : check_corpus()) {
    double mass = 0.0;
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      rwre::WalkPath path;
      for (int t = 0; t < n; ++t)
        path.increments.push_back((bits >> t) & 1 ? 1 : -1);
      double log_w = 0.0;
      for (const auto& [site, c] : rwre::local_time_counts(path))
        log_w += std::log(mom(law, c));
      mass += std::exp(log_w);
    }
    if (std::abs(mass - 1.0) > 1e-10) {
      res.pass = false;
      res.detail = "path weights sum to " + rwre::format_double(mass) +
                   " for " + law.describe();
      break;
    }
  }
  return res;
}

CheckResult check_degenerate_consistency() {
  CheckResult res{"degenerate-consistency"};
  const auto law = rwre::EnvironmentLaw::point_mass(0.7);
  const rwre::Environment env{law, 42, 0};
  const auto averaged = rwre::averaged_distribution(law, 12);
  const auto quenched = rwre::quenched_distribution(env, 12, 12);
  for (std::int64_t pos = -12; pos <= 12; pos += 2) {
    if (std::abs(averaged.prob(pos) - quenched.prob(pos)) > 1e-12) {
      res.pass = false;
      res.detail = "averaged and quenched laws differ at position " +
                   std::to_string(pos);
      break;
    }
  }
  return res;
}

CheckResult check_rate_zero() {
  CheckResult res{"rate-zero"};
  const double pm = rwre::rate_at_zero(rwre::EnvironmentLaw::point_mass(0.7));
  const double want_pm = -std::log(2.0 * std::sqrt(0.21));
  const double nestling = rwre::rate_at_zero(
      rwre::EnvironmentLaw::finite_mixture({{0.4, 0.5}, {0.7, 0.5}}));
  const double non_nestling = rwre::rate_at_zero(
      rwre::EnvironmentLaw::finite_mixture({{0.6, 0.5}, {0.7, 0.5}}));
  const double want_nn = -std::log(2.0 * std::sqrt(0.24));
  if (std::abs(pm - want_pm) > 1e-9 || std::abs(nestling) > 1e-9 ||
      std::abs(non_nestling - want_nn) > 1e-9) {
    res.pass = false;
    res.detail = "closed-form zero-velocity rates are off";
    return res;
  }
  rwre::Rng rng(0xabcdef12);
  for (int rep = 0; rep < 25; ++rep) {
    const double p1 = 0.05 + 0.9 * rng.next_unit();
    const double p2 = 0.05 + 0.9 * rng.next_unit();
    const auto law =
        rwre::EnvironmentLaw::finite_mixture({{p1, 0.5}, {p2, 0.5}});
    const bool positive = rwre::rate_at_zero(law) > 0.0;
    const bool non_nestling_law =
        !rwre::mean_drift_range(law).contains(0.0);
    if (positive != non_nestling_law) {
      res.pass = false;
      res.detail = "rate/nestling equivalence fails for " + law.describe();
      break;
    }
  }
  return res;
}

CheckResult check_cramer() {
  CheckResult res{"cramer"};
  const rwre::JumpDistribution jump{0.7};
  if (std::abs(rwre::cramer_rate(jump, 0.4)) > 1e-12 ||
      std::abs(rwre::cramer_rate(jump, 1.0) + std::log(0.7)) > 1e-12 ||
      std::abs(rwre::cramer_rate(jump, -1.0) + std::log(0.3)) > 1e-12) {
    res.pass = false;
    res.detail = "closed-form rate values are off";
    return res;
  }
  Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(101, -1.0, 1.0);
  for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
    const double mid = rwre::cramer_rate(jump, grid[i]);
    const double chord = 0.5 * (rwre::cramer_rate(jump, grid[i - 1]) +
                                rwre::cramer_rate(jump, grid[i + 1]));
    if (mid > chord + 1e-9) {
      res.pass = false;
      res.detail = "rate function is not midpoint-convex at a=" +
                   rwre::format_double(grid[i]);
      break;
    }
  }
  return res;
}

int run_validate(Context& ctx, const GlobalOpts& opts) {
  MomentFn mom = [](const rwre::EnvironmentLaw& law,
                    const rwre::CountVector& c) { return rwre::moment(law, c); };
  if (opts.corrupt_moment != 0.0) {
    const double eps = opts.corrupt_moment;
    mom = [eps](const rwre::EnvironmentLaw& law, const rwre::CountVector& c) {
      return rwre::moment(law, c) + (c.zero() ? 0.0 : eps);
    };
  }

  std::vector<std::function<CheckResult()>> checks = {
      [&] { return check_conjugacy(mom); },
      [&] { return check_chain_rule(mom); },
      [&] { return check_normalization(mom); },
      [&] { return check_total_mass(mom); },
      [] { return check_degenerate_consistency(); },
      [] { return check_rate_zero(); },
      [] { return check_cramer(); },
  };

  bool all_pass = true;
  json results = json::array();
  for (auto& check : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult res = check();
    const auto t1 = std::chrono::steady_clock::now();
    res.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (!opts.filter.empty() &&
        res.name.find(opts.filter) == std::string::npos)
      continue;
    all_pass = all_pass && res.pass;
    std::cout << (res.pass ? "PASS " : "FAIL ") << res.name << "  ("
              << res.ms << " ms)";
    if (!res.detail.empty()) std::cout << "  " << res.detail;
    std::cout << "\n";
    results.push_back({{"name", res.name},
                       {"pass", res.pass},
                       {"ms", res.ms},
                       {"detail", res.detail}});
  }
  if (results.empty()) {
    std::cerr << "config error: no validation check matches filter \""
              << opts.filter << "\"\n";
    return kExitConfigError;
  }
  freeze_and_echo(ctx);
  write_json(ctx, "validate.json",
             json{{"checks", results}, {"all_pass", all_pass}});
  return all_pass ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random walks in random environments on the 1D lattice"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "JSON configuration file");
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "master seed");
  std::string out_flag;
  auto* out_opt = app.add_option("--out", out_flag, "output directory");
  std::string format_flag;
  auto* format_opt =
      app.add_option("--format", format_flag, "output format: csv|json|both");
  int threads_flag = 0;
  auto* threads_opt =
      app.add_option("--threads", threads_flag, "worker thread count");
  app.add_option("--filter", opts.filter,
                 "run only validation checks whose name contains this");
  app.add_option("--corrupt-moment", opts.corrupt_moment,
                 "perturb moments inside validate (harness self-test)")
      ->group("");  // hidden

  auto* classify = app.add_subcommand("classify", "regime classification");
  auto* speed = app.add_subcommand("speed", "Monte Carlo velocity estimate");
  auto* rate = app.add_subcommand("rate", "rate-function profiles");
  auto* rate_zero = app.add_subcommand("rate-zero", "zero-velocity rate");
  auto* entropy_bound =
      app.add_subcommand("entropy-bound", "i.i.d. strategy upper bound");
  auto* superadd =
      app.add_subcommand("superadd", "concatenation inequality margins");
  auto* posterior_demo =
      app.add_subcommand("posterior-demo", "one averaged-walk trajectory");
  auto* validate = app.add_subcommand("validate", "fast oracle identities");
  for (CLI::App* sub : app.get_subcommands({}))
    sub->fallthrough(true);  // global flags may follow the subcommand

  CLI11_PARSE(app, argc, argv);

  if (*seed_opt) opts.seed = seed_flag;
  if (*out_opt) opts.out = out_flag;
  if (*format_opt) opts.format = format_flag;
  if (*threads_opt) opts.threads = threads_flag;

  try {
    Context ctx = make_context(load_config(opts.config_path), opts);
    if (*classify) return run_classify(ctx);
    if (*speed) return run_speed(ctx);
    if (*rate) return run_rate(ctx);
    if (*rate_zero) return run_rate_zero(ctx);
    if (*entropy_bound) return run_entropy_bound(ctx);
    if (*superadd) return run_superadd(ctx);
    if (*posterior_demo) return run_posterior_demo(ctx);
    if (*validate) return run_validate(ctx, opts);
    std::cerr << "config error: no subcommand selected\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}
