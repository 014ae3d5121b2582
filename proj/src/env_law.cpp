#include "rwre/env_law.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rwre/numerics.hpp"

namespace rwre {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

}  // namespace

EnvironmentLaw EnvironmentLaw::point_mass(double p) {
  require(valid_probability(p),
          "point mass probability must lie strictly inside (0,1)");
  EnvironmentLaw law;
  law.kind_ = Kind::point;
  law.p_ = p;
  return law;
}

EnvironmentLaw EnvironmentLaw::finite_mixture(
    const std::vector<std::pair<double, double>>& atoms_pw) {
  require(!atoms_pw.empty(), "mixture needs at least one atom");
  EnvironmentLaw law;
  law.kind_ = Kind::mixture;
  law.atom_p_.resize(static_cast<Eigen::Index>(atoms_pw.size()));
  law.atom_w_.resize(static_cast<Eigen::Index>(atoms_pw.size()));
  double wsum = 0.0;
  for (std::size_t i = 0; i < atoms_pw.size(); ++i) {
    const auto [p, w] = atoms_pw[i];
    require(valid_probability(p),
            "mixture atom probability must lie strictly inside (0,1)");
    require(w > 0.0, "mixture weights must be strictly positive");
    law.atom_p_[static_cast<Eigen::Index>(i)] = p;
    law.atom_w_[static_cast<Eigen::Index>(i)] = w;
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "mixture weights must sum to 1 (got " << wsum << ")";
    throw std::invalid_argument(msg.str());
  }
  return law;
}

EnvironmentLaw EnvironmentLaw::beta(double alpha, double beta,
                                    std::optional<Interval> clip) {
  require(alpha > 0.0 && beta > 0.0,
          "beta shape parameters must be positive");
  if (clip) {
    require(0.0 < clip->lo && clip->lo <= clip->hi && clip->hi < 1.0,
            "clip interval must satisfy 0 < lo <= hi < 1");
  }
  EnvironmentLaw law;
  law.kind_ = Kind::beta;
  law.alpha_ = alpha;
  law.beta_ = beta;
  law.clip_ = clip;
  law.log_clip_norm_ =
      clip ? num::log_beta_segment(alpha, beta, clip->lo, clip->hi)
           : num::log_beta(alpha, beta);
  return law;
}

double EnvironmentLaw::point_p() const {
  if (kind_ != Kind::point)
    throw std::logic_error("point_p: not a point-mass law");
  return p_;
}

const Eigen::ArrayXd& EnvironmentLaw::atom_p() const {
  if (kind_ != Kind::mixture)
    throw std::logic_error("atom_p: not a mixture law");
  return atom_p_;
}

const Eigen::ArrayXd& EnvironmentLaw::atom_w() const {
  if (kind_ != Kind::mixture)
    throw std::logic_error("atom_w: not a mixture law");
  return atom_w_;
}

double EnvironmentLaw::alpha() const {
  if (kind_ != Kind::beta) throw std::logic_error("alpha: not a Beta law");
  return alpha_;
}

double EnvironmentLaw::beta_param() const {
  if (kind_ != Kind::beta)
    throw std::logic_error("beta_param: not a Beta law");
  return beta_;
}

const std::optional<Interval>& EnvironmentLaw::clip() const {
  if (kind_ != Kind::beta) throw std::logic_error("clip: not a Beta law");
  return clip_;
}

double EnvironmentLaw::log_clip_norm() const {
  if (kind_ != Kind::beta)
    throw std::logic_error("log_clip_norm: not a Beta law");
  return log_clip_norm_;
}

std::string EnvironmentLaw::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::point:
      out << "point(" << p_ << ")";
      break;
    case Kind::mixture:
      out << "mixture(";
      for (Eigen::Index i = 0; i < atom_p_.size(); ++i) {
        if (i) out << ", ";
        out << atom_p_[i] << ":" << atom_w_[i];
      }
      out << ")";
      break;
    case Kind::beta:
      out << "beta(" << alpha_ << ", " << beta_ << ")";
      if (clip_) out << " clip [" << clip_->lo << ", " << clip_->hi << "]";
      break;
  }
  return out.str();
}

double log_moment(const EnvironmentLaw& law, const CountVector& counts) {
  if (counts.right < 0 || counts.left < 0)
    throw std::invalid_argument("counts must be nonnegative");
  if (counts.zero()) return 0.0;
  const double kr = static_cast<double>(counts.right);
  const double kl = static_cast<double>(counts.left);
  switch (law.kind()) {
    case EnvironmentLaw::Kind::point:
      return kr * std::log(law.point_p()) + kl * std::log1p(-law.point_p());
    case EnvironmentLaw::Kind::mixture: {
      const Eigen::ArrayXd lw = law.atom_w().log() + kr * law.atom_p().log() +
                                kl * (1.0 - law.atom_p()).log();
      return num::log_sum_exp(lw);
    }
    case EnvironmentLaw::Kind::beta: {
      const double a = law.alpha() + kr;
      const double b = law.beta_param() + kl;
      if (!law.clip())
        return num::log_beta(a, b) -
               num::log_beta(law.alpha(), law.beta_param());
      return num::log_beta_segment(a, b, law.clip()->lo, law.clip()->hi) -
             law.log_clip_norm();
    }
  }
  throw std::logic_error("log_moment: unknown law kind");
}

double moment(const EnvironmentLaw& law, const CountVector& counts) {
  if (counts.zero()) return 1.0;
  return std::exp(log_moment(law, counts));
}

Interval support_hull(const EnvironmentLaw& law) {
  switch (law.kind()) {
    case EnvironmentLaw::Kind::point:
      return {law.point_p(), law.point_p()};
    case EnvironmentLaw::Kind::mixture:
      return {law.atom_p().minCoeff(), law.atom_p().maxCoeff()};
    case EnvironmentLaw::Kind::beta:
      if (law.clip()) return *law.clip();
      return {0.0, 1.0};
  }
  throw std::logic_error("support_hull: unknown law kind");
}

Interval mean_drift_range(const EnvironmentLaw& law) {
  const Interval hull = support_hull(law);
  return {2.0 * hull.lo - 1.0, 2.0 * hull.hi - 1.0};
}

namespace {

double apply_functional(LawFunctional f, double p) {
  switch (f) {
    case LawFunctional::log_ratio:
      return std::log(p) - std::log1p(-p);
    case LawFunctional::q_over_p:
      return (1.0 - p) / p;
    case LawFunctional::p_over_q:
      return p / (1.0 - p);
  }
  throw std::logic_error("unknown functional");
}

}  // namespace

double expectation(const EnvironmentLaw& law, LawFunctional f) {
  switch (law.kind()) {
    case EnvironmentLaw::Kind::point:
      return apply_functional(f, law.point_p());
    case EnvironmentLaw::Kind::mixture: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < law.atom_p().size(); ++i)
        acc += law.atom_w()[i] * apply_functional(f, law.atom_p()[i]);
      return acc;
    }
    case EnvironmentLaw::Kind::beta: {
      if (!law.clip())
        throw std::domain_error(
            "expectation: unclipped Beta law; the integrand is only "
            "guaranteed integrable on a clipped support");
      const double a = law.alpha();
      const double b = law.beta_param();
      const double logz = law.log_clip_norm();
      auto density_times_f = [&](double t) {
        const double logd =
            (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - logz;
        return apply_functional(f, t) * std::exp(logd);
      };
      return num::integrate(density_times_f, law.clip()->lo, law.clip()->hi,
                            1e-11, 1e-13);
    }
  }
  throw std::logic_error("expectation: unknown law kind");
}

EnvironmentLaw mirrored(const EnvironmentLaw& law) {
  switch (law.kind()) {
    case EnvironmentLaw::Kind::point:
      return EnvironmentLaw::point_mass(1.0 - law.point_p());
    case EnvironmentLaw::Kind::mixture: {
      std::vector<std::pair<double, double>> atoms;
      for (Eigen::Index i = 0; i < law.atom_p().size(); ++i)
        atoms.emplace_back(1.0 - law.atom_p()[i], law.atom_w()[i]);
      return EnvironmentLaw::finite_mixture(atoms);
    }
    case EnvironmentLaw::Kind::beta: {
      std::optional<Interval> clip;
      if (law.clip()) clip = Interval{1.0 - law.clip()->hi, 1.0 - law.clip()->lo};
      return EnvironmentLaw::beta(law.beta_param(), law.alpha(), clip);
    }
  }
  throw std::logic_error("mirrored: unknown law kind");
}

double quantile(const EnvironmentLaw& law, double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("quantile: u must lie in (0,1)");
  switch (law.kind()) {
    case EnvironmentLaw::Kind::point:
      return law.point_p();
    case EnvironmentLaw::Kind::mixture: {
      double cum = 0.0;
      const Eigen::Index m = law.atom_p().size();
      for (Eigen::Index i = 0; i < m; ++i) {
        cum += law.atom_w()[i];
        if (u <= cum) return law.atom_p()[i];
      }
      return law.atom_p()[m - 1];
    }
    case EnvironmentLaw::Kind::beta: {
      const double a = law.alpha();
      const double b = law.beta_param();
      double target = u;
      if (law.clip()) {
        const double ilo = num::ibeta(a, b, law.clip()->lo);
        const double ihi = num::ibeta(a, b, law.clip()->hi);
        target = ilo + u * (ihi - ilo);
      }
      double x = num::ibeta_inv(a, b, target);
      if (law.clip()) x = std::clamp(x, law.clip()->lo, law.clip()->hi);
      return std::clamp(x, 1e-15, 1.0 - 1e-15);
    }
  }
  throw std::logic_error("quantile: unknown law kind");
}

nlohmann::json law_to_json(const EnvironmentLaw& law) {
  nlohmann::json j;
  switch (law.kind()) {
    case EnvironmentLaw::Kind::point:
      j["kind"] = "point";
      j["p"] = law.point_p();
      break;
    case EnvironmentLaw::Kind::mixture: {
      j["kind"] = "mixture";
      nlohmann::json atoms = nlohmann::json::array();
      for (Eigen::Index i = 0; i < law.atom_p().size(); ++i)
        atoms.push_back({{"p", law.atom_p()[i]}, {"w", law.atom_w()[i]}});
      j["atoms"] = atoms;
      break;
    }
    case EnvironmentLaw::Kind::beta:
      j["kind"] = "beta";
      j["alpha"] = law.alpha();
      j["beta"] = law.beta_param();
      if (law.clip()) j["clip"] = {law.clip()->lo, law.clip()->hi};
      break;
  }
  return j;
}

EnvironmentLaw law_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw std::invalid_argument("law spec must be an object with a \"kind\"");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "point") {
    return EnvironmentLaw::point_mass(spec.at("p").get<double>());
  }
  if (kind == "mixture") {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : spec.at("atoms"))
      atoms.emplace_back(a.at("p").get<double>(), a.at("w").get<double>());
    return EnvironmentLaw::finite_mixture(atoms);
  }
  if (kind == "beta") {
    std::optional<Interval> clip;
    if (spec.contains("clip") && !spec.at("clip").is_null()) {
      const auto& c = spec.at("clip");
      if (!c.is_array() || c.size() != 2)
        throw std::invalid_argument("clip must be a [lo, hi] pair");
      clip = Interval{c.at(0).get<double>(), c.at(1).get<double>()};
    }
    return EnvironmentLaw::beta(spec.at("alpha").get<double>(),
                                spec.at("beta").get<double>(), clip);
  }
  throw std::invalid_argument("unknown law kind \"" + kind + "\"");
}

}  // namespace rwre
