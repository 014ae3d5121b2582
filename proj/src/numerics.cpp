#include "rwre/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rwre::num {

double log_sum_exp(const Eigen::ArrayXd& v) {
  if (v.size() == 0) return neg_inf;
  const double m = v.maxCoeff();
  if (m == neg_inf) return neg_inf;
  return m + std::log((v - m).exp().sum());
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 3e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double ibeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("ibeta: shape parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lfront =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(lfront);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double ibeta_inv(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  // Plain bisection: ibeta is monotone in x and cheap enough here.
  for (int i = 0; i < 90; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ibeta(a, b, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

// log of ∫ exp(h(t)) dt over [lo,hi] with h the log beta density kernel.
double log_beta_segment_quad(double a, double b, double lo, double hi) {
  auto h = [&](double t) {
    return (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t);
  };
  // Locate the maximum of h on [lo,hi].
  double tstar;
  if (a > 1.0 && b > 1.0) {
    tstar = std::clamp((a - 1.0) / (a + b - 2.0), lo, hi);
  } else {
    tstar = h(lo) >= h(hi) ? lo : hi;
  }
  double best = tstar;
  double hbest = h(tstar);
  for (double cand : {lo, hi}) {
    const double hc = h(cand);
    if (hc > hbest) {
      hbest = hc;
      best = cand;
    }
  }
  const double m = hbest;
  // Pre-split around the peak so the adaptive pass cannot miss a narrow bump.
  const double curv = (a - 1.0) / (best * best) +
                      (b - 1.0) / ((1.0 - best) * (1.0 - best));
  const double sd = curv > 0.0 ? 1.0 / std::sqrt(curv) : (hi - lo);
  std::vector<double> cuts = {lo, hi};
  for (double c : {best - 8.0 * sd, best, best + 8.0 * sd}) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto g = [&](double t) { return std::exp(h(t) - m); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate(g, cuts[i], cuts[i + 1], 1e-12, 1e-16);
  }
  return m + std::log(total);
}

}  // namespace

double log_beta_segment(double a, double b, double lo, double hi) {
  if (!(0.0 < lo && lo <= hi && hi < 1.0))
    throw std::invalid_argument("log_beta_segment: need 0 < lo <= hi < 1");
  const double dI = ibeta(a, b, hi) - ibeta(a, b, lo);
  if (dI >= 1e-4) return log_beta(a, b) + std::log(dI);
  return log_beta_segment_quad(a, b, lo, hi);
}

AffineFit affine_fit(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  const Eigen::Index m = x.size();
  if (m != y.size() || m < 2)
    throw std::invalid_argument("affine_fit: need two or more points");
  Eigen::MatrixXd design(m, 2);
  design.col(0).setOnes();
  design.col(1) = x.matrix();
  const Eigen::Vector2d coef =
      design.colPivHouseholderQr().solve(y.matrix());
  const double rms =
      std::sqrt((design * coef - y.matrix()).squaredNorm() / double(m));
  return {coef(0), coef(1), rms};
}

}  // namespace rwre::num
