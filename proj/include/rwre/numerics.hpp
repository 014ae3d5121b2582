#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwre::num {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(const Eigen::ArrayXd& v);

// Accumulates log(sum_i exp(x_i)) one term at a time without overflow.
class StreamingLogSumExp {
 public:
  void add(double lw) {
    if (lw == neg_inf) return;
    if (lw <= max_) {
      sum_ += std::exp(lw - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - lw) + 1.0;
      max_ = lw;
    }
  }
  bool empty() const { return sum_ == 0.0; }
  double value() const { return empty() ? neg_inf : max_ + std::log(sum_); }

 private:
  double max_ = neg_inf;
  double sum_ = 0.0;
};

double log_beta(double a, double b);

// Regularized incomplete beta function I_x(a,b).
double ibeta(double a, double b, double x);

// Inverse of ibeta in x for fixed (a,b); monotone bisection to ~1e-14.
double ibeta_inv(double a, double b, double p);

// log of the unnormalized integral  ∫_lo^hi t^(a-1) (1-t)^(b-1) dt.
// Uses the incomplete-beta difference when it is well conditioned and falls
// back to quadrature of the shifted log-density otherwise.
double log_beta_segment(double a, double b, double lo, double hi);

struct QuadResult {
  double value;
  double error;
};

namespace detail {

// Gauss-7 / Kronrod-15 nodes and weights on [-1,1].
inline constexpr double kGk15Node[8] = {
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
inline constexpr double kGk15Weight[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
// Embedded Gauss-7 weights, indexed by the kGk15Node positions 0,2,4,6.
inline constexpr double kG7Weight[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

}  // namespace detail

template <class F>
QuadResult gk15(F&& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double f0 = f(c);
  double kron = detail::kGk15Weight[0] * f0;
  double gauss = detail::kG7Weight[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double x = h * detail::kGk15Node[i];
    const double s = f(c - x) + f(c + x);
    kron += detail::kGk15Weight[i] * s;
    if (i % 2 == 0) gauss += detail::kG7Weight[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

namespace detail {

template <class F>
double adapt(F& f, double lo, double hi, double tol, int depth) {
  const QuadResult r = gk15(f, lo, hi);
  if (r.error <= tol || depth >= 48 || (hi - lo) < 1e-300) return r.value;
  const double mid = 0.5 * (lo + hi);
  return adapt(f, lo, mid, 0.5 * tol, depth + 1) +
         adapt(f, mid, hi, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod quadrature of f over [lo,hi]. The tolerance is
// max(abs_floor, rel_tol * |first estimate|).
template <class F>
double integrate(F&& f, double lo, double hi, double rel_tol = 1e-11,
                 double abs_floor = 0.0) {
  if (!(lo <= hi)) throw std::invalid_argument("integrate: lo must be <= hi");
  if (lo == hi) return 0.0;
  const QuadResult first = gk15(f, lo, hi);
  double tol = rel_tol * std::abs(first.value);
  if (tol < abs_floor) tol = abs_floor;
  if (tol <= 0.0) tol = 1e-300;
  return detail::adapt(f, lo, hi, tol, 0);
}

struct AffineFit {
  double intercept;
  double slope;
  double residual_rms;
};

// Least-squares fit y ~ intercept + slope * x.
AffineFit affine_fit(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

// Root of a monotone function by bisection; f(lo) and f(hi) must straddle 0.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: endpoints do not straddle a root");
  for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace rwre::num
