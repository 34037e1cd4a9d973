#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fracbound/errors.hpp"

namespace fracbound {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Validated fractional index with the denominator diagnostics every series
// evaluator shares: margins of sin((2m+1)pi/alpha) and cos(m*alpha*pi/2).
class FractionalIndex {
 public:
  explicit FractionalIndex(double alpha) : alpha_(alpha) {
    if (!(alpha > 1.0) || !(alpha <= 2.0) || !std::isfinite(alpha))
      throw std::domain_error("index must satisfy 1 < alpha <= 2");
  }

  double value() const noexcept { return alpha_; }

  // Smallest series denominator over both families up to m_max; nonincreasing
  // in m_max, identically 1 at alpha = 2.
  double resonance_margin(int m_max) const {
    if (m_max < 0) throw std::domain_error("m_max must be nonnegative");
    double margin = std::abs(std::sin(kPi / alpha_));
    for (int m = 1; m <= m_max; ++m) {
      margin = std::min(margin, std::abs(std::sin((2 * m + 1) * kPi / alpha_)));
      margin = std::min(margin, std::abs(std::cos(m * alpha_ * kPi / 2)));
    }
    return margin;
  }

 private:
  double alpha_;
};

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma requires x > 0");
  return std::lgamma(x);
}

// psi(x) = d/dx ln Gamma(x) for x > 0: recurrence below 6, then the
// asymptotic expansion with Bernoulli coefficients.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma requires x > 0");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  // B_2/(2) x^-2, B_4/(4) x^-4, ... : 1/12, -1/120, 1/252, -1/240, 1/132, -691/32760
  double series = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
  return result + std::log(x) - 0.5 * inv - series;
}

// Pole locations surviving the even-integer cancellation: odd integers 2n+1
// and the index multiples m*alpha. A collision -- an alpha-pole within 1e-9
// of an odd pole -- merges two simple poles and marks the rational case the
// series machinery refuses. Even-integer hits (alpha = 2: {2, 4, ...}) are
// harmless: no denominator involves them.
struct PoleSet {
  std::vector<double> odd_poles;
  std::vector<double> alpha_poles;
  int m_max = 0;
  bool collision = false;
  double min_pair_distance = std::numeric_limits<double>::infinity();
};

inline constexpr double kCollisionTol = 1e-9;

inline PoleSet reduced_pole_set(const FractionalIndex& alpha, int m_max) {
  if (m_max < 1) throw std::domain_error("m_max must be >= 1");
  PoleSet set;
  set.m_max = m_max;
  set.odd_poles.reserve(static_cast<std::size_t>(m_max) + 1);
  set.alpha_poles.reserve(static_cast<std::size_t>(m_max));
  for (int n = 0; n <= m_max; ++n) set.odd_poles.push_back(2.0 * n + 1.0);
  const double a = alpha.value();
  for (int m = 1; m <= m_max; ++m) {
    const double pole = m * a;
    set.alpha_poles.push_back(pole);
    const double nearest_odd = 2.0 * std::round(0.5 * (pole - 1.0)) + 1.0;
    const double dist = std::abs(pole - nearest_odd);
    set.min_pair_distance = std::min(set.min_pair_distance, dist);
    if (dist < kCollisionTol) set.collision = true;
  }
  return set;
}

// True means series evaluators must refuse and callers use the quadrature oracle.
inline bool resonance_check(const FractionalIndex& alpha, int m_max = 40,
                            double threshold = 1e-8) {
  if (!(threshold > 0.0)) throw std::domain_error("threshold must be positive");
  if (alpha.resonance_margin(m_max) < threshold) return true;
  return reduced_pole_set(alpha, m_max).collision;
}

// Partial sum of the Mellin-inversion identity sum_j (-1)^j u^(alpha j)/Gamma(1+j),
// which converges to exp(-u^alpha); used as a machinery self-test.
inline double mellin_exp_partial_sum(double u, const FractionalIndex& alpha, int N) {
  if (u < 0.0) throw std::domain_error("u must be nonnegative");
  if (N < 0) throw std::domain_error("N must be nonnegative");
  if (u == 0.0) return 1.0;
  // Terms peak near exp(+u^alpha) before cancelling down to exp(-u^alpha), so
  // run the term recurrence and the accumulation in extended precision; the
  // peak-term rounding would otherwise swamp the 1e-12 identity tolerance.
  const long double x =
      std::pow(static_cast<long double>(u), static_cast<long double>(alpha.value()));
  long double term = 1.0L, sum = 1.0L;
  for (int j = 1; j <= N; ++j) {
    term *= -x / j;
    sum += term;
  }
  return static_cast<double>(sum);
}

}  // namespace fracbound
