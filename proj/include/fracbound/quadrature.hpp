#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "fracbound/errors.hpp"

namespace fracbound {

// 15-point Gauss-Kronrod pair on [-1,1] (positive abscissae half).
namespace gk15_detail {
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592, 0.16900472663926790, 0.19035057806478540,
    0.20443294007529889, 0.20948214108472783};
inline constexpr double kWg[4] = {
    0.12948496616886969, 0.27970539148927664, 0.38183005050511894,
    0.41795918367346939};
}  // namespace gk15_detail

struct PanelResult {
  double value = 0.0;
  double error = 0.0;  // |Kronrod - embedded Gauss|, a conservative estimate
};

template <class F>
PanelResult gk15(F&& f, double a, double b) {
  using namespace gk15_detail;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const double fc = f(mid);
  double resk = kWgk[7] * fc, resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(mid - dx) + f(mid + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * fsum;
  }
  return {resk * half, std::abs(resk - resg) * std::abs(half)};
}

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

// Globally adaptive bisection: always split the interval carrying the largest
// error estimate until sum(err) <= max(abs_tol, rel_tol*|sum(value)|).
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                  double abs_tol, long max_evals = 200000) {
  struct Interval {
    double a, b, value, error;
  };
  std::vector<Interval> intervals;
  PanelResult first = gk15(f, a, b);
  intervals.push_back({a, b, first.value, first.error});
  long evals = 15;
  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      total += intervals[i].value;
      err += intervals[i].error;
      if (intervals[i].error > intervals[worst].error) worst = i;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total)))
      return {total, err, evals};
    if (evals + 30 > max_evals)
      throw QuadratureError("adaptive quadrature budget exhausted", total, err);
    const Interval piece = intervals[worst];
    const double mid = 0.5 * (piece.a + piece.b);
    if (!(mid > piece.a && mid < piece.b))  // interval no longer splittable
      throw QuadratureError("adaptive quadrature stalled at machine resolution",
                            piece.value, piece.error);
    PanelResult left = gk15(f, piece.a, mid), right = gk15(f, mid, piece.b);
    intervals[worst] = {piece.a, mid, left.value, left.error};
    intervals.push_back({mid, piece.b, right.value, right.error});
    evals += 30;
  }
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline std::pair<Eigen::ArrayXd, Eigen::ArrayXd> gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre requires n >= 1");
  Eigen::ArrayXd x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double root = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = root;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * root * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      deriv = n * (root * p1 - p0) / (root * root - 1.0);
      const double step = p1 / deriv;
      root -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = -root;
    x[n - 1 - i] = root;
    const double weight = 2.0 / ((1.0 - root * root) * deriv * deriv);
    w[i] = weight;
    w[n - 1 - i] = weight;
  }
  return {x, w};
}

struct AcceleratedSum {
  double value = 0.0;
  double error = 0.0;
};

// Euler-type acceleration for alternating tails: iterated pairwise averaging
// of the partial sums, converging down the averaging table's diagonal.
inline AcceleratedSum accelerate_alternating(const std::vector<double>& terms) {
  if (terms.empty()) return {0.0, 0.0};
  std::vector<double> row(terms.size());
  double s = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    s += terms[i];
    row[i] = s;
  }
  double prev = row.back();
  while (row.size() > 1) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i)
      row[i] = 0.5 * (row[i] + row[i + 1]);
    row.pop_back();
    if (row.size() > 1) prev = row.back();
  }
  return {row[0], std::abs(row[0] - prev)};
}

}  // namespace fracbound
