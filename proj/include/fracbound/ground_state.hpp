#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracbound/birman_schwinger.hpp"
#include "fracbound/errors.hpp"
#include "fracbound/greens.hpp"
#include "fracbound/potentials.hpp"
#include "fracbound/quadrature.hpp"

namespace fracbound {

// H(g, kappa) = <u, (I - g*fin)^(-1) u>: the scalar closing the bound-state
// condition once the rank-one zero-distance part is folded out of the kernel.
// Demands the finite part stay strictly subcritical in Hilbert-Schmidt norm.
inline double h_function(double g, const BSKernel& kernel) {
  if (!(g >= 0.0) || !std::isfinite(g)) throw std::domain_error("g must be nonnegative");
  const double gnorm = g * kernel.fin.norm();
  if (gnorm >= 1.0) throw WeakCouplingViolatedError(gnorm);
  const double condition = (1.0 + gnorm) / (1.0 - gnorm);
  if (condition > 1e12) throw IllConditionedError(condition);
  const Eigen::Index n = kernel.rule.n();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - g * kernel.fin;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw IllConditionedError(condition);
  const Eigen::VectorXd y = ldlt.solve(kernel.u);
  return kernel.u.dot(y);
}

inline double h_function(double g, double kappa, const Potential& V,
                         const QuadratureRule& rule, const FractionalIndex& alpha,
                         double K_alpha) {
  const GreensContext ctx(alpha, K_alpha, kappa);
  return h_function(g, assemble(V, rule, ctx));
}

// kappa^(2(1-1/alpha)) scale divisor D = alpha K^(1/alpha) sin(pi/alpha).
inline double scale_divisor(const FractionalIndex& alpha, double K_alpha) {
  const double a = alpha.value();
  return a * std::pow(K_alpha, 1.0 / a) * std::sin(kPi / a);
}

struct GroundStateSolution {
  double g = 0.0;
  double kappa_star = 0.0;
  double energy = 0.0;            // E = kappa_star^2
  double kappa_pow = 0.0;         // kappa_star^(2(1-1/alpha))
  double expansion_kappa_pow = 0.0;  // two-term weak-coupling prediction
  double h_value = 0.0;
  int iterations = 0;
  double residual = 0.0;          // |F(kappa_star)| / kappa_star^(2(1-1/alpha))
  double lambda_residual = 0.0;   // |g * lambda_max(kappa_star) - 1|
  int sign_changes = 1;
  double variation = 0.0;         // g * (max H - min H) / D over the scan window
};

// First-order coupling integral: integral of |V|.
inline double first_order_norm(const Potential& V) { return integral_abs(V).value; }

struct WeakCouplingTerms {
  double first = 0.0;   // g ||V||_1 / D
  double second = 0.0;  // g^2 double integral of |V||x-y|^(alpha-1)|V| over C2
};

// Two-term expansion of kappa^(2(1-1/alpha)); the second-order coefficient is
// 1 / (2 K^(1+1/alpha) Gamma(1+alpha) sin(pi/alpha) cos(alpha pi/2)), negative
// on (1, 2), so the correction reduces the first-order value.
inline WeakCouplingTerms weak_coupling_terms(double g, const Potential& V,
                                             const FractionalIndex& alpha,
                                             double K_alpha) {
  const double a = alpha.value();
  const double D = scale_divisor(alpha, K_alpha);
  WeakCouplingTerms t;
  t.first = g * integral_abs(V).value / D;

  const double X = V.support_halfwidth(1e-14);
  const auto inner = [&](double x) {
    const auto f = [&](double y) {
      return V.abs_at(y) * std::pow(std::abs(x - y), a - 1.0);
    };
    double s = 0.0;
    if (x > -X) s += integrate_adaptive(f, -X, x, 1e-10, 0.0).value;
    if (x < X) s += integrate_adaptive(f, x, X, 1e-10, 0.0).value;
    return s;
  };
  const auto outer = [&](double x) { return V.abs_at(x) * inner(x); };
  const double I2 = 2.0 * integrate_adaptive(outer, 0.0, X, 1e-9, 0.0).value;
  const double c2 = 1.0 / (2.0 * std::pow(K_alpha, 1.0 + 1.0 / a) *
                           std::tgamma(1.0 + a) * std::sin(kPi / a) *
                           std::cos(a * kPi / 2.0));
  t.second = g * g * c2 * I2;
  return t;
}

inline double weak_coupling_expansion(double g, const Potential& V,
                                      const FractionalIndex& alpha, double K_alpha) {
  const WeakCouplingTerms t = weak_coupling_terms(g, V, alpha, K_alpha);
  return t.first + t.second;
}

struct UniquenessReport {
  int sign_changes = 0;
  double variation = 0.0;  // g * (max H - min H) / D across the window
  double h_min = 0.0, h_max = 0.0;
};

// Scan F(kappa) = kappa^(2(1-1/alpha)) - g H(kappa)/D on a geometric grid;
// more than one sign change falsifies uniqueness of the crossing.
inline UniquenessReport uniqueness_certificate(double g, double kappa_lo,
                                               double kappa_hi, const Potential& V,
                                               const QuadratureRule& rule,
                                               const FractionalIndex& alpha,
                                               double K_alpha, int n_samples = 25) {
  if (!(kappa_lo > 0.0) || !(kappa_hi > kappa_lo))
    throw std::domain_error("need 0 < kappa_lo < kappa_hi");
  if (n_samples < 3) throw std::domain_error("need at least three samples");
  const double D = scale_divisor(alpha, K_alpha);
  const double p = 2.0 * (1.0 - 1.0 / alpha.value());
  const double ratio = std::pow(kappa_hi / kappa_lo, 1.0 / (n_samples - 1));
  UniquenessReport rep;
  double prev = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double kappa = kappa_lo * std::pow(ratio, i);
    const double H = h_function(g, kappa, V, rule, alpha, K_alpha);
    if (i == 0) {
      rep.h_min = rep.h_max = H;
    } else {
      rep.h_min = std::min(rep.h_min, H);
      rep.h_max = std::max(rep.h_max, H);
    }
    const double F = std::pow(kappa, p) - g * H / D;
    if (i > 0 && ((prev < 0.0 && F >= 0.0) || (prev >= 0.0 && F < 0.0)))
      ++rep.sign_changes;
    prev = F;
  }
  rep.variation = g * (rep.h_max - rep.h_min) / D;
  if (rep.sign_changes > 1) throw MultipleRootsError(rep.sign_changes);
  return rep;
}

// Solve kappa^(2(1-1/alpha)) = g H(g, kappa) / D for the unique small-g root
// by bracketing and bisection, then cross-check against the eigenvalue route.
inline GroundStateSolution solve_kappa(double g, const Potential& V,
                                       const QuadratureRule& rule,
                                       const FractionalIndex& alpha, double K_alpha,
                                       double rel_tol = 1e-12) {
  if (!(g > 0.0) || !std::isfinite(g)) throw std::domain_error("g must be positive");
  const double D = scale_divisor(alpha, K_alpha);
  const double p = 2.0 * (1.0 - 1.0 / alpha.value());

  // Discrete first-order seed: u'u approximates the integral of |V|.
  Eigen::VectorXd u(rule.n());
  for (Eigen::Index i = 0; i < rule.n(); ++i)
    u[i] = std::sqrt(rule.weights[i]) * V.sqrt_abs_at(rule.nodes[i]);
  const double kappa0 = std::pow(g * u.squaredNorm() / D, 1.0 / p);

  const auto F = [&](double kappa) {
    return std::pow(kappa, p) - g * h_function(g, kappa, V, rule, alpha, K_alpha) / D;
  };

  double lo = kappa0 / 50.0, hi = kappa0 * 2.0;
  double flo = F(lo);
  for (int tries = 0; flo >= 0.0; ++tries) {
    if (tries >= 40) throw NoBracketError(lo, hi);
    lo *= 0.1;
    flo = F(lo);
  }
  double fhi = F(hi);
  for (int tries = 0; fhi <= 0.0; ++tries) {
    if (tries >= 60) throw NoBracketError(lo, hi);
    hi *= 2.0;
    fhi = F(hi);
  }

  GroundStateSolution sol;
  sol.g = g;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    if ((hi - lo) <= rel_tol * mid) break;
    const double fm = F(mid);
    ++sol.iterations;
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  sol.kappa_star = mid;
  sol.energy = mid * mid;
  sol.kappa_pow = std::pow(mid, p);
  sol.expansion_kappa_pow = weak_coupling_expansion(g, V, alpha, K_alpha);

  const GreensContext ctx(alpha, K_alpha, mid);
  const BSKernel kernel = assemble(V, rule, ctx);
  sol.h_value = h_function(g, kernel);
  sol.residual = std::abs(sol.kappa_pow - g * sol.h_value / D) / sol.kappa_pow;
  if (sol.residual > 1e-10)
    throw std::runtime_error("fixed-point residual above tolerance after bisection");
  sol.lambda_residual = std::abs(g * top_eigenpair(kernel).lambda - 1.0);

  // Light uniqueness scan around the root (wider window than the bracket).
  const UniquenessReport rep = uniqueness_certificate(
      g, mid / 50.0, std::min(50.0 * mid, 1.0), V, rule, alpha, K_alpha, 9);
  sol.sign_changes = rep.sign_changes;
  sol.variation = rep.variation;
  return sol;
}

// Independent route: find kappa with g * lambda_max(kappa) = 1 directly on the
// full kernel spectrum; lambda_max decreases in kappa.
inline double solve_kappa_lambda(double g, const Potential& V,
                                 const QuadratureRule& rule,
                                 const FractionalIndex& alpha, double K_alpha,
                                 double rel_tol = 1e-12) {
  if (!(g > 0.0) || !std::isfinite(g)) throw std::domain_error("g must be positive");
  const auto h = [&](double kappa) {
    const GreensContext ctx(alpha, K_alpha, kappa);
    return g * top_eigenpair(assemble(V, rule, ctx)).lambda - 1.0;
  };
  Eigen::VectorXd u(rule.n());
  for (Eigen::Index i = 0; i < rule.n(); ++i)
    u[i] = std::sqrt(rule.weights[i]) * V.sqrt_abs_at(rule.nodes[i]);
  const double D = scale_divisor(alpha, K_alpha);
  const double p = 2.0 * (1.0 - 1.0 / alpha.value());
  const double kappa0 = std::pow(g * u.squaredNorm() / D, 1.0 / p);

  double lo = kappa0 / 50.0, hi = kappa0 * 2.0;
  double flo = h(lo);
  for (int tries = 0; flo <= 0.0; ++tries) {
    if (tries >= 40) throw NoBracketError(lo, hi);
    lo *= 0.1;
    flo = h(lo);
  }
  double fhi = h(hi);
  for (int tries = 0; fhi >= 0.0; ++tries) {
    if (tries >= 60) throw NoBracketError(lo, hi);
    hi *= 2.0;
    fhi = h(hi);
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    if ((hi - lo) <= rel_tol * mid) break;
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return mid;
}

}  // namespace fracbound
