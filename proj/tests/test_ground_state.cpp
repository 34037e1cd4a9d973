#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "fracbound/ground_state.hpp"

using namespace fracbound;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kSqrtPi = 1.7724538509055160273;
const double kSqrt2Pi = 2.5066282746310002;

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}
}  // namespace

TEST_SUITE("ground_state") {

TEST_CASE("scalar closure H: identity limit, Neumann sums, guards") {
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 64);
  const GreensContext ctx(kSqrt2, 1.0, 0.1);
  const BSKernel k = assemble(V, rule, ctx);

  // zero coupling: identity resolvent, H reduces to the |V| integral
  const double h0 = h_function(0.0, k);
  CHECK(rel_close(h0, k.u.squaredNorm(), 1e-14));
  CHECK(rel_close(h0, kSqrtPi, 1e-8));

  const Potential V4 = make_gaussian(4.0, 1.0);
  const QuadratureRule rule4 = QuadratureRule::for_potential(V4, 12.0, 64);
  const double h4 = h_function(0.0, assemble(V4, rule4, ctx));
  CHECK(rel_close(h4, 4.0 * kSqrtPi, 1e-8));

  // direct solve against explicit Neumann partial sums: each extra order
  // tightens the agreement, and the remainder obeys the geometric tail bound
  const double g = 0.05;
  const double H = h_function(g, k);
  const Eigen::VectorXd fu = k.fin * k.u;
  const Eigen::VectorXd ffu = k.fin * fu;
  const double s1 = k.u.squaredNorm() + g * k.u.dot(fu);
  const double s2 = s1 + g * g * fu.squaredNorm();
  const double s3 = s2 + g * g * g * fu.dot(ffu);
  CHECK(std::abs(H - s1) > std::abs(H - s2));
  CHECK(std::abs(H - s2) > std::abs(H - s3));
  const double gf = g * k.fin.norm();
  CHECK(gf < 1.0);
  CHECK(std::abs(H - s3) <=
        2.0 * k.u.squaredNorm() * gf * gf * gf * gf / (1.0 - gf));

  // overload plumbing: kernel route and parameter route agree exactly
  CHECK(H == h_function(g, 0.1, V, rule, FractionalIndex(kSqrt2), 1.0));

  CHECK_THROWS_AS(h_function(-1.0, k), std::domain_error);
  CHECK_THROWS_AS(h_function(std::numeric_limits<double>::quiet_NaN(), k),
                  std::domain_error);
  const double g_bad = 1.1 / k.fin.norm();
  CHECK_THROWS_AS(h_function(g_bad, k), WeakCouplingViolatedError);
  const double g_ill = (1.0 - 1e-13) / k.fin.norm();
  CHECK_THROWS_AS(h_function(g_ill, k), IllConditionedError);
}

TEST_CASE("scale divisor: alpha = 2 values and zero-distance identity") {
  CHECK(rel_close(scale_divisor(FractionalIndex(2.0), 1.0), 2.0, 1e-15));
  CHECK(rel_close(scale_divisor(FractionalIndex(2.0), 2.25), 3.0, 1e-15));
  // D is exactly the reciprocal of the kappa-free factor in the singular part
  for (double a : {4.0 / 3.0, kSqrt2, 1.9}) {
    for (double K : {1.0, 1.3}) {
      for (double kappa : {0.3, 1.7}) {
        const GreensContext ctx(a, K, kappa);
        const double lhs = scale_divisor(FractionalIndex(a), K) * ctx.singular_value();
        CHECK(rel_close(lhs, std::pow(kappa, 2.0 / a - 2.0), 1e-13));
      }
    }
  }
}

TEST_CASE("weak-coupling terms: first-order norm, signs, alpha = 2 forms") {
  const Potential V = make_gaussian(1.0, 1.0);
  CHECK(rel_close(first_order_norm(V), kSqrtPi, 1e-9));

  for (double a : {kSqrt2, 1.2 + std::sqrt(3.0) * 1e-3,
                   1.9 + std::sqrt(5.0) * 1e-4, 2.0}) {
    const WeakCouplingTerms t = weak_coupling_terms(0.1, V, FractionalIndex(a), 1.0);
    CHECK(t.first > 0.0);
    CHECK(t.second < 0.0);
  }

  // alpha = 2, K = 1: second term is -g^2/4 * convolution integral sqrt(2 pi)
  const WeakCouplingTerms t2 = weak_coupling_terms(0.1, V, FractionalIndex(2.0), 1.0);
  CHECK(rel_close(t2.first, 0.1 * kSqrtPi / 2.0, 1e-9));
  CHECK(rel_close(t2.second, -0.01 * kSqrt2Pi / 4.0, 1e-7));
  // K dependence of the second term: K^(-(1 + 1/alpha))
  const WeakCouplingTerms t2K = weak_coupling_terms(0.1, V, FractionalIndex(2.0), 4.0);
  CHECK(rel_close(t2.second / t2K.second, 8.0, 1e-7));

  // the expansion is the plain two-term sum, and tends to first order as g -> 0
  const double g = 1e-4;
  const WeakCouplingTerms ts = weak_coupling_terms(g, V, FractionalIndex(kSqrt2), 1.0);
  const double ex = weak_coupling_expansion(g, V, FractionalIndex(kSqrt2), 1.0);
  CHECK(rel_close(ex, ts.first + ts.second, 1e-13));
  const double ratio =
      ex / (g * first_order_norm(V) / scale_divisor(FractionalIndex(kSqrt2), 1.0));
  CHECK(ratio < 1.0);
  CHECK(std::abs(ratio - 1.0) <= 3e-4);
}

TEST_CASE("pinned bound-state roots at alpha = sqrt2") {
  const FractionalIndex alpha(kSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 320);

  const GroundStateSolution s1 = solve_kappa(0.1, V, rule, alpha, 1.0);
  const GroundStateSolution s2 = solve_kappa(0.05, V, rule, alpha, 1.0);

  // independently computed reference roots for this discretization
  CHECK(rel_close(s1.kappa_star, 3.421901958e-02, 1e-5));
  CHECK(rel_close(s2.kappa_star, 1.165353908e-02, 1e-5));

  CHECK(s1.g == 0.1);
  CHECK(s1.energy == s1.kappa_star * s1.kappa_star);
  CHECK(s2.energy == s2.kappa_star * s2.kappa_star);
  const double p = 2.0 * (1.0 - 1.0 / kSqrt2);
  CHECK(rel_close(s1.kappa_pow, std::pow(s1.kappa_star, p), 1e-14));

  CHECK(s1.residual <= 1e-10);
  CHECK(s2.residual <= 1e-10);
  CHECK(s1.lambda_residual >= 0.0);
  CHECK(s1.lambda_residual <= 1e-6);
  CHECK(s2.lambda_residual <= 1e-6);
  CHECK(s1.sign_changes == 1);
  CHECK(s2.sign_changes == 1);
  CHECK(s1.iterations >= 30);
  CHECK(s1.iterations <= 200);

  CHECK(s1.h_value > 1.4);
  CHECK(s1.h_value < 1.8);
  CHECK(s2.h_value > 1.6);
  CHECK(s2.h_value < 1.8);
  CHECK(s2.variation > 1e-5);
  CHECK(s2.variation < 0.01);

  // two-term prediction lands within a few percent at these couplings
  CHECK(rel_close(s1.expansion_kappa_pow, s1.kappa_pow, 0.05));
  CHECK(rel_close(s2.expansion_kappa_pow, s2.kappa_pow, 0.02));

  // binding deepens with coupling
  CHECK(s2.kappa_star < s1.kappa_star);
  CHECK(s2.energy < s1.energy);
}

TEST_CASE("leading-order ratios: generic index and the shallow-well limit") {
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 160);
  const double normV = first_order_norm(V);

  // kappa^p / (g ||V||_1 / D) -> 1 from below, deviation of order g
  const FractionalIndex alpha(kSqrt2);
  const double D = scale_divisor(alpha, 1.0);
  double dev_prev = std::numeric_limits<double>::infinity();
  for (double g : {0.01, 0.005}) {
    const GroundStateSolution s = solve_kappa(g, V, rule, alpha, 1.0);
    const double ratio = s.kappa_pow / (g * normV / D);
    CHECK(ratio < 1.0);
    const double dev = std::abs(ratio - 1.0);
    CHECK(dev >= 1.0 * g);
    CHECK(dev <= 1.7 * g);
    CHECK(dev < dev_prev);
    dev_prev = dev;
  }

  // alpha = 2, K = 1: the shallow-well formula kappa* ~ g ||V||_1 / 2
  const FractionalIndex two(2.0);
  dev_prev = std::numeric_limits<double>::infinity();
  for (double g : {0.01, 0.005}) {
    const GroundStateSolution s = solve_kappa(g, V, rule, two, 1.0);
    const double ratio = s.kappa_star / (g * normV / 2.0);
    CHECK(ratio < 1.0);
    const double dev = std::abs(ratio - 1.0);
    CHECK(dev >= 0.5 * g);
    CHECK(dev <= 0.9 * g);
    CHECK(dev < dev_prev);
    dev_prev = dev;
  }
}

TEST_CASE("dual route: scalar fixed point vs full-kernel eigencondition") {
  const FractionalIndex alpha(kSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 160);
  const double g = 0.05;
  const double k_fp = solve_kappa(g, V, rule, alpha, 1.0).kappa_star;
  const double k_ev = solve_kappa_lambda(g, V, rule, alpha, 1.0);
  CHECK(rel_close(k_fp, k_ev, 1e-6));
}

TEST_CASE("coupling response: root and energy strictly increase with g") {
  const FractionalIndex alpha(kSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 160);
  double prev_k = 0.0, prev_e = 0.0;
  for (double g : {0.0125, 0.025, 0.05, 0.1}) {
    const GroundStateSolution s = solve_kappa(g, V, rule, alpha, 1.0);
    CHECK(s.kappa_star > prev_k);
    CHECK(s.energy > prev_e);
    prev_k = s.kappa_star;
    prev_e = s.energy;
  }
}

TEST_CASE("uniqueness certificate: one crossing, quadratic variation, guards") {
  const FractionalIndex alpha(kSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 160);

  const UniquenessReport full =
      uniqueness_certificate(0.05, 1e-6, 1.0, V, rule, alpha, 1.0, 25);
  const UniquenessReport half =
      uniqueness_certificate(0.025, 1e-6, 1.0, V, rule, alpha, 1.0, 25);
  CHECK(full.sign_changes == 1);
  CHECK(half.sign_changes == 1);
  CHECK(full.h_max > full.h_min);
  CHECK(full.h_min > 1.60);
  CHECK(full.h_max < 1.75);
  CHECK(full.h_max - full.h_min > 1e-3);
  CHECK(full.h_max - full.h_min < 0.05);
  // the windowed spread scales like g^2 between g and g/2
  const double ratio = full.variation / half.variation;
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);

  // zero coupling: H is kappa-free, no crossing on a positive window
  const UniquenessReport flat =
      uniqueness_certificate(0.0, 0.01, 0.1, V, rule, alpha, 1.0, 5);
  CHECK(flat.sign_changes == 0);
  CHECK(flat.variation == 0.0);

  CHECK_THROWS_AS(uniqueness_certificate(0.05, 0.0, 1.0, V, rule, alpha, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(uniqueness_certificate(0.05, 0.5, 0.5, V, rule, alpha, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(uniqueness_certificate(0.05, 1e-4, 1.0, V, rule, alpha, 1.0, 2),
                  std::domain_error);
}

TEST_CASE("solver guards: coupling domain and subcriticality") {
  const FractionalIndex alpha(kSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 64);
  CHECK_THROWS_AS(solve_kappa(0.0, V, rule, alpha, 1.0), std::domain_error);
  CHECK_THROWS_AS(solve_kappa(-0.1, V, rule, alpha, 1.0), std::domain_error);
  CHECK_THROWS_AS(
      solve_kappa(std::numeric_limits<double>::quiet_NaN(), V, rule, alpha, 1.0),
      std::domain_error);
  // far outside the weak-coupling regime the subcriticality check trips
  CHECK_THROWS_AS(solve_kappa(50.0, V, rule, alpha, 1.0),
                  WeakCouplingViolatedError);
}

}  // TEST_SUITE
