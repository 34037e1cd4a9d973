#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "fracbound/special_series.hpp"

using namespace fracbound;

namespace {
bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}
}  // namespace

TEST_SUITE("special_series") {

TEST_CASE("fractional index accepts (1,2] and rejects the rest") {
  CHECK(FractionalIndex(1.5).value() == 1.5);
  CHECK(FractionalIndex(2.0).value() == 2.0);
  CHECK(FractionalIndex(1.0 + 1e-12).value() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(FractionalIndex(1.0), std::domain_error);
  CHECK_THROWS_AS(FractionalIndex(0.9), std::domain_error);
  CHECK_THROWS_AS(FractionalIndex(2.1), std::domain_error);
  CHECK_THROWS_AS(FractionalIndex(-1.5), std::domain_error);
  CHECK_THROWS_AS(FractionalIndex(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK_THROWS_AS(FractionalIndex(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("log_gamma matches reference values to 1e-13 relative on [1e-3, 300]") {
  const struct {
    double x, want;
  } pins[] = {
      {0.001, 6.9071788853838537},   {0.1, 2.2527126517342060},
      {0.5, 0.57236494292470009},    {1.5, -0.12078223763524522},
      {2.5, 0.28468287047291916},    {3.7, 1.4280723266653879},
      {10.0, 12.801827480081470},    {42.5, 115.90007047041453},
      {137.0, 535.49694318016954},   {300.0, 1409.2020674704118},
  };
  for (const auto& p : pins) CHECK(rel_close(log_gamma(p.x), p.want, 1e-13));
  CHECK(std::abs(log_gamma(1.0)) <= 1e-14);
  CHECK(std::abs(log_gamma(2.0)) <= 1e-14);
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-3.5), std::domain_error);
}

TEST_CASE("log_gamma obeys the recurrence ln G(x+1) = ln G(x) + ln x") {
  for (double x : {0.003, 0.02, 0.7, 1.3, 9.5, 80.0, 250.0}) {
    const double lhs = log_gamma(x + 1.0);
    const double rhs = log_gamma(x) + std::log(x);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * (std::abs(rhs) + 1.0));
  }
}

TEST_CASE("digamma matches reference values") {
  const struct {
    double x, want;
  } pins[] = {
      {0.1, -10.423754940411077},  {1.0, -0.57721566490153286},
      {1.5, 0.036489973978576521}, {3.7, 1.1671535393615114},
      {42.5, 3.7376932365000936},
  };
  // accurate to ~1e-12 absolutely; relative error widens where psi crosses zero
  for (const auto& p : pins)
    CHECK(std::abs(digamma(p.x) - p.want) <= 1e-11 * (1.0 + std::abs(p.want)));
  // recurrence psi(x+1) = psi(x) + 1/x
  for (double x : {0.2, 1.1, 4.4, 33.0}) {
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <=
          1e-12 * (std::abs(digamma(x)) + 1.0));
  }
}

TEST_CASE("mellin partial sum reproduces exp(-u^alpha)") {
  const FractionalIndex a2(2.0), as(std::sqrt(2.0));
  CHECK(mellin_exp_partial_sum(0.0, a2, 0) == 1.0);
  CHECK(mellin_exp_partial_sum(0.0, as, 17) == 1.0);
  CHECK(std::abs(mellin_exp_partial_sum(1.0, a2, 30) - std::exp(-1.0)) <= 1e-12);
  CHECK(std::abs(mellin_exp_partial_sum(2.0, as, 60) -
                 std::exp(-std::pow(2.0, std::sqrt(2.0)))) <= 1e-12);
  CHECK_THROWS_AS(mellin_exp_partial_sum(-0.5, a2, 10), std::domain_error);
  CHECK_THROWS_AS(mellin_exp_partial_sum(1.0, a2, -1), std::domain_error);
}

TEST_CASE("mellin partial sums obey the alternating-tail envelope") {
  // Once the terms decrease, |S_N - f| is bounded by the first omitted term.
  const FractionalIndex a(std::sqrt(2.0));
  for (double u : {1.5, 3.0}) {
    const double f = std::exp(-std::pow(u, a.value()));
    const double ua = std::pow(u, a.value());
    for (int N = static_cast<int>(2.0 * ua) + 2; N <= 30; ++N) {
      const double omitted =
          std::exp(a.value() * (N + 1) * std::log(u) - log_gamma(N + 2.0));
      CHECK(std::abs(mellin_exp_partial_sum(u, a, N) - f) <= omitted + 1e-15);
    }
  }
}

TEST_CASE("resonance margin pins and monotonicity") {
  const FractionalIndex sqrt2(std::sqrt(2.0));
  const FractionalIndex low(1.2 + std::sqrt(3.0) * 1e-3);
  const FractionalIndex high(1.9 + std::sqrt(5.0) * 1e-4);
  CHECK(rel_close(sqrt2.resonance_margin(40), 1.915203e-2, 1e-5));
  CHECK(rel_close(low.resonance_margin(40), 2.065543e-1, 1e-5));
  CHECK(rel_close(high.resonance_margin(40), 3.512400e-3, 1e-5));
  // alpha = 2: every sin((2m+1)pi/2) and cos(m pi) sits exactly at +-1.
  const FractionalIndex a2(2.0);
  CHECK(a2.resonance_margin(0) == 1.0);
  CHECK(a2.resonance_margin(5) == 1.0);
  CHECK(a2.resonance_margin(40) == 1.0);
  // widening the pole window can only shrink the margin
  for (const auto& a : {sqrt2, low, high}) {
    double prev = a.resonance_margin(0);
    for (int m : {5, 10, 20, 40, 80}) {
      const double cur = a.resonance_margin(m);
      CHECK(cur <= prev + 1e-18);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(sqrt2.resonance_margin(-1), std::domain_error);
}

TEST_CASE("reduced pole set lists both families and flags odd-pair collisions") {
  const PoleSet ps = reduced_pole_set(FractionalIndex(std::sqrt(2.0)), 2);
  REQUIRE(ps.odd_poles.size() == 3);
  CHECK(ps.odd_poles[0] == 1.0);
  CHECK(ps.odd_poles[1] == 3.0);
  CHECK(ps.odd_poles[2] == 5.0);
  REQUIRE(ps.alpha_poles.size() == 2);
  CHECK(ps.alpha_poles[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ps.alpha_poles[1] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK_FALSE(ps.collision);

  // alpha = 2: multiples {2,4} land on even integers, never on an odd pole.
  const PoleSet p2 = reduced_pole_set(FractionalIndex(2.0), 2);
  REQUIRE(p2.alpha_poles.size() == 2);
  CHECK(p2.alpha_poles[0] == 2.0);
  CHECK(p2.alpha_poles[1] == 4.0);
  CHECK_FALSE(p2.collision);
  CHECK(p2.min_pair_distance == doctest::Approx(1.0).epsilon(1e-15));

  // alpha = 5/3: 3 * (5/3) = 5 collides with the odd pole 5.
  const PoleSet p53 = reduced_pole_set(FractionalIndex(5.0 / 3.0), 3);
  CHECK(p53.collision);
  CHECK(p53.min_pair_distance < kCollisionTol);

  // alpha = 4/3: 3 * (4/3) = 4 is even, harmless; nearest odd pair gap is 1/3.
  const PoleSet p43 = reduced_pole_set(FractionalIndex(4.0 / 3.0), 3);
  CHECK_FALSE(p43.collision);
  CHECK(p43.min_pair_distance == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("resonance check separates safe from resonant indices") {
  CHECK_FALSE(resonance_check(FractionalIndex(std::sqrt(2.0))));
  CHECK_FALSE(resonance_check(FractionalIndex(2.0)));
  CHECK_FALSE(resonance_check(FractionalIndex(4.0 / 3.0)));
  CHECK(resonance_check(FractionalIndex(1.5)));        // cos(3 pi/4 * 2)... margin ~ 1e-16
  CHECK(resonance_check(FractionalIndex(5.0 / 3.0)));  // margin and exact odd collision
  CHECK_FALSE(resonance_check(FractionalIndex(1.2 + std::sqrt(3.0) * 1e-3)));
  CHECK_FALSE(resonance_check(FractionalIndex(1.9 + std::sqrt(5.0) * 1e-4)));
}

}  // TEST_SUITE
