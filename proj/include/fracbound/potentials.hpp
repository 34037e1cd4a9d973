#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "fracbound/quadrature.hpp"
#include "fracbound/special_series.hpp"

namespace fracbound {

enum class PotentialKind { Gaussian, Lorentzian, Sech2 };

// Strictly negative analytic well V(x) < 0, V -> 0 at infinity. The lorentzian
// family carries a tail power s; the moment integral exists iff s > alpha - 1/2.
class Potential {
 public:
  static Potential gaussian(double V0, double a) {
    return Potential(PotentialKind::Gaussian, V0, a, 0.0);
  }
  static Potential lorentzian(double V0, double a, double s) {
    if (!(s > 0.0)) throw std::domain_error("lorentzian tail power must be positive");
    return Potential(PotentialKind::Lorentzian, V0, a, s);
  }
  static Potential sech2(double V0, double a) {
    return Potential(PotentialKind::Sech2, V0, a, 0.0);
  }

  double operator()(double x) const {
    const double t = x / a_;
    switch (kind_) {
      case PotentialKind::Gaussian:
        return -V0_ * std::exp(-t * t);
      case PotentialKind::Lorentzian:
        return -V0_ * std::pow(1.0 + t * t, -s_);
      case PotentialKind::Sech2:
      default: {
        const double c = std::cosh(t);
        return -V0_ / (c * c);
      }
    }
  }

  double abs_at(double x) const { return -(*this)(x); }
  double sqrt_abs_at(double x) const { return std::sqrt(abs_at(x)); }

  double depth() const noexcept { return V0_; }
  double scale() const noexcept { return a_; }
  double tail_power() const noexcept { return s_; }
  PotentialKind kind() const noexcept { return kind_; }

  std::string name() const {
    switch (kind_) {
      case PotentialKind::Gaussian: return "gaussian";
      case PotentialKind::Lorentzian: return "lorentzian";
      case PotentialKind::Sech2: default: return "sech2";
    }
  }

  // Moment integral exists iff the |x|^(2(alpha-1)) weight is beaten by the tail.
  bool admissible(const FractionalIndex& alpha) const {
    if (kind_ != PotentialKind::Lorentzian) return true;
    return s_ > alpha.value() - 0.5;
  }

  // Half-width X where |V(X)| = rel_cut * V0.
  double support_halfwidth(double rel_cut) const {
    if (!(rel_cut > 0.0) || !(rel_cut < 1.0))
      throw std::domain_error("rel_cut must lie in (0,1)");
    switch (kind_) {
      case PotentialKind::Gaussian:
        return a_ * std::sqrt(-std::log(rel_cut));
      case PotentialKind::Lorentzian:
        return a_ * std::sqrt(std::pow(rel_cut, -1.0 / s_) - 1.0);
      case PotentialKind::Sech2:
      default:
        return a_ * std::acosh(1.0 / std::sqrt(rel_cut));
    }
  }

 private:
  Potential(PotentialKind kind, double V0, double a, double s)
      : kind_(kind), V0_(V0), a_(a), s_(s) {
    if (!(V0 > 0.0)) throw std::domain_error("depth V0 must be positive");
    if (!(a > 0.0)) throw std::domain_error("scale a must be positive");
  }

  PotentialKind kind_;
  double V0_, a_, s_;
};

inline Potential make_gaussian(double V0, double a) { return Potential::gaussian(V0, a); }
inline Potential make_lorentzian(double V0, double a, double s) {
  return Potential::lorentzian(V0, a, s);
}
inline Potential make_sech2(double V0, double a) { return Potential::sech2(V0, a); }

// Pointwise sqrt|V|; the signed root V^(1/2) = -sqrt|V| (negative wells) rides along.
inline auto sqrt_abs(const Potential& V) {
  return [V](double x) { return V.sqrt_abs_at(x); };
}
inline auto signed_sqrt(const Potential& V) {
  return [V](double x) { return -V.sqrt_abs_at(x); };
}

struct MomentCertificate {
  double alpha;
  double value;
  double error_bound;  // quadrature estimate + analytic tail bound
};

namespace potential_detail {

// Finite integration window plus a rigorous bound on what lies beyond it.
struct Window {
  double halfwidth;
  double tail_bound;  // bound on the *weighted* tail integral, see moment_norm
};

inline Window weighted_window(const Potential& V, double weight_exponent) {
  // Choose X where |V| has dropped to ~1e-22 V0 and bound the tail by
  // integrand(X) times the local decay length (both decay super-algebraically).
  switch (V.kind()) {
    case PotentialKind::Gaussian: {
      const double X = V.scale() * 7.2;  // exp(-7.2^2) ~ 3e-23
      const double decay = V.scale() * V.scale() / (2.0 * X);
      const double f = std::pow(1.0 + X, weight_exponent) * V.abs_at(X);
      return {X, 2.0 * f * decay};
    }
    case PotentialKind::Sech2: {
      const double X = V.scale() * 27.0;  // sech^2 ~ 4exp(-54)
      const double decay = V.scale() / 2.0;
      const double f = std::pow(1.0 + X, weight_exponent) * V.abs_at(X);
      return {X, 2.0 * f * decay};
    }
    case PotentialKind::Lorentzian:
    default:
      return {0.0, 0.0};  // handled by exact 1/x transform, no truncation
  }
}

}  // namespace potential_detail

// Certified integral of (1+|x|)^(2(alpha-1)) |V(x)| over the line.
inline MomentCertificate moment_norm(const Potential& V, const FractionalIndex& alpha) {
  const double a = alpha.value();
  const double w_exp = 2.0 * (a - 1.0);
  if (!V.admissible(alpha))
    throw std::domain_error(
        "moment integral diverges: lorentzian tail power s=" +
        std::to_string(V.tail_power()) + " <= alpha - 1/2 = " +
        std::to_string(a - 0.5));

  const auto f = [&](double x) { return std::pow(1.0 + x, w_exp) * V.abs_at(x); };
  double value = 0.0, err = 0.0;

  if (V.kind() == PotentialKind::Lorentzian) {
    const double X = std::max(1.0, V.scale());
    AdaptiveResult head = integrate_adaptive(f, 0.0, X, 1e-11, 0.0, 400000);
    // Exact tail via x = X/t: integrand ~ t^(2s - 2alpha) at t -> 0, integrable
    // precisely under the admissibility predicate.
    const auto tail = [&](double t) {
      const double x = X / t;
      return f(x) * X / (t * t);
    };
    AdaptiveResult rest = integrate_adaptive(tail, 0.0, 1.0, 1e-11, 0.0, 400000);
    value = 2.0 * (head.value + rest.value);
    err = 2.0 * (head.error + rest.error);
  } else {
    const auto win = potential_detail::weighted_window(V, w_exp);
    AdaptiveResult body = integrate_adaptive(f, 0.0, win.halfwidth, 1e-11, 0.0, 400000);
    value = 2.0 * body.value;
    err = 2.0 * body.error + win.tail_bound;
  }

  if (!(err < 1e-8 * value))
    throw QuadratureError("moment_norm certificate not met", value, err);
  return {a, value, err};
}

// Certified ||sqrt|V|||^2 = integral of |V|.
inline MomentCertificate integral_abs(const Potential& V) {
  const auto f = [&](double x) { return V.abs_at(x); };
  double value = 0.0, err = 0.0;
  if (V.kind() == PotentialKind::Lorentzian) {
    if (!(V.tail_power() > 0.5))
      throw std::domain_error("integral of |V| diverges: lorentzian s <= 1/2");
    const double X = std::max(1.0, V.scale());
    AdaptiveResult head = integrate_adaptive(f, 0.0, X, 1e-12, 0.0, 400000);
    const auto tail = [&](double t) {
      const double x = X / t;
      return f(x) * X / (t * t);
    };
    // |V| ~ x^(-2s): integrable iff s > 1/2, which admissibility (s > alpha-1/2,
    // alpha > 1) already implies for any usable lorentzian.
    AdaptiveResult rest = integrate_adaptive(tail, 0.0, 1.0, 1e-12, 0.0, 400000);
    value = 2.0 * (head.value + rest.value);
    err = 2.0 * (head.error + rest.error);
  } else {
    const auto win = potential_detail::weighted_window(V, 0.0);
    AdaptiveResult body = integrate_adaptive(f, 0.0, win.halfwidth, 1e-12, 0.0, 400000);
    value = 2.0 * body.value;
    err = 2.0 * body.error + win.tail_bound;
  }
  if (!(err < 1e-8 * value))
    throw QuadratureError("integral_abs certificate not met", value, err);
  return {1.0, value, err};
}

}  // namespace fracbound
