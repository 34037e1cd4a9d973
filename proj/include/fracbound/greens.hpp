#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fracbound/errors.hpp"
#include "fracbound/quadrature.hpp"
#include "fracbound/special_series.hpp"

namespace fracbound {

// Parameter bundle (alpha, K, kappa) for the resolvent kernel of K*P^alpha + kappa^2,
// with the scaled distance z = (|r|^alpha kappa^2 / K)^(1/alpha) all series share.
class GreensContext {
 public:
  FractionalIndex index;
  double K;
  double kappa;

  GreensContext(FractionalIndex a, double K_, double kappa_)
      : index(a), K(K_), kappa(kappa_) {
    if (!(K_ > 0.0) || !std::isfinite(K_))
      throw std::domain_error("K must be positive");
    if (!(kappa_ > 0.0) || !std::isfinite(kappa_))
      throw std::domain_error("kappa must be positive (kappa = 0 is excluded)");
    margin_ = index.resonance_margin(40);
    series_safe_ = !resonance_check(index, 40, 1e-8);
  }
  GreensContext(double alpha, double K_, double kappa_)
      : GreensContext(FractionalIndex(alpha), K_, kappa_) {}

  double alpha() const noexcept { return index.value(); }
  bool is_alpha2() const noexcept { return index.value() == 2.0; }
  bool series_safe() const noexcept { return series_safe_; }
  double resonance_margin() const noexcept { return margin_; }
  void require_series_safe() const {
    if (!series_safe_) throw ResonantAlphaError(alpha(), margin_);
  }

  double scaled_distance(double r) const {
    return std::abs(r) * std::pow(kappa * kappa / K, 1.0 / alpha());
  }
  // 1 / (alpha K^(1/alpha) kappa^(2(1-1/alpha))), the overall series scale
  double prefactor() const {
    const double a = alpha();
    return std::pow(K, -1.0 / a) * std::pow(kappa, 2.0 / a - 2.0) / a;
  }
  // G(0; kappa) = kappa^(2(1/alpha-1)) / (alpha K^(1/alpha) sin(pi/alpha))
  double singular_value() const { return prefactor() / std::sin(kPi / alpha()); }
  // kappa-independent coefficient of |r|^(alpha-1); negative for alpha in (1,2)
  double constant_coefficient() const {
    const double a = alpha();
    return 1.0 / (2.0 * K * std::exp(log_gamma(a)) * std::cos(a * kPi / 2.0));
  }

 private:
  bool series_safe_ = false;
  double margin_ = 0.0;
};

struct SeriesOptions {
  int m_max = 40;
  double stop_rel = 1e-14;       // next-term cut relative to the partial sum
  double tail_rel = 1e-12;       // convergence demand at the term cap
  double condition_max = 1e12;   // alternating-cancellation guard
};

namespace greens_detail {

struct Kahan {
  double sum = 0.0, comp = 0.0, abs_sum = 0.0;
  void add(double t) {
    abs_sum += std::abs(t);
    const double y = t - comp, s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
};

struct FamilyStatus {
  bool converged = false;
  double last_mag = 0.0;
};

// Family over odd poles: sum_{m=m0..} (+/-)(extra_m) z^(2m) / (Gamma(2m+1) sin((2m+1)pi/a)).
// ExtraFactor(m) multiplies term m (1 for the plain series, derivative factors otherwise).
template <class ExtraFactor>
FamilyStatus sum_family_odd(Kahan& acc, double logz, double a, int m0,
                            const SeriesOptions& opts, ExtraFactor&& extra) {
  FamilyStatus st;
  for (int m = m0; m <= opts.m_max; ++m) {
    const double den = std::sin((2 * m + 1) * kPi / a);
    const double fac = extra(m);
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (den < 0) sign = -sign;
    if (fac < 0) sign = -sign;
    if (fac == 0.0) continue;
    const double mag = std::exp(2 * m * logz - log_gamma(2.0 * m + 1.0) -
                                std::log(std::abs(den)) + std::log(std::abs(fac)));
    acc.add(sign * mag);
    st.last_mag = mag;
    if (m > m0 && mag <= opts.stop_rel * std::abs(acc.sum)) {
      st.converged = true;
      break;
    }
  }
  return st;
}

// Family over index-multiple poles: sum_{m=m0..} (a/2)(-1)^(m+1)(extra_m)
// z^(am-1) / (Gamma(am) cos(m a pi/2)).
template <class ExtraFactor>
FamilyStatus sum_family_alpha(Kahan& acc, double logz, double a, int m0,
                              const SeriesOptions& opts, ExtraFactor&& extra) {
  FamilyStatus st;
  const double log_half_a = std::log(a / 2.0);
  for (int m = m0; m <= opts.m_max; ++m) {
    const double den = std::cos(m * a * kPi / 2.0);
    const double fac = extra(m);
    double sign = (m % 2 == 1) ? 1.0 : -1.0;
    if (den < 0) sign = -sign;
    if (fac < 0) sign = -sign;
    if (fac == 0.0) continue;
    const double mag =
        std::exp(log_half_a + (a * m - 1.0) * logz - log_gamma(a * m) -
                 std::log(std::abs(den)) + std::log(std::abs(fac)));
    acc.add(sign * mag);
    st.last_mag = mag;
    if (m > m0 && mag <= opts.stop_rel * std::abs(acc.sum)) {
      st.converged = true;
      break;
    }
  }
  return st;
}

inline void enforce_convergence(const FamilyStatus& st, double total,
                                const SeriesOptions& opts) {
  if (!st.converged && st.last_mag > opts.tail_rel * std::abs(total))
    throw TailNotConvergedError(st.last_mag / std::abs(total));
}

inline void enforce_condition(const Kahan& acc, const SeriesOptions& opts) {
  if (acc.sum == 0.0) return;
  const double cond = acc.abs_sum / std::abs(acc.sum);
  if (cond > opts.condition_max) throw IllConditionedError(cond);
}

inline double one(int) { return 1.0; }

}  // namespace greens_detail

// Convergent small-z residue series for G(r; kappa).
inline double greens_series_small(double r, const GreensContext& ctx,
                                  const SeriesOptions& opts = {}) {
  ctx.require_series_safe();
  const double z = ctx.scaled_distance(r);
  if (z == 0.0) return ctx.singular_value();
  const double a = ctx.alpha(), logz = std::log(z);
  greens_detail::Kahan acc;
  auto st_odd = greens_detail::sum_family_odd(acc, logz, a, 0, opts, greens_detail::one);
  auto st_alpha =
      greens_detail::sum_family_alpha(acc, logz, a, 1, opts, greens_detail::one);
  greens_detail::enforce_convergence(st_odd, acc.sum, opts);
  greens_detail::enforce_convergence(st_alpha, acc.sum, opts);
  greens_detail::enforce_condition(acc, opts);
  return ctx.prefactor() * acc.sum;
}

// Three-part split of the small-z series: the rank-one singular value, the
// kappa-independent |r|^(alpha-1) term, and the vanishing remainder.
struct GreensDecomposition {
  double singular = 0.0;
  double constant = 0.0;
  double regular = 0.0;
  double total() const noexcept { return singular + constant + regular; }
};

inline GreensDecomposition greens_decompose(double r, const GreensContext& ctx,
                                            const SeriesOptions& opts = {}) {
  ctx.require_series_safe();
  GreensDecomposition d;
  d.singular = ctx.singular_value();
  const double z = ctx.scaled_distance(r);
  if (z == 0.0) return d;
  const double a = ctx.alpha(), logz = std::log(z);
  d.constant = ctx.constant_coefficient() * std::pow(std::abs(r), a - 1.0);
  greens_detail::Kahan acc;
  auto st_odd = greens_detail::sum_family_odd(acc, logz, a, 1, opts, greens_detail::one);
  auto st_alpha =
      greens_detail::sum_family_alpha(acc, logz, a, 2, opts, greens_detail::one);
  const double total = acc.sum + (d.singular + d.constant) / ctx.prefactor();
  greens_detail::enforce_convergence(st_odd, total, opts);
  greens_detail::enforce_convergence(st_alpha, total, opts);
  greens_detail::enforce_condition(acc, opts);
  d.regular = ctx.prefactor() * acc.sum;
  return d;
}

// constant + regular evaluated directly (no singular subtraction): the finite
// part the kernel split needs, free of small-z cancellation by construction.
inline double greens_small_finite(double r, const GreensContext& ctx,
                                  const SeriesOptions& opts = {}) {
  const GreensDecomposition d = greens_decompose(r, ctx, opts);
  return d.constant + d.regular;
}

struct LargeSeriesEval {
  double value = 0.0;
  double relative_estimate = 0.0;  // first omitted term over the retained sum
  int terms_used = 0;
};

// Asymptotic large-z expansion, truncated at the smallest term. The estimate
// tracks the true optimal-truncation error within a small factor.
inline LargeSeriesEval greens_series_large_eval(double r, const GreensContext& ctx,
                                                const SeriesOptions& opts = {}) {
  ctx.require_series_safe();
  const double z = ctx.scaled_distance(r);
  if (!(z > 0.0))
    throw std::domain_error("large-z series undefined at r = 0");
  if (ctx.is_alpha2()) return {0.0, 0.0, 0};  // every sin(m pi) numerator vanishes
  const double a = ctx.alpha(), logz = std::log(z);
  const double coef = ctx.prefactor() * a / kPi;
  greens_detail::Kahan acc;
  double prev_mag = std::numeric_limits<double>::infinity();
  double omitted = 0.0;
  int used = 0;
  for (int m = 1; m <= opts.m_max + 1; ++m) {
    const double num = std::sin(m * a * kPi / 2.0);
    const double mag =
        std::exp(log_gamma(1.0 + m * a) + std::log(std::abs(num)) -
                 (m * a + 1.0) * logz);
    if (m > opts.m_max) {  // term cap reached: next term is the estimate
      omitted = mag;
      break;
    }
    if (mag >= prev_mag) {
      if (m == 2) throw AsymptoticRangeError(z);
      omitted = mag;
      break;
    }
    double sign = (m % 2 == 1) ? 1.0 : -1.0;
    if (num < 0) sign = -sign;
    acc.add(sign * mag);
    used = m;
    prev_mag = mag;
    if (mag <= opts.stop_rel * std::abs(acc.sum)) {  // converged to roundoff
      omitted = mag;
      break;
    }
  }
  LargeSeriesEval out;
  out.value = coef * acc.sum;
  out.terms_used = used;
  out.relative_estimate =
      (acc.sum == 0.0) ? 0.0 : omitted / std::abs(acc.sum);
  return out;
}

inline double greens_series_large(double r, const GreensContext& ctx,
                                  const SeriesOptions& opts = {}) {
  return greens_series_large_eval(r, ctx, opts).value;
}

// Convergent small-z series for dG/dkappa; the m=1 index-family pole is absent.
inline double dgreens_series(double r, const GreensContext& ctx,
                             const SeriesOptions& opts = {}) {
  ctx.require_series_safe();
  const double a = ctx.alpha();
  const double dpref = -2.0 * std::pow(ctx.K, -1.0 / a) *
                       std::pow(ctx.kappa, 2.0 / a - 3.0) / a;
  const double z = ctx.scaled_distance(r);
  if (z == 0.0) return dpref * (1.0 - 1.0 / a) / std::sin(kPi / a);
  const double logz = std::log(z);
  greens_detail::Kahan acc;
  auto odd_factor = [a](int m) { return 1.0 - (2.0 * m + 1.0) / a; };
  auto alpha_factor = [](int m) { return 1.0 - m; };
  auto st_odd = greens_detail::sum_family_odd(acc, logz, a, 0, opts, odd_factor);
  auto st_alpha = greens_detail::sum_family_alpha(acc, logz, a, 2, opts, alpha_factor);
  greens_detail::enforce_convergence(st_odd, acc.sum, opts);
  greens_detail::enforce_convergence(st_alpha, acc.sum, opts);
  greens_detail::enforce_condition(acc, opts);
  return dpref * acc.sum;
}

// Exact resolvent kernel at alpha = 2: e^(-z) / (2 sqrt(K) kappa).
inline double greens_alpha2(double r, double K, double kappa) {
  const double z = std::abs(r) * kappa / std::sqrt(K);
  return std::exp(-z) / (2.0 * std::sqrt(K) * kappa);
}

struct OracleOptions {
  long max_evals = 1000000;   // total integrand-evaluation budget
  int max_half_periods = 48;  // oscillatory tail panels before acceleration
};

// Direct quadrature of G = (1/pi) * int_0^inf cos(p r) / (K p^alpha + kappa^2) dp.
// Head panel to the first cosine zero, one half-period per panel after that,
// Euler-type acceleration of the alternating tail.
inline double greens_oracle(double r, const GreensContext& ctx, double tol = 1e-10,
                            const OracleOptions& opts = {}) {
  if (!(tol > 1e-13) || !(tol < 1e-4))
    throw std::domain_error("oracle tol must lie in (1e-13, 1e-4)");
  const double a = ctx.alpha(), K = ctx.K, kap2 = ctx.kappa * ctx.kappa;
  r = std::abs(r);
  if (r < 1e-250) r = 0.0;  // cos(pr) = 1 to machine precision over the whole mass

  if (r == 0.0) {
    // Substitute t = p (K/kappa^2)^(1/alpha); split at t = 1 and invert the tail:
    // int_0^inf dt/(1+t^a) = int_0^1 dt/(1+t^a) + int_0^1 u^(a-2)/(1+u^a) du.
    const double scale = std::pow(kap2 / K, 1.0 / a);
    const auto f1 = [a](double t) { return 1.0 / (1.0 + std::pow(t, a)); };
    const auto f2 = [a](double u) {
      return std::pow(u, a - 2.0) / (1.0 + std::pow(u, a));
    };
    AdaptiveResult i1 =
        integrate_adaptive(f1, 0.0, 1.0, 0.2 * tol, 0.0, opts.max_evals / 2);
    AdaptiveResult i2 =
        integrate_adaptive(f2, 0.0, 1.0, 0.2 * tol, 0.0, opts.max_evals / 2);
    const double front = scale / (kap2 * kPi);
    return front * (i1.value + i2.value);
  }

  const auto f = [&](double p) {
    return std::cos(p * r) / (K * std::pow(p, a) + kap2);
  };
  // The head [0, q1] is oscillation-free but can be much larger than pi*G
  // (head/tail cancellation at small kappa), so both it and the tail panels
  // are driven by absolute targets sized against the final tol*(1+|G|) check.
  const double q1 = kPi / (2.0 * r);
  AdaptiveResult head =
      integrate_adaptive(f, 0.0, q1, 0.0, 0.5 * tol, opts.max_evals / 2);
  long evals = head.evaluations;
  double err_abs = head.error;

  std::vector<double> panels;
  panels.reserve(static_cast<std::size_t>(opts.max_half_periods));
  double plain_sum = 0.0;
  bool plain_converged = false;
  const double period = kPi / r;
  const double panel_abs =
      std::max(1e-18, 0.005 * tol);  // 48 panels stay under 0.25*pi*tol total
  for (int j = 1; j <= opts.max_half_periods; ++j) {
    const double lo = q1 + (j - 1) * period, hi = q1 + j * period;
    AdaptiveResult panel;
    try {
      panel = integrate_adaptive(f, lo, hi, 1e-14, panel_abs, 4000);
    } catch (const QuadratureError& e) {
      panel = {e.partial, e.error_estimate, 4000};
    }
    evals += panel.evaluations;
    if (evals > opts.max_evals)
      throw QuadratureError("oracle evaluation budget exhausted",
                            (head.value + plain_sum) / kPi, err_abs / kPi);
    err_abs += panel.error;
    panels.push_back(panel.value);
    plain_sum += panel.value;
    if (j >= 6 &&
        std::abs(panel.value) <= 1e-17 * (std::abs(head.value) + std::abs(plain_sum))) {
      plain_converged = true;
      err_abs += std::abs(panel.value);
      break;
    }
  }

  double tail_value, tail_err;
  if (plain_converged) {
    tail_value = plain_sum;
    tail_err = 0.0;
  } else {
    AcceleratedSum acc = accelerate_alternating(panels);
    tail_value = acc.value;
    tail_err = acc.error;
  }
  const double value = (head.value + tail_value) / kPi;
  const double err = (err_abs + tail_err) / kPi;
  if (!(err <= tol * (1.0 + std::abs(value))))
    throw QuadratureError("oracle tolerance not met", value, err);
  return value;
}

// Second, independently derived quadrature: rotating the contour turns the
// oscillatory cosine transform into a positive Laplace-type integral,
//   G = (K sin(a pi/2) / pi) int_0^inf e^(-t r) t^a / den(t) dt,
//   den = K^2 t^(2a) + 2 kappa^2 K cos(a pi/2) t^a + kappa^4,
// valid for 1 < alpha < 2 (the contour degenerates onto a pole at alpha = 2).
inline double greens_oracle_rotated(double r, const GreensContext& ctx,
                                    double tol = 1e-11) {
  const double a = ctx.alpha();
  if (!(a < 2.0))
    throw std::domain_error("rotated-contour quadrature requires alpha < 2");
  if (!(tol > 1e-13) || !(tol < 1e-4))
    throw std::domain_error("tol must lie in (1e-13, 1e-4)");
  const double K = ctx.K, kap2 = ctx.kappa * ctx.kappa;
  const double c = std::cos(a * kPi / 2.0), s = std::sin(a * kPi / 2.0);
  r = std::abs(r);
  const auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double tr = t * r;
    if (tr > 745.0) return 0.0;
    const double ta = std::pow(t, a);
    if (ta > 1e100) {  // factor den = K^2 t^(2a) (1 + small) to dodge overflow
      const double inv = 1.0 / ta;
      const double corr = 1.0 + 2.0 * kap2 * c * inv / K +
                          kap2 * kap2 * inv * inv / (K * K);
      return std::exp(-tr) / (K * K * ta * corr);
    }
    const double den = K * K * ta * ta + 2.0 * kap2 * K * c * ta + kap2 * kap2;
    return std::exp(-tr) * ta / den;
  };
  const double t0 = std::pow(kap2 / K, 1.0 / a);  // denominator dip location
  AdaptiveResult body = integrate_adaptive(f, 0.0, t0, 0.2 * tol, 0.0, 400000);
  const auto tail = [&](double u) {  // t = t0 / u maps [t0, inf) to (0, 1]
    if (u <= 0.0) return 0.0;
    const double t = t0 / u;
    return f(t) * t0 / (u * u);
  };
  AdaptiveResult rest = integrate_adaptive(tail, 0.0, 1.0, 0.2 * tol, 0.0, 400000);
  return (K * s / kPi) * (body.value + rest.value);
}

enum class GreensBranch { ClosedForm, SmallSeries, LargeSeries, Oracle };

inline const char* branch_name(GreensBranch b) {
  switch (b) {
    case GreensBranch::ClosedForm: return "closed";
    case GreensBranch::SmallSeries: return "small";
    case GreensBranch::LargeSeries: return "large";
    case GreensBranch::Oracle: return "oracle";
  }
  return "?";
}

struct GreensEvalOptions {
  double z_small = 2.0;            // series crossovers calibrated vs the oracle
  double z_large = 8.0;
  double series_accept_rel = 1e-9;  // large-series self-estimate gate
  double oracle_tol = 1e-10;
  SeriesOptions series;
};

struct GreensValue {
  double value = 0.0;
  GreensBranch branch = GreensBranch::Oracle;
};

// Crossover dispatcher: closed form at alpha=2, series inside their validated
// ranges, quadrature oracle in the gap, for resonant alpha, and as fallback on
// any series-validity error.
inline GreensValue greens_eval_traced(double r, const GreensContext& ctx,
                                      const GreensEvalOptions& opts = {}) {
  if (ctx.is_alpha2())
    return {greens_alpha2(r, ctx.K, ctx.kappa), GreensBranch::ClosedForm};
  if (ctx.series_safe()) {
    const double z = ctx.scaled_distance(r);
    if (z <= opts.z_small) {
      try {
        return {greens_series_small(r, ctx, opts.series), GreensBranch::SmallSeries};
      } catch (const std::runtime_error&) {
        // fall through to the oracle
      }
    } else if (z >= opts.z_large) {
      try {
        const LargeSeriesEval ev = greens_series_large_eval(r, ctx, opts.series);
        if (ev.relative_estimate <= opts.series_accept_rel)
          return {ev.value, GreensBranch::LargeSeries};
      } catch (const std::runtime_error&) {
        // fall through to the oracle
      }
    }
  }
  return {greens_oracle(r, ctx, opts.oracle_tol), GreensBranch::Oracle};
}

inline double greens_eval(double r, const GreensContext& ctx,
                          const GreensEvalOptions& opts = {}) {
  return greens_eval_traced(r, ctx, opts).value;
}

// Finite part G(r) - G(0) for the kernel split, with cancellation control:
// exact expm1 at alpha=2, the direct constant+regular series at small z (no
// subtraction), and oracle/large-series minus the singular value where the
// difference is no longer delicate.
inline double greens_finite_eval(double r, const GreensContext& ctx,
                                 const GreensEvalOptions& opts = {}) {
  if (ctx.is_alpha2()) {
    const double z = ctx.scaled_distance(r);
    return std::expm1(-z) / (2.0 * std::sqrt(ctx.K) * ctx.kappa);
  }
  if (!ctx.series_safe())
    return greens_oracle(r, ctx, opts.oracle_tol) - ctx.singular_value();
  const double z = ctx.scaled_distance(r);
  if (z <= 2.0 * opts.z_small) return greens_small_finite(r, ctx, opts.series);
  if (z >= opts.z_large) {
    try {
      const LargeSeriesEval ev = greens_series_large_eval(r, ctx, opts.series);
      if (ev.relative_estimate <= opts.series_accept_rel)
        return ev.value - ctx.singular_value();
    } catch (const std::runtime_error&) {
    }
  }
  return greens_oracle(r, ctx, opts.oracle_tol) - ctx.singular_value();
}

}  // namespace fracbound
