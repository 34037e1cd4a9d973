#pragma once

#include <stdexcept>
#include <string>

namespace fracbound {

// Series evaluators refuse near-vanishing denominators; callers fall back to quadrature.
struct ResonantAlphaError : std::runtime_error {
  double alpha;
  double margin;
  ResonantAlphaError(double a, double m)
      : std::runtime_error("resonant index alpha=" + std::to_string(a) +
                           " (denominator margin " + std::to_string(m) + ")"),
        alpha(a), margin(m) {}
};

// Convergent series failed to meet its tail target within the term cap.
struct TailNotConvergedError : std::runtime_error {
  double last_term_ratio;
  explicit TailNotConvergedError(double ratio)
      : std::runtime_error("series tail not converged: last term ratio " +
                           std::to_string(ratio)),
        last_term_ratio(ratio) {}
};

// Asymptotic series: first term already grows, the expansion point is out of range.
struct AsymptoticRangeError : std::runtime_error {
  double z;
  explicit AsymptoticRangeError(double z_)
      : std::runtime_error("asymptotic series invalid at z=" + std::to_string(z_) +
                           " (first term not decreasing)"),
        z(z_) {}
};

// Alternating-sum cancellation exceeded the condition-number guard.
struct IllConditionedError : std::runtime_error {
  double condition;
  explicit IllConditionedError(double cond)
      : std::runtime_error("cancellation guard tripped: condition " +
                           std::to_string(cond)),
        condition(cond) {}
};

// Adaptive quadrature exhausted its budget; carries the partial-result bracket.
struct QuadratureError : std::runtime_error {
  double partial;
  double error_estimate;
  QuadratureError(const std::string& what, double value, double err)
      : std::runtime_error(what + " (partial " + std::to_string(value) +
                           " +/- " + std::to_string(err) + ")"),
        partial(value), error_estimate(err) {}
};

// Root-finder could not bracket a sign change.
struct NoBracketError : std::runtime_error {
  double lo, hi;
  NoBracketError(double lo_, double hi_)
      : std::runtime_error("residual does not change sign on [" +
                           std::to_string(lo_) + ", " + std::to_string(hi_) + "]"),
        lo(lo_), hi(hi_) {}
};

// Perturbative regime left: the finite-part kernel is no longer a contraction.
struct WeakCouplingViolatedError : std::runtime_error {
  double g_norm;
  explicit WeakCouplingViolatedError(double n)
      : std::runtime_error("weak-coupling contraction violated: ||g*fin|| = " +
                           std::to_string(n) + " >= 1"),
        g_norm(n) {}
};

// Pointwise kernel bound exceeded (a theorem; indicates an assembly defect).
struct BoundViolatedError : std::runtime_error {
  double ratio;
  long row, col;
  BoundViolatedError(double r, long i, long j)
      : std::runtime_error("finite-kernel bound violated: ratio " +
                           std::to_string(r) + " at entry (" + std::to_string(i) +
                           "," + std::to_string(j) + ")"),
        ratio(r), row(i), col(j) {}
};

// More than one sign change where the theory guarantees exactly one.
struct MultipleRootsError : std::runtime_error {
  int sign_changes;
  explicit MultipleRootsError(int n)
      : std::runtime_error("residual has " + std::to_string(n) +
                           " sign changes (expected exactly one)"),
        sign_changes(n) {}
};

}  // namespace fracbound
