#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "fracbound/errors.hpp"
#include "fracbound/format.hpp"
#include "fracbound/greens.hpp"
#include "fracbound/potentials.hpp"
#include "fracbound/quadrature.hpp"

namespace fracbound {

// Nodes and weights for discretizing integral operators on [-L, L].
struct QuadratureRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;

  Eigen::Index n() const noexcept { return nodes.size(); }

  // Panel-wise Gauss-Legendre; node count is rounded up to a whole number of
  // panels. Nodes are strictly increasing and weights positive.
  static QuadratureRule composite_gauss_legendre(double half_width, int n,
                                                 int panel_order = 16) {
    if (!(half_width > 0.0)) throw std::domain_error("half_width must be positive");
    if (n < panel_order) throw std::domain_error("need at least one panel");
    if (panel_order < 2 || panel_order > 64)
      throw std::domain_error("panel_order out of range");
    const int panels = (n + panel_order - 1) / panel_order;
    const auto [xi, wi] = gauss_legendre(panel_order);
    QuadratureRule rule;
    rule.nodes.resize(panels * panel_order);
    rule.weights.resize(panels * panel_order);
    const double h = 2.0 * half_width / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = -half_width + p * h;
      for (int q = 0; q < panel_order; ++q) {
        rule.nodes[p * panel_order + q] = a + 0.5 * h * (1.0 + xi[q]);
        rule.weights[p * panel_order + q] = 0.5 * h * wi[q];
      }
    }
    return rule;
  }

  static QuadratureRule trapezoid(double half_width, int n) {
    if (!(half_width > 0.0)) throw std::domain_error("half_width must be positive");
    if (n < 2) throw std::domain_error("need at least two nodes");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double h = 2.0 * half_width / (n - 1);
    for (int i = 0; i < n; ++i) {
      rule.nodes[i] = -half_width + i * h;
      rule.weights[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
    return rule;
  }

  // Clip the window to where the potential still carries mass, so nodes are
  // not wasted far outside the well.
  static QuadratureRule for_potential(const Potential& V, double half_width,
                                      int n, int panel_order = 16) {
    const double support = V.support_halfwidth(1e-12);
    return composite_gauss_legendre(std::min(half_width, support), n, panel_order);
  }
};

// Symmetrized kernel sqrt(w)sqrt|V| G sqrt|V|sqrt(w) split into its rank-one
// zero-distance part and the finite remainder: full = sing + fin exactly.
struct BSKernel {
  Eigen::MatrixXd full;
  Eigen::MatrixXd sing;
  Eigen::MatrixXd fin;
  Eigen::VectorXd u;  // u_i = sqrt(w_i) sqrt|V(x_i)|
  QuadratureRule rule;
  GreensContext ctx;
  bool support_warning = false;
};

inline BSKernel assemble(const Potential& V, const QuadratureRule& rule,
                         const GreensContext& ctx,
                         const GreensEvalOptions& opts = {}) {
  const Eigen::Index n = rule.n();
  if (n < 1) throw std::domain_error("rule must not be empty");
  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i)
    u[i] = std::sqrt(rule.weights[i]) * V.sqrt_abs_at(rule.nodes[i]);

  BSKernel k{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n),
             std::move(u), rule, ctx, false};
  // outer product first, scalar second: u_i*u_j rounds identically to u_j*u_i,
  // so sing -- and with it full -- is bitwise symmetric
  k.sing.noalias() = k.u * k.u.transpose();
  k.sing *= ctx.singular_value();
  for (Eigen::Index i = 0; i < n; ++i) {
    k.fin(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = rule.nodes[j] - rule.nodes[i];
      const double val = greens_finite_eval(r, ctx, opts) * k.u[i] * k.u[j];
      k.fin(i, j) = val;
      k.fin(j, i) = val;
    }
  }
  k.full = k.sing + k.fin;
  const double edge = std::max(V.abs_at(rule.nodes[0]), V.abs_at(rule.nodes[n - 1]));
  k.support_warning = edge > 1e-10 * V.depth();
  return k;
}

// Pointwise envelope coefficient: |G(r) - G(0)| <= M |r|^(alpha-1) with
// M = 1 / (2 K Gamma(alpha) |cos(alpha pi / 2)|).
inline double m_coefficient(const FractionalIndex& alpha, double K_alpha) {
  const double a = alpha.value();
  return 1.0 / (2.0 * K_alpha * std::tgamma(a) * std::abs(std::cos(a * kPi / 2.0)));
}

// Coupling-independent borderline index where the envelope coefficient
// crosses 1 (diagnostic only; M is decreasing in alpha on (1, 2]).
inline double borderline_alpha(double K_alpha) {
  double lo = 1.0 + 1e-8, hi = 2.0;
  const auto f = [&](double a) {
    return m_coefficient(FractionalIndex(a), K_alpha) - 1.0;
  };
  if (f(hi) > 0.0) return 2.0;    // envelope exceeds 1 everywhere
  if (f(lo) < 0.0) return lo;     // envelope below 1 everywhere
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct FiniteBoundReport {
  double max_ratio = 0.0;
  Eigen::Index row = 0, col = 0;
  double max_diag = 0.0;
  double m_value = 0.0;
};

// Verify the off-diagonal envelope |fin_ij| <= M u_i u_j |x_i-x_j|^(alpha-1)
// and the exact-zero diagonal; throws on violation beyond tol.
inline FiniteBoundReport finite_bound_check(const BSKernel& k, double tol = 1e-8) {
  FiniteBoundReport rep;
  rep.m_value = m_coefficient(k.ctx.index, k.ctx.K);
  const double am1 = k.ctx.alpha() - 1.0;
  const Eigen::Index n = k.rule.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    rep.max_diag = std::max(rep.max_diag, std::abs(k.fin(i, i)));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double envelope =
          rep.m_value * k.u[i] * k.u[j] * std::pow(k.rule.nodes[j] - k.rule.nodes[i], am1);
      if (envelope == 0.0) continue;  // node sits outside the well
      const double ratio = std::abs(k.fin(i, j)) / envelope;
      if (ratio > rep.max_ratio) {
        rep.max_ratio = ratio;
        rep.row = i;
        rep.col = j;
      }
    }
  }
  if (rep.max_ratio > 1.0 + tol)
    throw BoundViolatedError(rep.max_ratio, static_cast<int>(rep.row),
                             static_cast<int>(rep.col));
  if (rep.max_diag > 1e-10)
    throw BoundViolatedError(rep.max_diag, 0, 0);
  return rep;
}

inline double hs_norm(const BSKernel& k) { return k.fin.norm(); }

// Closed-form majorant of the Hilbert-Schmidt norm obtained by applying the
// pointwise envelope entrywise with |x_i - x_j| <= |x_i| + |x_j|.
inline double hs_norm_bound(const BSKernel& k) {
  const double m = m_coefficient(k.ctx.index, k.ctx.K);
  const double e = 2.0 * (k.ctx.alpha() - 1.0);
  const Eigen::Index n = k.rule.n();
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double ui2 = k.u[i] * k.u[i], uj2 = k.u[j] * k.u[j];
      s += ui2 * uj2 * std::pow(std::abs(k.rule.nodes[i]) + std::abs(k.rule.nodes[j]), e);
    }
  return m * std::sqrt(s);
}

// trace(full) = G(0) * sum_i w_i |V(x_i)|, exactly, since fin has zero diagonal.
inline double trace_abs(const BSKernel& k) { return k.full.trace(); }

struct TopEigenpair {
  double lambda;
  Eigen::VectorXd phi;  // unit vector, sign fixed so its component sum is >= 0
};

inline TopEigenpair top_eigenpair(const BSKernel& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.full);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolve failed on kernel matrix");
  const Eigen::Index last = k.full.rows() - 1;
  TopEigenpair top{es.eigenvalues()(last), es.eigenvectors().col(last)};
  if (top.phi.sum() < 0.0) top.phi = -top.phi;
  return top;
}

// Row-major CSV dump of one kernel block with its defining parameters.
inline void write_kernel_csv(std::ostream& os, const BSKernel& k,
                             const Eigen::MatrixXd& block) {
  os << "# n=" << k.rule.n() << ",alpha=" << g17(k.ctx.alpha())
     << ",kappa=" << g17(k.ctx.kappa) << ",K=" << g17(k.ctx.K) << "\n";
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      if (j) os << ',';
      os << g17(block(i, j));
    }
    os << '\n';
  }
}

}  // namespace fracbound
