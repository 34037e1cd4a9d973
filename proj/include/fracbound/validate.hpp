#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracbound/birman_schwinger.hpp"
#include "fracbound/format.hpp"
#include "fracbound/greens.hpp"
#include "fracbound/ground_state.hpp"
#include "fracbound/potentials.hpp"
#include "fracbound/special_series.hpp"
#include "fracbound/weyl.hpp"

namespace fracbound {

struct CriterionResult {
  int id = 0;
  std::string tag;       // coarse group for --only filtering
  std::string name;
  bool passed = false;
  std::string tolerance;
  std::string measured;
  std::string detail;
  double seconds = 0.0;
};

namespace validate_detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return std::string(buf);
}

inline const double kAlphaSqrt2 = std::sqrt(2.0);
inline const double kAlphaLow = 1.2 + std::sqrt(3.0) * 1e-3;
inline const double kAlphaHigh = 1.9 + std::sqrt(5.0) * 1e-4;

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::abs(b);
}

// geometric grid of n points on [lo, hi]
inline std::vector<double> geom_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(ratio, i);
  g.back() = hi;
  return g;
}

// 1. alpha = 2: dispatcher equals the closed form; the quadrature oracle
// agrees wherever the kernel is large enough for a relative target.
inline CriterionResult criterion_closed_form() {
  CriterionResult res{1, "greens", "alpha=2 closed form", false,
                      "1e-9 rel (oracle part on G >= 1e-3)", "", "", 0.0};
  double worst_eval = 0.0, worst_oracle = 0.0;
  for (double kappa : {0.1, 1.0, 10.0}) {
    const GreensContext ctx(2.0, 1.0, kappa);
    for (int i = 0; i <= 20; ++i) {
      const double r = 0.5 * i;
      const double exact = std::exp(-r * kappa) / (2.0 * kappa);
      worst_eval = std::max(worst_eval, rel_diff(greens_eval(r, ctx), exact));
      if (exact >= 1e-3)
        worst_oracle =
            std::max(worst_oracle, rel_diff(greens_oracle(r, ctx, 1e-12), exact));
    }
  }
  res.measured = "dispatcher " + num(worst_eval) + ", oracle " + num(worst_oracle);
  res.passed = worst_eval <= 1e-9 && worst_oracle <= 1e-9;
  res.detail = "r in [0,10], kappa in {0.1,1,10}, K=1";
  return res;
}

// 2. small-z and large-z series against the quadrature oracle.
inline CriterionResult criterion_series_equivalence() {
  CriterionResult res{2, "greens", "series vs quadrature equivalence", false,
                      "1e-8 rel (z<=1), 1e-6 rel (z>=10)", "", "", 0.0};
  std::ostringstream detail;
  double worst_small = 0.0, worst_large = 0.0;
  for (double alpha : {kAlphaSqrt2, kAlphaLow, kAlphaHigh}) {
    const GreensContext ctx(alpha, 1.0, 1.0);  // K = kappa = 1, so r = z
    double ws = 0.0;
    for (double z : geom_grid(0.05, 1.0, 20))
      ws = std::max(ws, rel_diff(greens_series_small(z, ctx),
                                 greens_oracle(z, ctx, 1e-12)));
    double wl = 0.0, first_pass_z = -1.0;
    for (double z : geom_grid(10.0, 30.0, 20)) {
      const double d = rel_diff(greens_series_large(z, ctx),
                                greens_oracle(z, ctx, 1e-12));
      wl = std::max(wl, d);
      if (first_pass_z < 0.0 && d <= 1e-6) first_pass_z = z;
    }
    // where (if anywhere) the asymptotic floor does drop through 1e-6
    double z_ok = -1.0;
    for (double z = 10.0; z <= 60.0; z += 2.5) {
      if (rel_diff(greens_series_large(z, ctx), greens_oracle(z, ctx, 1e-12)) <=
          1e-6) {
        z_ok = z;
        break;
      }
    }
    detail << "alpha=" << num(alpha) << ": small " << num(ws) << ", large "
           << num(wl) << " (<=1e-6 first at z=" << (z_ok > 0 ? num(z_ok) : ">60")
           << "); ";
    worst_small = std::max(worst_small, ws);
    worst_large = std::max(worst_large, wl);
  }
  res.measured = "small " + num(worst_small) + ", large " + num(worst_large);
  res.detail = detail.str() +
               "smallest-term truncation floors the large-z series near "
               "exp(-z sin(pi/alpha)) >> 1e-6 at z=10";
  res.passed = worst_small <= 1e-8 && worst_large <= 1e-6;
  return res;
}

// 3. three-part split reproduces the series; closed singular part; regular
// part decays monotonically as kappa drops.
inline CriterionResult criterion_decomposition() {
  CriterionResult res{3, "greens", "small-z decomposition identity", false,
                      "1e-10 rel sum, 1e-14 rel singular, monotone regular", "",
                      "", 0.0};
  double worst_sum = 0.0, worst_sing = 0.0;
  for (double alpha : {kAlphaSqrt2, kAlphaLow, kAlphaHigh}) {
    const GreensContext ctx(alpha, 1.0, 1.0);
    for (double z : {0.1, 0.5, 1.0, 1.9}) {
      const GreensDecomposition d = greens_decompose(z, ctx);
      worst_sum =
          std::max(worst_sum, rel_diff(d.total(), greens_series_small(z, ctx)));
      const double sing_ref = std::pow(ctx.kappa, 2.0 / alpha - 2.0) /
                              (alpha * std::pow(ctx.K, 1.0 / alpha) *
                               std::sin(kPi / alpha));
      worst_sing = std::max(worst_sing, rel_diff(d.singular, sing_ref));
    }
  }
  bool monotone = true;
  double prev = -1.0;
  for (double kappa : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const GreensContext ctx(kAlphaSqrt2, 1.0, kappa);
    const double reg = std::abs(greens_decompose(0.7, ctx).regular);
    if (prev >= 0.0 && reg >= prev) monotone = false;
    prev = reg;
  }
  res.measured = "sum " + num(worst_sum) + ", singular " + num(worst_sing) +
                 ", regular tail " + (monotone ? "monotone" : "NOT monotone");
  res.passed = worst_sum <= 1e-10 && worst_sing <= 1e-14 && monotone;
  res.detail = "regular part at r=0.7 decays over kappa in {1e-1..1e-4}";
  return res;
}

// 4. kappa-derivative series against a centered difference of the oracle.
inline CriterionResult criterion_derivative() {
  CriterionResult res{4, "greens", "kappa-derivative series", false,
                      "1e-5 rel (z in [0.1,2]), 1e-12 rel at r=0", "", "", 0.0};
  const GreensContext ctx(kAlphaSqrt2, 1.0, 1.0);
  const double h = 1e-4;  // kappa step (kappa = 1)
  double worst = 0.0;
  for (double z : geom_grid(0.1, 2.0, 10)) {
    const GreensContext up(kAlphaSqrt2, 1.0, 1.0 + h);
    const GreensContext dn(kAlphaSqrt2, 1.0, 1.0 - h);
    const double fd =
        (greens_oracle(z, up, 1e-12) - greens_oracle(z, dn, 1e-12)) / (2.0 * h);
    worst = std::max(worst, rel_diff(dgreens_series(z, ctx), fd));
  }
  const double a = kAlphaSqrt2;
  const double r0_ref = -2.0 * (1.0 - 1.0 / a) /
                        (a * std::pow(1.0, 1.0 / a) * std::pow(1.0, 3.0 - 2.0 / a) *
                         std::sin(kPi / a));
  const double r0 = rel_diff(dgreens_series(0.0, ctx), r0_ref);
  res.measured = "grid " + num(worst) + ", r=0 " + num(r0);
  res.passed = worst <= 1e-5 && r0 <= 1e-12;
  res.detail = "centered difference step 1e-4*kappa at kappa=1";
  return res;
}

// 5. partial sums of the exponential's Mellin-style series.
inline CriterionResult criterion_partial_sum_identity() {
  CriterionResult res{5, "series", "exponential partial-sum identity", false,
                      "1e-12 abs", "", "", 0.0};
  double worst = 0.0;
  for (double alpha : {kAlphaSqrt2, 2.0}) {
    const FractionalIndex idx(alpha);
    for (int i = 0; i <= 30; ++i) {
      const double u = 0.1 * i;
      worst = std::max(worst, std::abs(mellin_exp_partial_sum(u, idx, 60) -
                                       std::exp(-std::pow(u, alpha))));
    }
  }
  res.measured = num(worst);
  res.passed = worst <= 1e-12;
  res.detail = "u in [0,3] step 0.1, alpha in {sqrt2, 2}, 60 terms";
  return res;
}

// 6. plane-wave eigenrelation and the discrete symmetry of the operator.
inline CriterionResult criterion_symbol_symmetry() {
  CriterionResult res{6, "weyl", "plane-wave symbol and symmetry", false,
                      "1e-10 rel", "", "", 0.0};
  const SpectralGrid grid(10.0, 256);
  const FractionalIndex alpha(kAlphaSqrt2);
  const double K = 1.3;
  const Eigen::ArrayXd x = grid.nodes();
  const Eigen::ArrayXd p = grid.momenta();

  double worst_pw = 0.0;
  for (int k : {1, 2, 5, 17, 100, 127, 128}) {
    GridFunction f(grid.n);
    for (int i = 0; i < grid.n; ++i)
      f[i] = std::exp(std::complex<double>(0.0, p[k] * x[i]));
    const GridFunction g = apply_weyl(f, grid, alpha, K);
    const double lam = K * std::pow(std::abs(p[k]), alpha.value());
    worst_pw = std::max(worst_pw, (g - lam * f).norm() / (lam * f.norm()));
  }

  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst_sym = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    GridFunction f(grid.n), g(grid.n);
    for (int i = 0; i < grid.n; ++i) {
      f[i] = unif(rng);
      g[i] = unif(rng);
    }
    const std::complex<double> lhs = apply_weyl(f, grid, alpha, K).dot(g);
    const std::complex<double> rhs = f.dot(apply_weyl(g, grid, alpha, K));
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    worst_sym = std::max(worst_sym, std::abs(lhs - rhs) / scale);
  }
  res.measured = "plane-wave " + num(worst_pw) + ", symmetry " + num(worst_sym);
  res.passed = worst_pw <= 1e-10 && worst_sym <= 1e-10;
  res.detail = "L=10, n=256, K=1.3, alpha=sqrt2; 50 random real pairs";
  return res;
}

// 7. pointwise envelope and Hilbert-Schmidt bound on the finite part.
inline CriterionResult criterion_kernel_bounds() {
  CriterionResult res{7, "kernel", "finite-part kernel bounds", false,
                      "ratio <= 1+1e-8, hs <= closed bound", "", "", 0.0};
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 400);
  double worst_ratio = 0.0, worst_margin = 1e300;
  for (double alpha : {kAlphaSqrt2, kAlphaHigh}) {
    for (double kappa : {0.05, 0.2, 1.0}) {
      const GreensContext ctx(alpha, 1.0, kappa);
      const BSKernel k = assemble(V, rule, ctx);
      const FiniteBoundReport rep = finite_bound_check(k, 1e-8);
      worst_ratio = std::max(worst_ratio, rep.max_ratio);
      const double hs = hs_norm(k), hsb = hs_norm_bound(k);
      worst_margin = std::min(worst_margin, hsb - hs);
      if (hs > hsb) {
        res.measured = "hs " + num(hs) + " exceeds bound " + num(hsb);
        res.detail = "alpha=" + num(alpha) + ", kappa=" + num(kappa);
        return res;
      }
    }
  }
  res.measured =
      "max ratio " + num(worst_ratio) + ", min hs slack " + num(worst_margin);
  res.passed = worst_ratio <= 1.0 + 1e-8;
  res.detail = "Gaussian(1,1), n=400, alpha in {sqrt2, 1.9+...}, kappa in {0.05,0.2,1}";
  return res;
}

// 8. discrepancy between the solved kappa power and the two-term expansion
// scales like g^3 (log-log slope across a g-halving ladder).
inline CriterionResult criterion_weak_coupling_order() {
  CriterionResult res{8, "ground", "weak-coupling expansion order", false,
                      "slope >= 2.7 (fallback >= 1.9 vs first order)", "", "",
                      0.0};
  const FractionalIndex alpha(kAlphaSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 320);
  const std::vector<double> gs{0.04, 0.02, 0.01, 0.005};
  std::vector<double> diff2, diff1;
  bool sign_agree = true;
  for (double g : gs) {
    const GroundStateSolution sol = solve_kappa(g, V, rule, alpha, 1.0);
    const WeakCouplingTerms t = weak_coupling_terms(g, V, alpha, 1.0);
    diff2.push_back(std::abs(sol.kappa_pow - (t.first + t.second)));
    diff1.push_back(std::abs(sol.kappa_pow - t.first));
    if ((sol.kappa_pow - t.first) * t.second < 0.0) sign_agree = false;
  }
  const auto slope_of = [&](const std::vector<double>& d) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(gs.size());
    for (int i = 0; i < n; ++i) {
      const double x = std::log(gs[i]), y = std::log(std::max(d[i], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  if (sign_agree) {
    const double slope = slope_of(diff2);
    res.measured = "second-order slope " + num(slope);
    res.passed = slope >= 2.7;
    res.detail = "g in {0.04,0.02,0.01,0.005}, alpha=sqrt2, Gaussian(1,1)";
  } else {
    const double slope = slope_of(diff1);
    res.measured = "first-order slope " + num(slope) + " (sign fallback)";
    res.passed = slope >= 1.9;
    res.detail =
        "second-order term sign disagrees with the solve; flagged, fallback "
        "slope against the first-order value";
  }
  return res;
}

// 9. fixed-point route against the direct eigenvalue route.
inline CriterionResult criterion_dual_route() {
  CriterionResult res{9, "ground", "dual-route bound-state consistency", false,
                      "1e-6 rel", "", "", 0.0};
  const FractionalIndex alpha(kAlphaSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 320);
  const double g = 0.05;
  const double kappa_fp = solve_kappa(g, V, rule, alpha, 1.0).kappa_star;
  const double kappa_ev = solve_kappa_lambda(g, V, rule, alpha, 1.0);
  const double d = rel_diff(kappa_fp, kappa_ev);
  res.measured = num(d) + " (kappa* = " + num(kappa_fp) + ")";
  res.passed = d <= 1e-6;
  res.detail = "g=0.05, alpha=sqrt2, Gaussian(1,1), n=320";
  return res;
}

// 10. bound-state energy against the spectral operator's lowest eigenvalue,
// improving monotonically as the box and resolution double.
inline CriterionResult criterion_spectral_oracle() {
  CriterionResult res{10, "spectral", "spectral oracle consistency", false,
                      "5% at L=400 n=2^14, monotone over doublings", "", "",
                      0.0};
  const FractionalIndex alpha(kAlphaSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 320);
  const double g = 0.1;
  const double E = solve_kappa(g, V, rule, alpha, 1.0).energy;
  std::vector<double> gaps;
  for (const auto& [L, N] : {std::pair<double, int>{100.0, 4096},
                            {200.0, 8192},
                            {400.0, 16384}}) {
    const SpectralGrid grid(L, N);
    const double e_spec = -ground_energy(V, g, grid, alpha, 1.0);
    gaps.push_back(std::abs(E - e_spec) / E);
  }
  const bool monotone = gaps[0] > gaps[1] && gaps[1] > gaps[2];
  res.measured = "rel gaps " + num(gaps[0]) + " -> " + num(gaps[1]) + " -> " +
                 num(gaps[2]);
  res.passed = gaps[2] <= 0.05 && monotone;
  res.detail =
      "g=0.1, alpha=sqrt2; heavy polynomial tails make the box the leading "
      "error source";
  return res;
}

// 11. exactly one residual crossing on a wide kappa window, and the H-spread
// scales like g^2 between g and g/2.
inline CriterionResult criterion_uniqueness() {
  CriterionResult res{11, "ground", "uniqueness of the crossing", false,
                      "1 sign change; variation ratio in [3.2,4.8]", "", "",
                      0.0};
  const FractionalIndex alpha(kAlphaSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const QuadratureRule rule = QuadratureRule::for_potential(V, 12.0, 320);
  const UniquenessReport full =
      uniqueness_certificate(0.05, 1e-6, 1.0, V, rule, alpha, 1.0, 25);
  const UniquenessReport half =
      uniqueness_certificate(0.025, 1e-6, 1.0, V, rule, alpha, 1.0, 25);
  const double ratio = full.variation / half.variation;
  res.measured = "sign changes " + std::to_string(full.sign_changes) +
                 ", variation ratio " + num(ratio);
  res.passed = full.sign_changes == 1 && ratio >= 3.2 && ratio <= 4.8;
  res.detail = "kappa in [1e-6,1], 25 geometric samples, g=0.05 vs 0.025";
  return res;
}

}  // namespace validate_detail

// Wall-clock caps are part of the published criteria.
inline double criterion_time_cap(int id) {
  switch (id) {
    case 1: return 5.0;
    case 2: return 60.0;
    case 7: return 120.0;
    default: return 0.0;  // uncapped
  }
}

inline std::vector<std::string> criterion_tags() {
  return {"greens", "series", "weyl", "kernel", "ground", "spectral"};
}

// Run criteria whose id is in `only` (empty = all), timing each and folding
// runtime caps and thrown errors into the verdict.
inline std::vector<CriterionResult> run_validation(const std::vector<int>& only = {}) {
  using Fn = CriterionResult (*)();
  const std::vector<Fn> fns{
      validate_detail::criterion_closed_form,
      validate_detail::criterion_series_equivalence,
      validate_detail::criterion_decomposition,
      validate_detail::criterion_derivative,
      validate_detail::criterion_partial_sum_identity,
      validate_detail::criterion_symbol_symmetry,
      validate_detail::criterion_kernel_bounds,
      validate_detail::criterion_weak_coupling_order,
      validate_detail::criterion_dual_route,
      validate_detail::criterion_spectral_oracle,
      validate_detail::criterion_uniqueness,
  };
  std::vector<CriterionResult> out;
  for (int id = 1; id <= static_cast<int>(fns.size()); ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
      continue;
    static const char* names[]{
        "alpha=2 closed form",         "series vs quadrature equivalence",
        "small-z decomposition identity", "kappa-derivative series",
        "exponential partial-sum identity", "plane-wave symbol and symmetry",
        "finite-part kernel bounds",   "weak-coupling expansion order",
        "dual-route bound-state consistency", "spectral oracle consistency",
        "uniqueness of the crossing"};
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fns[id - 1]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = names[id - 1];
      r.passed = false;
      r.measured = "exception";
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    const double cap = criterion_time_cap(id);
    if (cap > 0.0 && r.seconds > cap) {
      r.passed = false;
      r.detail += " [over time cap " + validate_detail::num(cap) + " s]";
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Map an --only selector (tag name or criterion number list) to ids.
inline std::vector<int> criteria_for_selector(const std::string& sel) {
  static const std::vector<std::pair<int, std::string>> tags{
      {1, "greens"},  {2, "greens"}, {3, "greens"},   {4, "greens"},
      {5, "series"},  {6, "weyl"},   {7, "kernel"},   {8, "ground"},
      {9, "ground"},  {10, "spectral"}, {11, "ground"},
  };
  std::vector<int> ids;
  std::stringstream ss(sel);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    bool numeric = true;
    for (char c : item)
      if (!std::isdigit(static_cast<unsigned char>(c))) numeric = false;
    if (numeric) {
      const int id = std::stoi(item);
      if (id < 1 || id > 11) throw std::domain_error("no criterion " + item);
      ids.push_back(id);
    } else {
      bool found = false;
      for (const auto& [id, tag] : tags)
        if (tag == item) {
          ids.push_back(id);
          found = true;
        }
      if (!found) throw std::domain_error("unknown criterion group '" + item + "'");
    }
  }
  return ids;
}

inline std::string format_report_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof(head), "C%02d %s ", r.id, r.passed ? "PASS" : "FAIL");
  std::string line = head + r.name + " | measured " + r.measured + " | tol " +
                     r.tolerance;
  char tail[32];
  std::snprintf(tail, sizeof(tail), " | %.2f s", r.seconds);
  line += tail;
  if (!r.detail.empty()) line += "\n      " + r.detail;
  return line;
}

inline bool validation_passed(const std::vector<CriterionResult>& rs) {
  for (const auto& r : rs)
    if (!r.passed) return false;
  return !rs.empty();
}

}  // namespace fracbound
