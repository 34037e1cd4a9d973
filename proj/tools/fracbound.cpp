// Command-line front end: Green's-function tables, kernel dumps, bound-state
// solves, parameter sweeps, and the validation suite.
//
// Exit codes: 0 success; 1 validation-suite failure; 2 usage error;
// 3 compute error (evaluator threw).

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fracbound/birman_schwinger.hpp"
#include "fracbound/format.hpp"
#include "fracbound/greens.hpp"
#include "fracbound/ground_state.hpp"
#include "fracbound/potentials.hpp"
#include "fracbound/validate.hpp"
#include "fracbound/weyl.hpp"

namespace {

using namespace fracbound;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_real(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw UsageError("trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw UsageError("not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("number out of range: '" + s + "'");
  }
}

// "v" -> {v}; "start:stop:step" -> inclusive grid.
std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {to_real(parts[0])};
  if (parts.size() != 3)
    throw UsageError("grid spec must be a value or start:stop:step, got '" + spec + "'");
  const double start = to_real(parts[0]), stop = to_real(parts[1]),
               step = to_real(parts[2]);
  if (!(step > 0.0) || stop < start)
    throw UsageError("grid spec needs stop >= start and step > 0");
  std::vector<double> grid;
  for (double v = start; v <= stop + 1e-9 * step; v += step) grid.push_back(v);
  return grid;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> vals;
  for (const auto& item : split(spec, ','))
    if (!item.empty()) vals.push_back(to_real(item));
  return vals;
}

// kind:V0:a with an extra :s for the lorentzian tail power.
Potential parse_potential(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() < 3) throw UsageError("potential spec is kind:V0:a[:s]");
  const double V0 = to_real(parts[1]), a = to_real(parts[2]);
  try {
    if (parts[0] == "gaussian") {
      if (parts.size() != 3) throw UsageError("gaussian takes kind:V0:a");
      return make_gaussian(V0, a);
    }
    if (parts[0] == "lorentzian") {
      if (parts.size() != 4) throw UsageError("lorentzian takes kind:V0:a:s");
      return make_lorentzian(V0, a, to_real(parts[3]));
    }
    if (parts[0] == "sech2") {
      if (parts.size() != 3) throw UsageError("sech2 takes kind:V0:a");
      return make_sech2(V0, a);
    }
  } catch (const std::domain_error& e) {
    throw UsageError(std::string("bad potential parameters: ") + e.what());
  }
  throw UsageError("unknown potential kind '" + parts[0] + "'");
}

unsigned worker_count() {
  if (const char* env = std::getenv("FRACBOUND_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Single sink so --out and stdout share one code path.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);  // LF line endings everywhere
      if (!file) throw UsageError("cannot open output file '" + path + "'");
      os = &file;
    }
  }
  std::ostream& out() { return *os; }
};

struct CommonOpts {
  double alpha = 0.0;
  double K = 1.0;
  std::string kappa = "1";
  std::string r = "0:5:0.5";
  std::string g;
  std::string potential = "gaussian:1:1";
  double L = 12.0;
  int n = 320;
  std::string out;
  std::string format = "csv";
  double tol = 1e-10;
  std::string only;
  std::string block = "full";
};

int cmd_greens(const CommonOpts& o, bool derivative) {
  const std::vector<double> rs = parse_grid(o.r);
  const std::vector<double> kappas = parse_list(o.kappa);
  if (kappas.size() != 1) throw UsageError("greens/dgreens take a single --kappa");
  if (o.format != "csv") throw UsageError("greens/dgreens emit csv only");
  const GreensContext ctx(o.alpha, o.K, kappas[0]);
  Sink sink(o.out);
  if (!derivative) {
    sink.out() << "r,z,G_oracle,G_series,branch,rel_diff\n";
    GreensEvalOptions opts;
    opts.oracle_tol = o.tol;
    for (double r : rs) {
      const double oracle = greens_oracle(r, ctx, o.tol);
      const GreensValue val = greens_eval_traced(r, ctx, opts);
      const double rd = std::abs(val.value - oracle) / std::abs(oracle);
      sink.out() << csv_line({g17(r), g17(ctx.scaled_distance(r)), g17(oracle),
                              g17(val.value), branch_name(val.branch), g17(rd)});
    }
    return 0;
  }
  sink.out() << "r,z,dG,branch,dG_fd,rel_diff\n";
  const double h = 1e-4 * ctx.kappa;
  const GreensContext up(o.alpha, o.K, ctx.kappa + h);
  const GreensContext dn(o.alpha, o.K, ctx.kappa - h);
  for (double r : rs) {
    const double fd =
        (greens_oracle(r, up, 1e-12) - greens_oracle(r, dn, 1e-12)) / (2.0 * h);
    double dg = fd;
    std::string branch = "fd";
    if (ctx.series_safe() && ctx.scaled_distance(r) <= 2.0) {
      dg = dgreens_series(r, ctx);
      branch = "series";
    }
    const double rd = std::abs(dg - fd) / std::max(std::abs(fd), 1e-300);
    sink.out() << csv_line({g17(r), g17(ctx.scaled_distance(r)), g17(dg), branch,
                            g17(fd), g17(rd)});
  }
  return 0;
}

int cmd_kernel(const CommonOpts& o) {
  const std::vector<double> kappas = parse_list(o.kappa);
  if (kappas.size() != 1) throw UsageError("kernel takes a single --kappa");
  const Potential V = parse_potential(o.potential);
  const GreensContext ctx(o.alpha, o.K, kappas[0]);
  const QuadratureRule rule = QuadratureRule::for_potential(V, o.L, o.n);
  const BSKernel kernel = assemble(V, rule, ctx);
  if (kernel.support_warning)
    std::cerr << "warning: potential magnitude at the rule boundary exceeds "
                 "1e-10 of its depth; enlarge --L\n";
  Sink sink(o.out);
  if (o.format == "csv") {
    const Eigen::MatrixXd* block = &kernel.full;
    if (o.block == "sing") block = &kernel.sing;
    else if (o.block == "fin") block = &kernel.fin;
    else if (o.block != "full") throw UsageError("--block must be full, sing, or fin");
    write_kernel_csv(sink.out(), kernel, *block);
    return 0;
  }
  if (o.format != "json") throw UsageError("--format must be csv or json");
  const FiniteBoundReport rep = finite_bound_check(kernel);
  const TopEigenpair top = top_eigenpair(kernel);
  sink.out() << json_line(
      {{"n", std::to_string(rule.n())},
       {"alpha", json_number(o.alpha)},
       {"K", json_number(o.K)},
       {"kappa", json_number(kappas[0])},
       {"potential", V.name()},
       {"lambda_max", json_number(top.lambda)},
       {"trace", json_number(trace_abs(kernel))},
       {"hs_norm", json_number(hs_norm(kernel))},
       {"hs_norm_bound", json_number(hs_norm_bound(kernel))},
       {"bound_max_ratio", json_number(rep.max_ratio)},
       {"support_warning", kernel.support_warning ? "true" : "false"}},
      {false, false, false, false, true, false, false, false, false, false, false});
  return 0;
}

int cmd_ground_state(const CommonOpts& o) {
  if (o.g.empty()) throw UsageError("ground-state needs a nonempty --g list");
  const std::vector<double> gs = parse_list(o.g);
  if (gs.empty()) throw UsageError("ground-state needs a nonempty --g list");
  if (o.format != "json") throw UsageError("ground-state emits json only");
  const Potential V = parse_potential(o.potential);
  const FractionalIndex alpha(o.alpha);
  const QuadratureRule rule = QuadratureRule::for_potential(V, o.L, o.n);
  Sink sink(o.out);
  bool any_failed = false;
  for (double g : gs) {
    try {
      const GroundStateSolution sol = solve_kappa(g, V, rule, alpha, o.K);
      // Spectral cross-check on a box scaled to the bound state's extent.
      const double ell = std::pow(o.K / sol.energy, 1.0 / o.alpha);
      const double L = std::min(std::max(4.0 * ell, 50.0), 2000.0);
      const int N = L <= 500.0 ? 8192 : 16384;
      const double oracle_E = -ground_energy(V, g, SpectralGrid(L, N), alpha, o.K);
      sink.out() << json_line(
          {{"g", json_number(g)},
           {"alpha", json_number(o.alpha)},
           {"K", json_number(o.K)},
           {"kappa_star", json_number(sol.kappa_star)},
           {"E", json_number(sol.energy)},
           {"kappa_pow", json_number(sol.kappa_pow)},
           {"expansion", json_number(sol.expansion_kappa_pow)},
           {"residual", json_number(sol.residual)},
           {"lambda_residual", json_number(sol.lambda_residual)},
           {"oracle_E", json_number(oracle_E)},
           {"n", std::to_string(rule.n())},
           {"L", json_number(L)}},
          std::vector<bool>(12, false));
    } catch (const std::exception& e) {
      any_failed = true;
      sink.out() << json_line({{"g", json_number(g)}, {"error", e.what()}},
                              {false, true});
    }
  }
  return any_failed ? 3 : 0;
}

int cmd_sweep(const CommonOpts& o) {
  const std::vector<double> rs = parse_grid(o.r);
  const std::vector<double> kappas = parse_list(o.kappa);
  if (rs.empty() || kappas.empty()) throw UsageError("sweep needs --r and --kappa");
  if (o.format != "csv") throw UsageError("sweep emits csv only");
  struct Point {
    double kappa, r, z, value;
    GreensBranch branch;
    std::string error;
  };
  std::vector<Point> points;
  for (double kappa : kappas)
    for (double r : rs) points.push_back({kappa, r, 0.0, 0.0, GreensBranch::Oracle, ""});

  const FractionalIndex alpha(o.alpha);
  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      Point& pt = points[i];
      try {
        const GreensContext ctx(alpha, o.K, pt.kappa);
        pt.z = ctx.scaled_distance(pt.r);
        const GreensValue val = greens_eval_traced(pt.r, ctx);
        pt.value = val.value;
        pt.branch = val.branch;
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  const unsigned workers =
      std::min<std::size_t>(worker_count(), points.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  Sink sink(o.out);
  sink.out() << "alpha,K,kappa,r,z,G,branch,error\n";
  bool any_failed = false;
  for (const Point& pt : points) {
    if (!pt.error.empty()) any_failed = true;
    sink.out() << csv_line({g17(o.alpha), g17(o.K), g17(pt.kappa), g17(pt.r),
                            pt.error.empty() ? g17(pt.z) : "",
                            pt.error.empty() ? g17(pt.value) : "",
                            pt.error.empty() ? branch_name(pt.branch) : "",
                            pt.error});
  }
  return any_failed ? 3 : 0;
}

int cmd_validate(const CommonOpts& o) {
  std::vector<int> only;
  if (!o.only.empty()) {
    try {
      only = criteria_for_selector(o.only);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }
  const std::vector<CriterionResult> results = run_validation(only);
  Sink sink(o.out);
  for (const auto& r : results) sink.out() << format_report_line(r) << "\n";
  const bool ok = validation_passed(results);
  sink.out() << (ok ? "ALL PASS" : "FAILURES PRESENT") << " (" << results.size()
             << " criteria)\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bound states of the one-dimensional fractional Schrodinger operator "
      "K P^alpha - g|V| at weak coupling"};
  app.footer(
      "Exit codes: 0 success; 1 validation-suite failure; 2 usage error; "
      "3 compute error.\n"
      "Potentials: gaussian:V0:a, lorentzian:V0:a:s, sech2:V0:a.\n"
      "Grids: --r takes a value or start:stop:step; --kappa and --g take "
      "comma lists.\n"
      "FRACBOUND_THREADS caps the sweep worker pool.");
  app.require_subcommand(1);

  CommonOpts o;
  const auto add_common = [&](CLI::App* sub, bool needs_alpha) {
    auto* a = sub->add_option("--alpha", o.alpha, "fractional index in (1,2]");
    if (needs_alpha) a->required();
    sub->add_option("--K", o.K, "kinetic coefficient K_alpha > 0");
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--format", o.format, "csv or json");
  };

  CLI::App* greens = app.add_subcommand("greens", "Green's function table over an r-grid");
  add_common(greens, true);
  greens->add_option("--kappa", o.kappa, "spectral parameter kappa > 0");
  greens->add_option("--r", o.r, "r grid (value or start:stop:step)");
  greens->add_option("--tol", o.tol, "oracle tolerance");

  CLI::App* dgreens =
      app.add_subcommand("dgreens", "kappa-derivative table over an r-grid");
  add_common(dgreens, true);
  dgreens->add_option("--kappa", o.kappa, "spectral parameter kappa > 0");
  dgreens->add_option("--r", o.r, "r grid (value or start:stop:step)");
  dgreens->add_option("--tol", o.tol, "oracle tolerance");

  CLI::App* kernel = app.add_subcommand(
      "kernel", "assemble the weighted kernel matrix; csv matrix or json summary");
  add_common(kernel, true);
  kernel->add_option("--kappa", o.kappa, "spectral parameter kappa > 0");
  kernel->add_option("--potential", o.potential, "well spec kind:V0:a[:s]");
  kernel->add_option("--L", o.L, "rule half-width before support clipping");
  kernel->add_option("--n", o.n, "rule node count");
  kernel->add_option("--block", o.block, "csv block: full, sing, or fin");

  CLI::App* ground = app.add_subcommand(
      "ground-state", "solve the bound-state condition for each coupling in --g");
  add_common(ground, true);
  ground->add_option("--g", o.g, "comma list of couplings")->required();
  ground->add_option("--potential", o.potential, "well spec kind:V0:a[:s]");
  ground->add_option("--L", o.L, "rule half-width before support clipping");
  ground->add_option("--n", o.n, "rule node count");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "dispatcher values over the (kappa, r) product grid");
  add_common(sweep, true);
  sweep->add_option("--kappa", o.kappa, "comma list of kappa values");
  sweep->add_option("--r", o.r, "r grid (value or start:stop:step)");

  CLI::App* validate =
      app.add_subcommand("validate", "run the acceptance criteria suite");
  add_common(validate, false);
  validate->add_option("--only", o.only,
                       "comma list of criterion numbers or groups "
                       "(greens, series, weyl, kernel, ground, spectral)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(greens)) return cmd_greens(o, false);
    if (app.got_subcommand(dgreens)) return cmd_greens(o, true);
    if (app.got_subcommand(kernel)) return cmd_kernel(o);
    if (app.got_subcommand(ground)) {
      if (!ground->count("--format")) o.format = "json";
      return cmd_ground_state(o);
    }
    if (app.got_subcommand(sweep)) return cmd_sweep(o);
    if (app.got_subcommand(validate)) return cmd_validate(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "compute error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
