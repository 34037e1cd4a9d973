#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fracbound/weyl.hpp"

using namespace fracbound;

namespace {
const double kSqrt2 = std::sqrt(2.0);
constexpr double kTau = 6.2831853071795864769;

GridFunction plane_wave(const SpectralGrid& grid, int k) {
  const Eigen::ArrayXd x = grid.nodes();
  GridFunction f(grid.n);
  const double p = kPi * k / grid.half_width;
  for (int i = 0; i < grid.n; ++i)
    f[i] = std::complex<double>(std::cos(p * x[i]), std::sin(p * x[i]));
  return f;
}

// Independent route to the alpha = 2 ground state: fourth-order periodic
// finite differences, factorized once, then shift-inverted power iteration.
double fd_ground_energy(const Potential& V, double g, double L, int n,
                        double shift) {
  const double h = 2.0 * L / n;
  const double c0 = 30.0 / (12.0 * h * h), c1 = -16.0 / (12.0 * h * h),
               c2 = 1.0 / (12.0 * h * h);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(5 * n));
  for (int i = 0; i < n; ++i) {
    const double x = -L + i * h;
    trips.emplace_back(i, i, c0 + g * V(x) - shift);
    trips.emplace_back(i, (i + 1) % n, c1);
    trips.emplace_back(i, (i + n - 1) % n, c1);
    trips.emplace_back(i, (i + 2) % n, c2);
    trips.emplace_back(i, (i + n - 2) % n, c2);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("fd factorization failed");

  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double mu = 0.0;
  for (int it = 0; it < 300; ++it) {
    v = ldlt.solve(v);
    v.normalize();
    mu = v.dot(ldlt.solve(v));  // Rayleigh quotient of A^{-1}
  }
  return shift + 1.0 / mu;
}
}  // namespace

TEST_SUITE("weyl") {

TEST_CASE("grid validation and geometry") {
  CHECK_THROWS_AS(SpectralGrid(10.0, 7), std::domain_error);
  CHECK_THROWS_AS(SpectralGrid(10.0, 12), std::domain_error);
  CHECK_THROWS_AS(SpectralGrid(10.0, 4), std::domain_error);
  CHECK_THROWS_AS(SpectralGrid(0.0, 64), std::domain_error);
  CHECK_THROWS_AS(SpectralGrid(-5.0, 64), std::domain_error);

  const SpectralGrid grid(10.0, 256);
  CHECK(grid.spacing() == doctest::Approx(20.0 / 256).epsilon(1e-15));
  const Eigen::ArrayXd x = grid.nodes();
  REQUIRE(x.size() == 256);
  CHECK(x[0] == -10.0);
  CHECK(x[255] == doctest::Approx(10.0 - grid.spacing()).epsilon(1e-14));

  const Eigen::ArrayXd p = grid.momenta();
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(kPi / 10.0).epsilon(1e-15));
  CHECK(p[128] == doctest::Approx(kPi * 128 / 10.0).epsilon(1e-15));
  CHECK(p[255] == doctest::Approx(-kPi / 10.0).epsilon(1e-15));
  // every nonzero |p| below Nyquist appears exactly twice
  for (int k = 1; k < 128; ++k)
    CHECK(p[k] == doctest::Approx(-p[256 - k]).epsilon(1e-15));
}

TEST_CASE("symbol and multiplier") {
  const FractionalIndex a2(2.0), as(kSqrt2);
  CHECK(symbol(0.0, as) == 0.0);
  CHECK(symbol(3.0, a2) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(symbol(-2.0, as) == doctest::Approx(2.6651441426902252).epsilon(1e-14));
  CHECK(symbol(-1.5, a2) == symbol(1.5, a2));

  const SpectralGrid grid(10.0, 64);
  const Eigen::ArrayXd mult = multiplier(grid, as, 1.3);
  const Eigen::ArrayXd p = grid.momenta();
  for (int k = 0; k < 64; ++k)
    CHECK(mult[k] == doctest::Approx(1.3 * symbol(p[k], as)).epsilon(1e-14));
}

TEST_CASE("spectral apply annihilates constants and diagonalizes plane waves") {
  const SpectralGrid grid(10.0, 256);
  const FractionalIndex alpha(kSqrt2);
  const double K = 1.3;

  GridFunction ones = GridFunction::Constant(256, std::complex<double>(1.0, 0.0));
  CHECK(apply_weyl(ones, grid, alpha, K).norm() <= 1e-12 * ones.norm());

  for (int k : {1, 2, 5, 17, 100, 127, 128}) {
    const GridFunction f = plane_wave(grid, k);
    const GridFunction af = apply_weyl(f, grid, alpha, K);
    const double lambda = K * std::pow(kPi * k / 10.0, alpha.value());
    CHECK((af - lambda * f).norm() <= 1e-10 * lambda * f.norm());
  }
}

TEST_CASE("spectral apply reduces to the second derivative at alpha = 2") {
  const SpectralGrid grid(8.0, 512);
  const Eigen::ArrayXd x = grid.nodes();
  const double w = kTau / 16.0 * 3.0;  // three full periods across [-8, 8)
  GridFunction f(512);
  for (int i = 0; i < 512; ++i) f[i] = std::complex<double>(std::sin(w * x[i]), 0.0);
  const GridFunction af = apply_weyl(f, grid, FractionalIndex(2.0), 1.0);
  CHECK((af - w * w * f).norm() <= 1e-10 * w * w * f.norm());
}

TEST_CASE("spectral apply is self-adjoint and rejects bad input") {
  const SpectralGrid grid(10.0, 128);
  const FractionalIndex alpha(kSqrt2);
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    GridFunction f(128), g(128);
    for (int i = 0; i < 128; ++i) {
      f[i] = std::complex<double>(dist(rng), dist(rng));
      g[i] = std::complex<double>(dist(rng), dist(rng));
    }
    const std::complex<double> lhs = apply_weyl(f, grid, alpha, 1.0).dot(g);
    const std::complex<double> rhs = f.dot(apply_weyl(g, grid, alpha, 1.0));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + 1.0));
  }

  GridFunction wrong(64);
  wrong.setZero();
  CHECK_THROWS_AS(apply_weyl(wrong, grid, alpha, 1.0), std::invalid_argument);
  GridFunction bad = GridFunction::Constant(128, std::complex<double>(1.0, 0.0));
  bad[3] = std::complex<double>(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(apply_weyl(bad, grid, alpha, 1.0), std::domain_error);
}

TEST_CASE("dense matrix: symmetry, coupling domain, free spectrum") {
  const SpectralGrid grid(12.0, 64);
  const FractionalIndex alpha(kSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);

  CHECK_THROWS_AS(hamiltonian_matrix(V, -0.1, grid, alpha, 1.0), std::domain_error);
  CHECK_THROWS_AS(hamiltonian_matrix(V, 1.5, grid, alpha, 1.0), std::domain_error);

  const Eigen::MatrixXd H0 = hamiltonian_matrix(V, 0.0, grid, alpha, 1.0);
  CHECK((H0 - H0.transpose()).norm() == 0.0);

  // free spectrum = multiplier values (each doubly degenerate below Nyquist)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H0);
  REQUIRE(es.info() == Eigen::Success);
  Eigen::ArrayXd mult = multiplier(grid, alpha, 1.0);
  std::sort(mult.data(), mult.data() + mult.size());
  for (int i = 0; i < 64; ++i)
    CHECK(std::abs(es.eigenvalues()[i] - mult[i]) <= 1e-10 * (1.0 + mult[i]));

  // switching on the well only shifts the diagonal by g V(x_i)
  const Eigen::MatrixXd H = hamiltonian_matrix(V, 0.5, grid, alpha, 1.0);
  const Eigen::ArrayXd x = grid.nodes();
  for (int i = 0; i < 64; ++i)
    CHECK(H(i, i) - H0(i, i) == doctest::Approx(0.5 * V(x[i])).epsilon(1e-13));
  CHECK((H - H.transpose()).norm() == 0.0);
}

TEST_CASE("iterative ground state matches a dense eigensolve to near round-off") {
  const SpectralGrid grid(30.0, 1024);
  const FractionalIndex alpha(kSqrt2);
  const Potential V = make_gaussian(1.0, 1.0);
  const double g = 0.4;  // strong enough to localize the state inside L = 30

  const Eigen::MatrixXd H = hamiltonian_matrix(V, g, grid, alpha, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  REQUIRE(es.info() == Eigen::Success);
  const double dense = es.eigenvalues()[0];

  const double iter = ground_energy(V, g, grid, alpha, 1.0);
  CHECK(std::abs(iter - dense) <= 1e-9 * std::max(1.0, std::abs(dense)));
  CHECK(iter < 0.0);
}

TEST_CASE("independent finite-difference route confirms alpha = 2") {
  const Potential V = make_gaussian(1.0, 1.0);
  const double spectral =
      ground_energy(V, 0.5, SpectralGrid(40.0, 4096), FractionalIndex(2.0), 1.0);
  const double fd = fd_ground_energy(V, 0.5, 40.0, 4096, -1.0);
  CHECK(std::abs(spectral - fd) <= 1e-6);
  CHECK(spectral < 0.0);
}

TEST_CASE("weak coupling still binds: variational negativity at alpha = sqrt 2") {
  const Potential V = make_gaussian(1.0, 1.0);
  const double e = ground_energy(V, 0.1, SpectralGrid(100.0, 4096),
                                 FractionalIndex(kSqrt2), 1.0);
  CHECK(e < 0.0);
}

TEST_CASE("iteration reports failure instead of returning junk") {
  const Potential V = make_gaussian(1.0, 1.0);
  const SpectralGrid grid(10.0, 64);
  CHECK_THROWS_AS(
      ground_energy(V, 0.5, grid, FractionalIndex(2.0), 1.0, 1e-13, 1),
      std::runtime_error);
  CHECK_THROWS_AS(ground_energy(V, 1.5, grid, FractionalIndex(2.0), 1.0),
                  std::domain_error);
}

}  // TEST_SUITE
