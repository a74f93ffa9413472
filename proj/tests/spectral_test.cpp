#include "doctest.h"
#include "helpers.hpp"

#include "aedmd/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace aedmd;

namespace {

const double kPi = std::acos(-1.0);

KoopmanMatrix diag1d(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return KoopmanMatrix(v.asDiagonal(), MonomialBasis(1, static_cast<int>(d.size()) - 1), FitMethod::AnalyticEdmd);
}

// random K that is exactly block upper triangular
KoopmanMatrix random_triangular(int n, int d, std::uint64_t seed) {
  const MonomialBasis basis(n, d);
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto size = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd k(size, size);
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j) {
      const int di = basis.index(static_cast<std::size_t>(i)).total_degree();
      const int dj = basis.index(static_cast<std::size_t>(j)).total_degree();
      k(i, j) = di < dj ? 0.0 : u(g) * std::pow(0.5, di);
    }
  return KoopmanMatrix(k, basis, FitMethod::AnalyticEdmd);
}

// complex pair in the degree-1 block, so eigenfunctions come in conjugate pairs
KoopmanMatrix rotating_triangular(int d, std::uint64_t seed) {
  auto k = random_triangular(2, d, seed);
  k.values(1, 1) = 0.6;
  k.values(1, 2) = -0.5;
  k.values(2, 1) = 0.5;
  k.values(2, 2) = 0.6;
  return k;
}

SnapshotSet cubic_flow(std::size_t m, double lo, double hi, double dt, std::uint64_t seed) {
  SamplingPlan plan;
  plan.count = m;
  plan.low = Eigen::VectorXd::Constant(1, lo);
  plan.high = Eigen::VectorXd::Constant(1, hi);
  plan.dt = dt;
  plan.seed = seed;
  return generate_snapshots(cubic1d(), plan, default_substeps(dt));
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("block eigenvalues of a diagonal K") {
  const auto k = diag1d({1, 0.5, 0.25});
  const auto e = block_eigenvalues(k);
  REQUIRE(e.size() == 3);
  for (int r = 0; r < 3; ++r) {
    CHECK(e[static_cast<std::size_t>(r)].degree == r);
    CHECK(e[static_cast<std::size_t>(r)].mu == Complex(std::pow(0.5, r), 0));
    CHECK_FALSE(e[static_cast<std::size_t>(r)].lambda);
  }
  const auto c = block_eigenvalues(k, 1.0);
  CHECK(std::abs(*c[0].lambda) == 0.0);
  CHECK(std::abs(*c[1].lambda + std::log(2.0)) <= 1e-15);
  CHECK(std::abs(*c[2].lambda + 2 * std::log(2.0)) <= 1e-15);
}

TEST_CASE("zero eigenvalue has no generator eigenvalue") {
  const auto e = block_eigenvalues(diag1d({1, 0.5, 0.0}), 1.0);
  CHECK(e[2].zero_mode);
  CHECK_FALSE(e[2].lambda);
}

TEST_CASE("block spectrum equals the spectrum of a triangular K") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto k = random_triangular(2, 3, seed);
    auto blocks = block_eigenvalues(k);
    Eigen::EigenSolver<Eigen::MatrixXd> full(k.values, false);
    std::vector<Complex> a, b;
    for (const auto& e : blocks) a.push_back(e.mu);
    for (Eigen::Index i = 0; i < full.eigenvalues().size(); ++i) b.push_back(full.eigenvalues()(i));
    REQUIRE(a.size() == b.size());
    // multiset equality by greedy matching
    for (auto z : a) {
      auto best = std::min_element(b.begin(), b.end(), [&](Complex p, Complex q) { return std::abs(p - z) < std::abs(q - z); });
      CHECK(std::abs(*best - z) <= 1e-10);
      b.erase(best);
    }
  }
}

TEST_CASE("exp/log round trip") {
  const auto e = block_eigenvalues(rotating_triangular(4, 3), 0.7);
  for (const auto& x : e) {
    REQUIRE(x.lambda);
    CHECK(std::abs(std::exp(*x.lambda * 0.7) - x.mu) <= 1e-12 * std::abs(x.mu));
  }
}

TEST_CASE("aliasing warning near the Nyquist band") {
  KoopmanMatrix k = rotating_triangular(1, 1);
  const double theta = 0.95 * kPi;
  k.values.block(1, 1, 2, 2) << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  CHECK(aliasing_risk(block_eigenvalues(k, 1.0), 1.0));
  CHECK_FALSE(aliasing_risk(block_eigenvalues(rotating_triangular(1, 1), 1.0), 1.0));
}

TEST_CASE("eigenvector of a diagonal K") {
  const auto efs = principal_eigenfunctions(diag1d({1, 0.3, 0.09, 0.027}));
  REQUIRE(efs.size() == 1);
  CHECK(efs[0].mu == Complex(0.3, 0));
  Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(4);
  expected(1) = 1;
  CHECK((efs[0].coefficients - expected).norm() <= 1e-14);
}

TEST_CASE("recursion satisfies K v = mu v on triangular matrices") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto k = random_triangular(2, 4, seed);
    for (const auto& ef : principal_eigenfunctions(k)) {
      if (!ef.resonant_degrees.empty() || ef.invariant_subspace) continue;
      const Eigen::VectorXcd r = k.values.cast<Complex>() * ef.coefficients - ef.mu * ef.coefficients;
      CHECK(r.norm() <= 1e-8 * ef.coefficients.norm());
      CHECK(ef.coefficients(0) == Complex(0, 0));
      CHECK(ef.coefficients.segment(1, 2).norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("conjugate pairs have conjugate coefficients") {
  const auto efs = principal_eigenfunctions(rotating_triangular(4, 9));
  REQUIRE(efs.size() == 2);
  CHECK(std::abs(efs[0].mu - std::conj(efs[1].mu)) <= 1e-12);
  CHECK((efs[0].coefficients - efs[1].coefficients.conjugate()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("repeated eigenvalue in a defective block yields an invariant subspace basis") {
  KoopmanMatrix k = random_triangular(2, 3, 4);
  k.values.block(1, 1, 2, 2) << 0.5, 1.0, 0.0, 0.5;
  const auto efs = principal_eigenfunctions(k);
  REQUIRE(efs.size() == 2);
  CHECK(efs[0].invariant_subspace);
  CHECK(std::abs(efs[0].coefficients.segment(1, 2).dot(efs[1].coefficients.segment(1, 2))) <= 1e-12);
}

TEST_CASE("resonance is flagged") {
  // mu^2 = mu_2 exactly: 0.5 * 0.5 equals the degree-2 entry
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, 0.5, 0, 0, 0.3, 0.25;
  const auto efs = principal_eigenfunctions(KoopmanMatrix(m, MonomialBasis(1, 2), FitMethod::AnalyticEdmd));
  // the degree-2 solve is (0.5 - 0.25) v = 0.3, not resonant
  CHECK(efs[0].resonant_degrees.empty());
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, 0.5, 0, 0, 0.3, 0.5;
  const auto res = principal_eigenfunctions(KoopmanMatrix(r, MonomialBasis(1, 2), FitMethod::AnalyticEdmd));
  CHECK(res[0].resonant_degrees == std::vector<int>{2});
}

TEST_CASE("cubic eigenfunction matches x/sqrt(1-x^2)") {
  const auto data = cubic_flow(20, -0.8, 0.8, 0.1, 1);
  const MonomialBasis basis(1, 5);
  const auto k = fit_analytic_edmd(data, basis, KernelSpec(KernelFamily::SzegoPolydisc, 1));
  const auto efs = principal_eigenfunctions(k);
  REQUIRE(efs.size() == 1);
  const double expected[] = {0, 1, 0, 0.5, 0, 0.375};
  for (int j = 0; j < 6; ++j) CHECK(std::abs(efs[0].coefficients(j) - expected[j]) <= 5e-2);
  const auto v = evaluate_eigenfunction(efs[0], basis, testing::column({0.5, 0.0}), Eigen::VectorXd::Zero(1));
  CHECK(std::abs(v.values(0) - 0.5 / std::sqrt(0.75)) <= 2e-2);
  CHECK(v.values(1) == Complex(0, 0));
}

TEST_CASE("evaluation examples") {
  const MonomialBasis basis(2, 2);
  PrincipalEigenfunction ef;
  ef.mu = 0.5;
  ef.degree_max = 2;
  ef.coefficients = Eigen::VectorXcd::Zero(6);
  ef.coefficients(1) = 1;
  Eigen::MatrixXd grid(2, 2);
  grid << 0.3, 0.7, 1.0, 2.0;
  Eigen::Vector2d eq(1.0, 2.0);
  const auto at_zero = evaluate_eigenfunction(ef, basis, grid.topRows(1), Eigen::Vector2d::Zero());
  CHECK(at_zero.values(0) == Complex(0.3, 0));
  CHECK(evaluate_eigenfunction(ef, basis, grid.bottomRows(1), eq).values(0) == Complex(0, 0));
}

TEST_CASE("lattice matching") {
  auto eigs = block_eigenvalues(diag1d({1, 0.5, 0.25, 0.125}));
  const auto report = lattice_match(eigs, 1e-12);
  CHECK(report.unmatched.empty());
  CHECK(report.eigenvalues[3].lattice_label->exponents() == std::vector<int>{3});
  CHECK(report.eigenvalues[3].match_error == 0.0);

  eigs[2].mu = 0.9;
  const auto spurious = lattice_match(eigs, 1e-2);
  CHECK(spurious.unmatched == std::vector<std::size_t>{2});
  CHECK_FALSE(spurious.eigenvalues[2].lattice_label);
}

TEST_CASE("Van der Pol degree-2 labels") {
  const Complex l(-0.5, std::sqrt(3.0) / 2);
  std::vector<LatticeEigenvalue> eigs;
  auto push = [&](Complex lambda, int degree) {
    LatticeEigenvalue e;
    e.lambda = lambda;
    e.mu = std::exp(lambda);
    e.degree = degree;
    eigs.push_back(e);
  };
  push(l, 1);
  push(std::conj(l), 1);
  push(2.0 * l, 2);
  push(l + std::conj(l), 2);
  push(2.0 * std::conj(l), 2);
  const auto report = lattice_match(eigs, 1e-9);
  CHECK(report.continuous);
  CHECK(report.unmatched.empty());
  CHECK(std::abs(l + std::conj(l) - Complex(-1, 0)) <= 1e-15);
}

TEST_CASE("lattice helpers and unscaling") {
  const auto pts = lattice_points({Complex(-1, 0), Complex(-2, 0)}, 2);
  CHECK(pts.size() == 6);
  CHECK(lattice_distance(Complex(-3.1, 0), pts) == doctest::Approx(0.1));

  const MonomialBasis basis(1, 3);
  PrincipalEigenfunction ef;
  ef.coefficients = Eigen::VectorXcd::Ones(4);
  ef.coefficients(0) = 0;
  const auto u = unscale_eigenfunction(ef, basis, 0.5);
  CHECK(std::abs(u.coefficients(1) - 1.0) <= 1e-15);
  CHECK(std::abs(u.coefficients(2) - 0.5) <= 1e-15);
  CHECK(std::abs(u.coefficients(3) - 0.25) <= 1e-15);
}

}
