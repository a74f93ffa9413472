#pragma once

#include "aedmd/basis.hpp"
#include "aedmd/edmd.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace aedmd {

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

enum class SystemKind { Cubic1D, VanDerPol, Rotating2D, LinearDiagonal, Custom };

struct SystemSpec {
  SystemKind kind = SystemKind::Custom;
  std::string name;
  int dimension = 0;
  VectorField field;
  std::vector<Eigen::VectorXd> known_equilibria;
  std::vector<std::complex<double>> known_jacobian_eigs; // at the first equilibrium

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return field(x); }
};

// xdot = x - x^3; equilibria 0 (unstable, lambda = 1) and +-1 (stable, lambda = -2).
SystemSpec cubic1d();
// xdot1 = -x2, xdot2 = -(1 - x1^2) x2 + x1; Jacobian eigenvalues -0.5 +- i sqrt(3)/2.
SystemSpec van_der_pol();
// xdot1 = -x1 - x1^2 x2 - x2^3, xdot2 = -x2 + x1 x2^2 + x1^3; in polar form
// rdot = -r, thetadot = r^2. Jacobian -I at the origin.
SystemSpec rotating2d();
// xdot_i = rates_i x_i.
SystemSpec linear_diagonal(std::vector<double> rates);
SystemSpec custom_system(std::string name, int dimension, VectorField field,
                         std::vector<Eigen::VectorXd> equilibria = {});

// Accepts cubic1d | vanderpol | rotating | linear:r1,r2,...
SystemSpec system_by_name(std::string_view name);

// Eigenvalues of the central-difference Jacobian of the vector field at x.
std::vector<std::complex<double>> jacobian_eigenvalues(const SystemSpec& system,
                                                       const Eigen::VectorXd& x);

// Classical RK4 with step dt / substeps applied substeps times.
Eigen::VectorXd rk4_flow(const SystemSpec& system, const Eigen::VectorXd& x0, double dt,
                         int substeps);

// Smallest substep count with h <= 0.01.
int default_substeps(double dt);

struct SamplingPlan {
  std::size_t count = 1;
  Eigen::VectorXd low;
  Eigen::VectorXd high;
  double dt = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Uniform draws on [low, high) per coordinate from mt19937_64(seed); the
// double mapping (53 high bits) does not depend on the standard library.
PointSet sample_uniform(const SamplingPlan& plan);

// Initial conditions are drawn before any integration; ys[k] = flow(xs[k]).
SnapshotSet generate_snapshots(const SystemSpec& system, const SamplingPlan& plan, int substeps);

// Scales xs, ys and the equilibrium by rho (conjugacy z = rho x).
SnapshotSet rescale(const SnapshotSet& data, double rho);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// y = sum_k c_k x^k on the real line.
struct PolynomialMap1D {
  std::vector<Rational> coefficients;
  double operator()(double x) const;
};

struct OracleResult {
  KoopmanMatrix k;
  bool exact = true; // false when rational arithmetic overflowed and doubles were used
};

// Exact finite section for a 1D polynomial map: column j holds the coefficients
// of beta_j p(x)^j in the weighted basis, truncated to the basis degree.
OracleResult exact_koopman_matrix_oracle(const PolynomialMap1D& map, const MonomialBasis& basis);

} // namespace aedmd
