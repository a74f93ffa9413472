#pragma once

#include "aedmd/basis.hpp"
#include "aedmd/edmd.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <vector>

namespace aedmd {

using Complex = std::complex<double>;

struct LatticeEigenvalue {
  Complex mu;                         // Koopman operator eigenvalue estimate
  std::optional<Complex> lambda;      // log(mu) / dt, principal branch
  int degree = 0;                     // diagonal block that produced it
  std::optional<MultiIndex> lattice_label;
  double match_error = -1.0;          // < 0 until lattice_match runs
  bool zero_mode = false;             // mu == 0, no generator eigenvalue
};

// Eigenvalues of every diagonal block K_rr, degree by degree. Within a block the
// order is by decreasing real part, then decreasing imaginary part.
std::vector<LatticeEigenvalue> block_eigenvalues(const KoopmanMatrix& k,
                                                 std::optional<double> dt = std::nullopt);

// True when a degree-1 generator eigenvalue sits close enough to the Nyquist
// band (|Im lambda| dt >= 0.9 pi) that log(mu) / dt may be on the wrong branch.
bool aliasing_risk(const std::vector<LatticeEigenvalue>& eigs, double dt);

struct EigenfunctionOptions {
  double resonance_threshold = 1e10; // per-degree solve condition number
  double defect_threshold = 1e8;     // eigenvector matrix condition of K_11
};

struct PrincipalEigenfunction {
  Complex mu;
  Eigen::VectorXcd coefficients;  // stacked degree blocks, degree 0 entry is zero
  int degree_max = 0;
  std::vector<double> conditioning; // index r: condition number of the degree-r solve
  std::vector<int> resonant_degrees;
  bool invariant_subspace = false;  // K_11 near-defective, Schur vector used
};

// One eigenfunction per eigenvalue of K_11, built by back-substitution through
// the block-triangular structure: v_r = (mu I - K_rr)^{-1} sum_{s<r} K_rs v_s.
std::vector<PrincipalEigenfunction> principal_eigenfunctions(const KoopmanMatrix& k,
                                                             const EigenfunctionOptions& options = {});

struct EigenfunctionValues {
  Eigen::VectorXcd values;
  Eigen::VectorXd abs;
  Eigen::VectorXd arg;
  double radius_estimate = 0.0;   // root-test estimate of the convergence radius
  std::size_t beyond_radius = 0;  // grid points with ||p - x*||_inf above it
};

EigenfunctionValues evaluate_eigenfunction(const PrincipalEigenfunction& ef,
                                           const MonomialBasis& basis, const PointSet& grid,
                                           const Eigen::VectorXd& equilibrium);

// Crude radius of convergence from the decay of the degree-block norms.
double convergence_radius_estimate(const PrincipalEigenfunction& ef, const MonomialBasis& basis);

struct LatticeReport {
  std::vector<LatticeEigenvalue> eigenvalues; // labelled copies of the input
  std::vector<double> max_error_per_degree;
  std::vector<std::size_t> unmatched;         // positions in `eigenvalues`
  bool continuous = false;                    // errors measured in lambda
};

// Labels each eigenvalue with the multi-index alpha, |alpha| = degree, whose
// lattice point sum_j alpha_j lambda_j (or prod_j mu_j^alpha_j without dt) is
// nearest; errors above tol leave it unmatched.
LatticeReport lattice_match(const std::vector<LatticeEigenvalue>& eigs, double tol);

// All sums sum_j alpha_j g_j with |alpha| <= max_degree (generator eigenvalues g).
std::vector<Complex> lattice_points(const std::vector<Complex>& generators, int max_degree);

// Distance from z to the nearest lattice point.
double lattice_distance(Complex z, const std::vector<Complex>& lattice);

// Coefficients of x -> psi(rho x) for an eigenfunction psi fitted on data scaled
// by rho: entry alpha picks up rho^|alpha|, then the degree-1 block is renormalized.
PrincipalEigenfunction unscale_eigenfunction(const PrincipalEigenfunction& ef,
                                             const MonomialBasis& basis, double rho);

} // namespace aedmd
