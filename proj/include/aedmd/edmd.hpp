#pragma once

#include "aedmd/basis.hpp"
#include "aedmd/kernel.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace aedmd {

// M data pairs (x_k, y_k = phi(x_k)) with optional sampling time and the
// equilibrium the expansion is centered on.
struct SnapshotSet {
  PointSet xs;
  PointSet ys;
  std::optional<double> dt;
  Eigen::VectorXd equilibrium;

  SnapshotSet(PointSet xs, PointSet ys, std::optional<double> dt = std::nullopt,
              std::optional<Eigen::VectorXd> equilibrium = std::nullopt);

  Eigen::Index size() const noexcept { return xs.rows(); }
  int dimension() const noexcept { return static_cast<int>(xs.cols()); }
};

enum class FitMethod { AnalyticEdmd, AnalyticEdmdNonOrtho, Edmd, KernelEdmd };

std::string_view to_string(FitMethod method);

// N x N finite section K with K_ij = e_i^T G^{-1} e_j', i.e. column j holds the
// coefficients of K e_j.
struct KoopmanMatrix {
  Eigen::MatrixXd values;
  MonomialBasis basis;
  std::vector<DegreeBlock> blocks;
  FitMethod method = FitMethod::AnalyticEdmd;
  double gram_condition = 0.0; // 0 when no Gram matrix is involved

  KoopmanMatrix(Eigen::MatrixXd values, MonomialBasis basis, FitMethod method);

  Eigen::MatrixXd block(int row_degree, int col_degree) const;
};

PointSet translate(const PointSet& points, const Eigen::VectorXd& center);

// A function basis evaluated at (translated) points: returns the M x N data matrix.
using FunctionBasis = std::function<MatrixXe(const PointSet&)>;

// e_i = k(c_i, .) with centers given in translated coordinates.
FunctionBasis kernel_section_basis(KernelFamily family, PointSet centers);

// K = X^T G^{-1} Y on data translated by the equilibrium.
KoopmanMatrix fit_analytic_edmd(const SnapshotSet& data, const MonomialBasis& basis,
                                const KernelSpec& kernel,
                                const InversionPolicy& policy = InversionPolicy::exact());

// K = (X^T G^{-1} X)^{-1} X^T G^{-1} Y for a non-orthonormal basis.
Eigen::MatrixXd fit_analytic_edmd_nonortho(const SnapshotSet& data, const FunctionBasis& basis,
                                           const KernelSpec& kernel,
                                           const InversionPolicy& policy = InversionPolicy::exact());

KoopmanMatrix fit_analytic_edmd_nonortho(const SnapshotSet& data, const MonomialBasis& basis,
                                         const KernelSpec& kernel,
                                         const InversionPolicy& policy = InversionPolicy::exact());

// Least-squares Galerkin baseline K = X^+ Y.
KoopmanMatrix fit_edmd(const SnapshotSet& data, const MonomialBasis& basis);

// Kernel EDMD representation G^{-1} A (M x M).
Eigen::MatrixXd fit_kernel_edmd(const SnapshotSet& data, const KernelSpec& kernel,
                                const InversionPolicy& policy = InversionPolicy::exact());

// Least-squares linear model y ~ A x on raw (translated) states.
Eigen::MatrixXd fit_dmd(const SnapshotSet& data);

struct TriangularityResidual {
  double max_entry = 0.0;          // max |K_ij| over deg(i) < deg(j)
  double relative_frobenius = 0.0; // ||that part||_F / ||K||_F
};

TriangularityResidual triangularity_residual(const KoopmanMatrix& k);

struct DropResult {
  SnapshotSet data;
  std::vector<std::size_t> dropped;
};

// Removes pairs whose x or y leaves the kernel domain around the equilibrium.
DropResult drop_out_of_domain(const SnapshotSet& data, KernelFamily family);

} // namespace aedmd
