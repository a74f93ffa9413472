#include "aedmd/edmd.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <string>

namespace aedmd {

SnapshotSet::SnapshotSet(PointSet xs_, PointSet ys_, std::optional<double> dt_,
                         std::optional<Eigen::VectorXd> equilibrium_)
    : xs(std::move(xs_)), ys(std::move(ys_)), dt(dt_) {
  if (xs.rows() < 1) throw InvalidArgument("SnapshotSet: need at least one data pair");
  if (xs.rows() != ys.rows() || xs.cols() != ys.cols())
    throw DimensionMismatch("SnapshotSet: xs is " + std::to_string(xs.rows()) + "x" +
                            std::to_string(xs.cols()) + " but ys is " + std::to_string(ys.rows()) +
                            "x" + std::to_string(ys.cols()));
  if (xs.cols() < 1) throw InvalidArgument("SnapshotSet: dimension must be >= 1");
  if (dt && !(*dt > 0.0)) throw InvalidArgument("SnapshotSet: dt must be positive");
  equilibrium = equilibrium_ ? std::move(*equilibrium_) : Eigen::VectorXd::Zero(xs.cols());
  if (equilibrium.size() != xs.cols())
    throw DimensionMismatch("SnapshotSet: equilibrium dimension does not match data");
}

std::string_view to_string(FitMethod method) {
  switch (method) {
  case FitMethod::AnalyticEdmd: return "analytic-EDMD";
  case FitMethod::AnalyticEdmdNonOrtho: return "analytic-EDMD-nonortho";
  case FitMethod::Edmd: return "EDMD";
  case FitMethod::KernelEdmd: return "kernel-EDMD";
  }
  return "unknown";
}

KoopmanMatrix::KoopmanMatrix(Eigen::MatrixXd values_, MonomialBasis basis_, FitMethod method_)
    : values(std::move(values_)), basis(std::move(basis_)), blocks(degree_offsets(basis)),
      method(method_) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (values.rows() != n || values.cols() != n)
    throw DimensionMismatch("KoopmanMatrix: matrix is " + std::to_string(values.rows()) + "x" +
                            std::to_string(values.cols()) + ", basis has " + std::to_string(n) +
                            " elements");
}

Eigen::MatrixXd KoopmanMatrix::block(int row_degree, int col_degree) const {
  const auto& r = blocks.at(static_cast<std::size_t>(row_degree));
  const auto& c = blocks.at(static_cast<std::size_t>(col_degree));
  return values.block(static_cast<Eigen::Index>(r.start), static_cast<Eigen::Index>(c.start),
                      static_cast<Eigen::Index>(r.size), static_cast<Eigen::Index>(c.size));
}

PointSet translate(const PointSet& points, const Eigen::VectorXd& center) {
  if (points.cols() != center.size())
    throw DimensionMismatch("translate: center dimension does not match points");
  return points.rowwise() - center.transpose();
}

FunctionBasis kernel_section_basis(KernelFamily family, PointSet centers) {
  return [family, centers = std::move(centers)](const PointSet& points) {
    if (points.cols() != centers.cols())
      throw DimensionMismatch("kernel_section_basis: point dimension mismatch");
    const int n = static_cast<int>(points.cols());
    MatrixXe out(points.rows(), centers.rows());
    std::vector<ExtReal> p(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < points.rows(); ++k) {
      for (int d = 0; d < n; ++d) p[static_cast<std::size_t>(d)] = ExtReal(points(k, d));
      for (Eigen::Index i = 0; i < centers.rows(); ++i) {
        for (int d = 0; d < n; ++d) c[static_cast<std::size_t>(d)] = ExtReal(centers(i, d));
        out(k, i) = kernel_eval_translated<ExtReal>(family, c.data(), p.data(), n);
      }
    }
    return out;
  };
}

namespace {

struct Translated {
  PointSet xs;
  PointSet ys;
  KernelSpec kernel;
};

// Translation happens here and only here, driven by data.equilibrium.
Translated prepare(const SnapshotSet& data, const KernelSpec& kernel) {
  if (kernel.dimension() != data.dimension())
    throw DimensionMismatch("kernel dimension " + std::to_string(kernel.dimension()) +
                            " does not match data dimension " +
                            std::to_string(data.dimension()));
  if (!kernel.center().isZero(0.0) && kernel.center() != data.equilibrium)
    throw InvalidArgument("kernel center differs from the data equilibrium; fits translate by "
                          "the equilibrium, pass an origin-centered kernel");
  Translated t{translate(data.xs, data.equilibrium), translate(data.ys, data.equilibrium),
               KernelSpec(kernel.family(), data.dimension())};
  require_in_domain(t.kernel, t.xs, "x");
  require_in_domain(t.kernel, t.ys, "y");
  return t;
}

void check_basis(const SnapshotSet& data, const MonomialBasis& basis) {
  if (basis.dimension() != data.dimension())
    throw DimensionMismatch("basis dimension " + std::to_string(basis.dimension()) +
                            " does not match data dimension " +
                            std::to_string(data.dimension()));
}

MatrixXe nonortho_core(const MatrixXe& x, const MatrixXe& y, const GramMatrix& gram,
                       const InversionPolicy& policy) {
  const MatrixXe gx = gram.apply_inverse(x, policy);
  const MatrixXe normal = x.transpose() * gx;
  const MatrixXe rhs = gx.transpose() * y;
  Eigen::FullPivLU<MatrixXe> lu(normal);
  if (!lu.isInvertible())
    throw SingularMatrix("X^T G^{-1} X is rank deficient (rank " + std::to_string(lu.rank()) +
                             " of " + std::to_string(normal.rows()) + ")",
                         gram.condition_estimate());
  return lu.solve(rhs);
}

} // namespace

KoopmanMatrix fit_analytic_edmd(const SnapshotSet& data, const MonomialBasis& basis,
                                const KernelSpec& kernel, const InversionPolicy& policy) {
  check_basis(data, basis);
  const auto t = prepare(data, kernel);
  const GramMatrix gram = gram_matrix(t.kernel, t.xs);
  const MatrixXe x = evaluate_basis<ExtReal>(basis, t.xs);
  const MatrixXe y = evaluate_basis<ExtReal>(basis, t.ys);
  KoopmanMatrix k(to_double(gram.bilinear(x, y, policy)), basis, FitMethod::AnalyticEdmd);
  k.gram_condition = gram.condition_estimate();
  return k;
}

Eigen::MatrixXd fit_analytic_edmd_nonortho(const SnapshotSet& data, const FunctionBasis& basis,
                                           const KernelSpec& kernel,
                                           const InversionPolicy& policy) {
  const auto t = prepare(data, kernel);
  const GramMatrix gram = gram_matrix(t.kernel, t.xs);
  const MatrixXe x = basis(t.xs);
  const MatrixXe y = basis(t.ys);
  if (x.rows() != data.size() || y.rows() != data.size() || x.cols() != y.cols())
    throw DimensionMismatch("function basis returned data matrices of inconsistent shape");
  return to_double(nonortho_core(x, y, gram, policy));
}

KoopmanMatrix fit_analytic_edmd_nonortho(const SnapshotSet& data, const MonomialBasis& basis,
                                         const KernelSpec& kernel,
                                         const InversionPolicy& policy) {
  check_basis(data, basis);
  const auto t = prepare(data, kernel);
  const GramMatrix gram = gram_matrix(t.kernel, t.xs);
  const MatrixXe x = evaluate_basis<ExtReal>(basis, t.xs);
  const MatrixXe y = evaluate_basis<ExtReal>(basis, t.ys);
  KoopmanMatrix k(to_double(nonortho_core(x, y, gram, policy)), basis,
                  FitMethod::AnalyticEdmdNonOrtho);
  k.gram_condition = gram.condition_estimate();
  return k;
}

KoopmanMatrix fit_edmd(const SnapshotSet& data, const MonomialBasis& basis) {
  check_basis(data, basis);
  const PointSet xs = translate(data.xs, data.equilibrium);
  const PointSet ys = translate(data.ys, data.equilibrium);
  const MatrixXe x = evaluate_basis<ExtReal>(basis, xs);
  const MatrixXe y = evaluate_basis<ExtReal>(basis, ys);
  Eigen::CompleteOrthogonalDecomposition<MatrixXe> cod(x);
  return {to_double(cod.solve(y)), basis, FitMethod::Edmd};
}

Eigen::MatrixXd fit_kernel_edmd(const SnapshotSet& data, const KernelSpec& kernel,
                                const InversionPolicy& policy) {
  const auto t = prepare(data, kernel);
  const GramMatrix gram = gram_matrix(t.kernel, t.xs);
  const CrossGramMatrix a = cross_gram_matrix(t.kernel, t.xs, t.ys);
  return to_double(gram.apply_inverse(a.values_ext, policy));
}

Eigen::MatrixXd fit_dmd(const SnapshotSet& data) {
  const PointSet xs = translate(data.xs, data.equilibrium);
  const PointSet ys = translate(data.ys, data.equilibrium);
  // Rows are states: ys ~ xs * A^T.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xs);
  return cod.solve(ys).transpose();
}

TriangularityResidual triangularity_residual(const KoopmanMatrix& k) {
  TriangularityResidual out;
  double lower = 0.0;
  const auto n = k.values.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    const int dj = k.basis.index(static_cast<std::size_t>(j)).total_degree();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (k.basis.index(static_cast<std::size_t>(i)).total_degree() < dj) {
        const double v = std::abs(k.values(i, j));
        out.max_entry = std::max(out.max_entry, v);
        lower += v * v;
      }
    }
  }
  const double total = k.values.norm();
  out.relative_frobenius = total > 0.0 ? std::sqrt(lower) / total : 0.0;
  return out;
}

DropResult drop_out_of_domain(const SnapshotSet& data, KernelFamily family) {
  const KernelSpec spec(family, data.equilibrium);
  const auto bad_x = scan_domain(spec, data.xs).offending;
  const auto bad_y = scan_domain(spec, data.ys).offending;
  std::vector<bool> drop(static_cast<std::size_t>(data.size()), false);
  for (auto k : bad_x) drop[k] = true;
  for (auto k : bad_y) drop[k] = true;
  std::vector<Eigen::Index> keep;
  std::vector<std::size_t> dropped;
  for (std::size_t k = 0; k < drop.size(); ++k) {
    if (drop[k]) dropped.push_back(k);
    else keep.push_back(static_cast<Eigen::Index>(k));
  }
  if (keep.empty()) throw InvalidArgument("every data pair lies outside the kernel domain");
  PointSet xs(static_cast<Eigen::Index>(keep.size()), data.xs.cols());
  PointSet ys(xs.rows(), xs.cols());
  for (Eigen::Index r = 0; r < xs.rows(); ++r) {
    xs.row(r) = data.xs.row(keep[static_cast<std::size_t>(r)]);
    ys.row(r) = data.ys.row(keep[static_cast<std::size_t>(r)]);
  }
  return {SnapshotSet(std::move(xs), std::move(ys), data.dt, data.equilibrium), std::move(dropped)};
}

} // namespace aedmd
