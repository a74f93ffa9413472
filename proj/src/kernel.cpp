#include "aedmd/kernel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <sstream>

namespace aedmd {

std::string_view to_string(KernelFamily family) {
  switch (family) {
  case KernelFamily::SzegoPolydisc: return "szego";
  case KernelFamily::Exponential: return "exponential";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "szego") return KernelFamily::SzegoPolydisc;
  if (name == "exponential" || name == "exp") return KernelFamily::Exponential;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

WeightScheme weight_scheme(KernelFamily family) {
  return family == KernelFamily::Exponential ? WeightScheme::InverseSqrtFactorial
                                             : WeightScheme::Unit;
}

KernelSpec::KernelSpec(KernelFamily family, int dimension)
    : KernelSpec(family, Eigen::VectorXd::Zero(dimension)) {}

KernelSpec::KernelSpec(KernelFamily family, Eigen::VectorXd center)
    : family_(family), center_(std::move(center)) {
  if (center_.size() < 1) throw InvalidArgument("KernelSpec: dimension must be >= 1");
}

double KernelSpec::domain_radius() const noexcept {
  return family_ == KernelFamily::SzegoPolydisc ? 1.0 : std::numeric_limits<double>::infinity();
}

DomainReport scan_domain(const KernelSpec& spec, const PointSet& points) {
  if (points.cols() != spec.dimension())
    throw DimensionMismatch("scan_domain: point dimension " + std::to_string(points.cols()) +
                            " != kernel dimension " + std::to_string(spec.dimension()));
  DomainReport report;
  const double radius = spec.domain_radius();
  for (Eigen::Index k = 0; k < points.rows(); ++k) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < points.cols(); ++c)
      worst = std::max(worst, std::abs(points(k, c) - spec.center()(c)));
    if (!std::isfinite(worst)) worst = std::numeric_limits<double>::infinity();
    report.max_abs_coordinate = std::max(report.max_abs_coordinate, worst);
    if (!(worst < radius)) report.offending.push_back(static_cast<std::size_t>(k));
  }
  return report;
}

void require_in_domain(const KernelSpec& spec, const PointSet& points, std::string_view label) {
  const auto report = scan_domain(spec, points);
  if (report.ok()) return;
  const auto k = report.offending.front();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < points.cols(); ++c)
    worst = std::max(worst, std::abs(points(static_cast<Eigen::Index>(k), c) - spec.center()(c)));
  std::ostringstream msg;
  msg << label << " sample " << k << " lies outside the " << to_string(spec.family())
      << " kernel domain (|x_i - x*_i| = " << worst << ", radius " << spec.domain_radius()
      << "; " << report.offending.size() << " offending sample(s), max |coordinate| "
      << report.max_abs_coordinate << "); rescale the data or choose another kernel";
  throw DomainViolation(msg.str(), k, worst);
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = spec.dimension();
  if (x.size() != n || y.size() != n)
    throw DimensionMismatch("kernel_eval: argument dimension does not match kernel");
  PointSet pts(2, n);
  pts.row(0) = x.transpose();
  pts.row(1) = y.transpose();
  require_in_domain(spec, pts, "kernel_eval");
  const Eigen::VectorXd tx = x - spec.center();
  const Eigen::VectorXd ty = y - spec.center();
  return kernel_eval_translated<double>(spec.family(), tx.data(), ty.data(), n);
}

std::string InversionPolicy::describe() const {
  std::ostringstream out;
  switch (kind) {
  case Kind::Exact: out << "exact"; break;
  case Kind::Pseudoinverse: out << "pinv:" << parameter; break;
  case Kind::Ridge: out << "ridge:" << parameter; break;
  }
  return out.str();
}

InversionPolicy parse_inversion_policy(std::string_view text) {
  auto param = [&](std::size_t colon, double fallback) {
    if (colon == std::string_view::npos) return fallback;
    const std::string num(text.substr(colon + 1));
    char* end = nullptr;
    const double v = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0' || !(v >= 0.0))
      throw InvalidArgument("invalid inversion policy parameter '" + num + "'");
    return v;
  };
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  if (head == "exact") return InversionPolicy::exact();
  if (head == "pinv") return InversionPolicy::pseudoinverse(param(colon, 1e-12));
  if (head == "ridge") return InversionPolicy::ridge(param(colon, 0.0));
  throw InvalidArgument("unknown inversion policy '" + std::string(text) +
                        "' (expected exact | pinv[:rtol] | ridge[:gamma])");
}

struct GramMatrix::Impl {
  Eigen::MatrixXd values;
  MatrixXe values_ext;
  Eigen::LDLT<MatrixXe> ldlt;
  VectorXe eigenvalues;
  ExtReal rank_cutoff;
  Eigen::Index rank = 0;
  double condition = 0.0;

  // Eigenvectors are only needed by the pseudoinverse policy.
  mutable std::once_flag eigenvectors_once;
  mutable MatrixXe eigenvectors;

  const MatrixXe& basis() const {
    std::call_once(eigenvectors_once, [this] {
      Eigen::SelfAdjointEigenSolver<MatrixXe> solver(values_ext, Eigen::ComputeEigenvectors);
      eigenvectors = solver.eigenvectors();
    });
    return eigenvectors;
  }
};

const Eigen::MatrixXd& GramMatrix::values() const noexcept { return impl_->values; }
const MatrixXe& GramMatrix::values_ext() const noexcept { return impl_->values_ext; }
Eigen::Index GramMatrix::size() const noexcept { return impl_->values.rows(); }
const VectorXe& GramMatrix::eigenvalues() const noexcept { return impl_->eigenvalues; }
double GramMatrix::condition_estimate() const noexcept { return impl_->condition; }
Eigen::Index GramMatrix::effective_rank() const noexcept { return impl_->rank; }

GramMatrix gram_from_values(MatrixXe values) {
  if (values.rows() != values.cols() || values.rows() < 1)
    throw DimensionMismatch("Gram matrix must be square and non-empty");
  auto impl = std::make_shared<GramMatrix::Impl>();
  impl->values = to_double(values);
  impl->values_ext = std::move(values);
  impl->ldlt.compute(impl->values_ext);

  Eigen::SelfAdjointEigenSolver<MatrixXe> solver(impl->values_ext, Eigen::EigenvaluesOnly);
  impl->eigenvalues = solver.eigenvalues();
  const auto m = impl->values_ext.rows();
  const ExtReal lmax = impl->eigenvalues(m - 1);
  impl->rank_cutoff = ExtReal(10 * m) * std::numeric_limits<ExtReal>::epsilon() *
                      (lmax > 0 ? lmax : ExtReal(0));
  ExtReal lmin_plus = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (impl->eigenvalues(i) > impl->rank_cutoff) {
      if (impl->rank == 0) lmin_plus = impl->eigenvalues(i);
      ++impl->rank;
    }
  }
  impl->condition = impl->rank > 0 ? static_cast<double>(lmax / lmin_plus)
                                   : std::numeric_limits<double>::infinity();
  return GramMatrix(std::move(impl));
}

GramMatrix gram_matrix(const KernelSpec& spec, const PointSet& points) {
  if (points.rows() < 1) throw InvalidArgument("gram_matrix: need at least one point");
  require_in_domain(spec, points, "gram_matrix");
  const int n = spec.dimension();
  const auto m = points.rows();
  // Translate once; the translated coordinates are exact doubles promoted to ExtReal.
  MatrixXe translated(m, n);
  for (Eigen::Index k = 0; k < m; ++k)
    for (int c = 0; c < n; ++c) translated(k, c) = ExtReal(points(k, c) - spec.center()(c));
  MatrixXe values(m, m);
  std::vector<ExtReal> xi(static_cast<std::size_t>(n)), xj(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int c = 0; c < n; ++c) xi[static_cast<std::size_t>(c)] = translated(i, c);
    for (Eigen::Index j = 0; j <= i; ++j) {
      for (int c = 0; c < n; ++c) xj[static_cast<std::size_t>(c)] = translated(j, c);
      values(i, j) = kernel_eval_translated<ExtReal>(spec.family(), xi.data(), xj.data(), n);
      values(j, i) = values(i, j);
    }
  }
  return gram_from_values(std::move(values));
}

MatrixXe GramMatrix::apply_inverse(const MatrixXe& rhs, const InversionPolicy& policy) const {
  if (rhs.rows() != size())
    throw DimensionMismatch("apply_gram_inverse: right-hand side has " +
                            std::to_string(rhs.rows()) + " rows, Gram matrix is " +
                            std::to_string(size()) + "x" + std::to_string(size()));
  switch (policy.kind) {
  case InversionPolicy::Kind::Exact: {
    if (impl_->ldlt.info() != Eigen::Success || impl_->rank < size()) {
      std::ostringstream msg;
      msg << "Gram matrix is singular (numerical rank " << impl_->rank << " of " << size()
          << ", condition estimate " << impl_->condition
          << "); use a pseudoinverse or ridge policy, or remove duplicate samples";
      throw SingularMatrix(msg.str(), impl_->condition);
    }
    return impl_->ldlt.solve(rhs);
  }
  case InversionPolicy::Kind::Pseudoinverse: {
    const MatrixXe& v = impl_->basis();
    const auto& lambda = impl_->eigenvalues;
    const ExtReal cutoff = ExtReal(policy.parameter) * lambda(size() - 1);
    VectorXe inv(size());
    for (Eigen::Index i = 0; i < size(); ++i)
      inv(i) = (lambda(i) > cutoff && lambda(i) > 0) ? ExtReal(1) / lambda(i) : ExtReal(0);
    MatrixXe projected = v.transpose() * rhs;
    for (Eigen::Index i = 0; i < size(); ++i) projected.row(i) *= inv(i);
    return v * projected;
  }
  case InversionPolicy::Kind::Ridge: {
    MatrixXe shifted = impl_->values_ext;
    shifted.diagonal().array() += ExtReal(policy.parameter);
    Eigen::LDLT<MatrixXe> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
      throw SingularMatrix("ridge-shifted Gram matrix could not be factorized", impl_->condition);
    return ldlt.solve(rhs);
  }
  }
  return {};
}

MatrixXe GramMatrix::bilinear(const MatrixXe& a, const MatrixXe& b,
                              const InversionPolicy& policy) const {
  if (a.rows() != size())
    throw DimensionMismatch("bilinear form: left factor row count does not match Gram matrix");
  return a.transpose() * apply_inverse(b, policy);
}

Eigen::MatrixXd apply_gram_inverse(const GramMatrix& gram, const Eigen::MatrixXd& rhs,
                                   const InversionPolicy& policy) {
  return to_double(gram.apply_inverse(to_ext(rhs), policy));
}

CrossGramMatrix cross_gram_matrix(const KernelSpec& spec, const PointSet& xs, const PointSet& ys) {
  if (xs.rows() != ys.rows() || xs.cols() != ys.cols())
    throw DimensionMismatch("cross_gram_matrix: xs and ys must have the same shape");
  require_in_domain(spec, xs, "cross_gram_matrix: x");
  require_in_domain(spec, ys, "cross_gram_matrix: y");
  const int n = spec.dimension();
  const auto m = xs.rows();
  std::vector<ExtReal> yi(static_cast<std::size_t>(n)), xj(static_cast<std::size_t>(n));
  CrossGramMatrix out{Eigen::MatrixXd(m, m), MatrixXe(m, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int c = 0; c < n; ++c) yi[static_cast<std::size_t>(c)] = ExtReal(ys(i, c) - spec.center()(c));
    for (Eigen::Index j = 0; j < m; ++j) {
      for (int c = 0; c < n; ++c) xj[static_cast<std::size_t>(c)] = ExtReal(xs(j, c) - spec.center()(c));
      out.values_ext(i, j) = kernel_eval_translated<ExtReal>(spec.family(), yi.data(), xj.data(), n);
      out.values(i, j) = static_cast<double>(out.values_ext(i, j));
    }
  }
  return out;
}

} // namespace aedmd
