#pragma once

#include "aedmd/basis.hpp"
#include "aedmd/error.hpp"
#include "aedmd/precision.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace aedmd {

enum class KernelFamily {
  SzegoPolydisc, // prod_i 1 / (1 - x_i y_i), Hardy space on the unit polydisc
  Exponential,   // exp(x^T y)
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

// Weights beta_alpha making the monomials orthonormal in the kernel's RKHS.
WeightScheme weight_scheme(KernelFamily family);

// Taylor-type kernel k(x, y) = f((x - c)^T (y - c)) translated to a center c.
class KernelSpec {
public:
  KernelSpec(KernelFamily family, int dimension);
  KernelSpec(KernelFamily family, Eigen::VectorXd center);

  KernelFamily family() const noexcept { return family_; }
  int dimension() const noexcept { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const noexcept { return center_; }
  // Per-coordinate bound on |x_i - c_i|; infinity for the exponential kernel.
  double domain_radius() const noexcept;

  KernelSpec recentered(Eigen::VectorXd center) const { return {family_, std::move(center)}; }

private:
  KernelFamily family_;
  Eigen::VectorXd center_;
};

// Evaluates the kernel on already translated coordinates without domain checks.
template <typename Scalar>
Scalar kernel_eval_translated(KernelFamily family, const Scalar* x, const Scalar* y, int n) {
  switch (family) {
  case KernelFamily::SzegoPolydisc: {
    Scalar denom(1);
    for (int i = 0; i < n; ++i) denom *= Scalar(1) - x[i] * y[i];
    return Scalar(1) / denom;
  }
  case KernelFamily::Exponential: {
    Scalar dot(0);
    for (int i = 0; i < n; ++i) dot += x[i] * y[i];
    using std::exp;
    return exp(dot);
  }
  }
  return Scalar(0);
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct DomainReport {
  double max_abs_coordinate = 0.0; // of translated points
  std::vector<std::size_t> offending; // samples outside the open domain
  bool ok() const noexcept { return offending.empty(); }
};

DomainReport scan_domain(const KernelSpec& spec, const PointSet& points);

// Throws DomainViolation naming the first offending sample.
void require_in_domain(const KernelSpec& spec, const PointSet& points, std::string_view label);

struct InversionPolicy {
  enum class Kind { Exact, Pseudoinverse, Ridge };
  Kind kind = Kind::Exact;
  double parameter = 0.0; // rtol for Pseudoinverse, gamma for Ridge

  static InversionPolicy exact() { return {Kind::Exact, 0.0}; }
  static InversionPolicy pseudoinverse(double rtol = 1e-12) { return {Kind::Pseudoinverse, rtol}; }
  static InversionPolicy ridge(double gamma) { return {Kind::Ridge, gamma}; }

  std::string describe() const;
};

InversionPolicy parse_inversion_policy(std::string_view text);

// Symmetric positive semidefinite Gram matrix G_ij = k(x_i, x_j) with an eagerly
// computed pivoted LDL^T factorization and spectrum, both in extended precision.
// Immutable once built; copies share the factorization.
class GramMatrix {
public:
  const Eigen::MatrixXd& values() const noexcept;
  const MatrixXe& values_ext() const noexcept;
  Eigen::Index size() const noexcept;

  // Ascending eigenvalues of G.
  const VectorXe& eigenvalues() const noexcept;
  // lambda_max / lambda_min+ where lambda_min+ is the smallest eigenvalue above
  // the numerical-rank cutoff.
  double condition_estimate() const noexcept;
  Eigen::Index effective_rank() const noexcept;

  MatrixXe apply_inverse(const MatrixXe& rhs, const InversionPolicy& policy) const;

  // A^T G^{-1} B, evaluated entirely in extended precision.
  MatrixXe bilinear(const MatrixXe& a, const MatrixXe& b, const InversionPolicy& policy) const;

private:
  friend GramMatrix gram_matrix(const KernelSpec&, const PointSet&);
  friend GramMatrix gram_from_values(MatrixXe);

  struct Impl;
  explicit GramMatrix(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

GramMatrix gram_matrix(const KernelSpec& spec, const PointSet& points);

// Wraps an explicitly given symmetric matrix (used for tests and custom kernels).
GramMatrix gram_from_values(MatrixXe values);

// G^{-1} B under the policy, rounded to double.
Eigen::MatrixXd apply_gram_inverse(const GramMatrix& gram, const Eigen::MatrixXd& rhs,
                                   const InversionPolicy& policy = InversionPolicy::exact());

struct CrossGramMatrix {
  Eigen::MatrixXd values; // (i, j) = k(y_i, x_j)
  MatrixXe values_ext;
};

CrossGramMatrix cross_gram_matrix(const KernelSpec& spec, const PointSet& xs, const PointSet& ys);

} // namespace aedmd
