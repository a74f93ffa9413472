#pragma once

#include "aedmd/error.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace aedmd {

// Points are stored one per row: an M x n matrix holds M points of R^n.
using PointSet = Eigen::MatrixXd;

// Exponent vector alpha in N^n labelling the monomial x^alpha.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  const std::vector<int>& exponents() const noexcept { return exponents_; }
  int operator[](std::size_t i) const { return exponents_[i]; }
  std::size_t dimension() const noexcept { return exponents_.size(); }
  int total_degree() const noexcept { return total_degree_; }

  // prod_i alpha_i!
  double factorial() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.exponents_ == b.exponents_;
  }

private:
  std::vector<int> exponents_;
  int total_degree_ = 0;
};

// All alpha with |alpha| <= max_degree, graded by total degree and
// reverse-lexicographic within a degree: in 2D degree 2 gives (2,0), (1,1), (0,2).
std::vector<MultiIndex> enumerate_multiindices(int dimension, int max_degree);

// C(n + d, d), the number of monomials in n variables of total degree <= d.
std::size_t monomial_count(int dimension, int max_degree);

enum class WeightScheme {
  Unit,                 // beta_alpha = 1 (Szego kernel)
  InverseSqrtFactorial, // beta_alpha = 1 / sqrt(alpha!) (exponential kernel)
};

struct DegreeBlock {
  int degree;
  std::size_t start; // zero-based
  std::size_t size;
};

// Weighted monomials {beta_alpha x^alpha} up to a maximal total degree.
class MonomialBasis {
public:
  MonomialBasis(int dimension, int max_degree, WeightScheme scheme = WeightScheme::Unit);

  int dimension() const noexcept { return dimension_; }
  int max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return indices_.size(); }
  WeightScheme scheme() const noexcept { return scheme_; }

  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  const MultiIndex& index(std::size_t i) const { return indices_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Position of alpha in the graded order, or size() when absent.
  std::size_t find(const MultiIndex& alpha) const;

private:
  int dimension_;
  int max_degree_;
  WeightScheme scheme_;
  std::vector<MultiIndex> indices_;
  std::vector<double> weights_;
};

// Contiguous (degree, start, size) ranges of the graded basis.
std::vector<DegreeBlock> degree_offsets(const MonomialBasis& basis);

namespace detail {

template <typename Scalar>
Scalar ipow(Scalar base, int exponent) {
  Scalar result(1);
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

} // namespace detail

// M x N data matrix with entry (k, i) = beta_i * points[k]^alpha(i).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
evaluate_basis(const MonomialBasis& basis, const PointSet& points) {
  if (points.cols() != basis.dimension())
    throw DimensionMismatch("evaluate_basis: points have dimension " +
                            std::to_string(points.cols()) + ", basis expects " +
                            std::to_string(basis.dimension()));
  const auto m = points.rows();
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m, n);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& alpha = basis.index(static_cast<std::size_t>(i));
      Scalar value(basis.weight(static_cast<std::size_t>(i)));
      for (std::size_t c = 0; c < alpha.dimension(); ++c)
        value *= detail::ipow(Scalar(points(k, static_cast<Eigen::Index>(c))), alpha[c]);
      out(k, i) = value;
    }
  }
  return out;
}

} // namespace aedmd
