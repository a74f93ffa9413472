#include "aedmd/projection.hpp"

#include <cmath>
#include <string>

namespace aedmd {

SampledFunction::SampledFunction(PointSet pts, Eigen::VectorXd vals)
    : points(std::move(pts)), values(std::move(vals)) {
  if (points.rows() != values.size())
    throw DimensionMismatch("SampledFunction: " + std::to_string(points.rows()) + " points but " +
                            std::to_string(values.size()) + " values");
  if (!values.allFinite()) throw InvalidArgument("SampledFunction: non-finite sample value");
}

namespace {

void check_against(const SampledFunction& f, const GramMatrix& gram) {
  if (f.values.size() != gram.size())
    throw DimensionMismatch("sampled function has " + std::to_string(f.values.size()) +
                            " values, Gram matrix is built on " + std::to_string(gram.size()) +
                            " points");
}

} // namespace

double rkhs_inner_product(const SampledFunction& f, const SampledFunction& g,
                          const GramMatrix& gram, const InversionPolicy& policy) {
  check_against(f, gram);
  check_against(g, gram);
  const MatrixXe product = gram.bilinear(to_ext(f.values), to_ext(g.values), policy);
  return static_cast<double>(product(0, 0));
}

TaylorCoefficients taylor_project(const SampledFunction& f, const MonomialBasis& basis,
                                  const GramMatrix& gram, const InversionPolicy& policy) {
  check_against(f, gram);
  const MatrixXe sampled_basis = evaluate_basis<ExtReal>(basis, f.points);
  const MatrixXe coeffs = gram.bilinear(sampled_basis, to_ext(f.values), policy);
  return {basis, to_double(coeffs).col(0)};
}

Eigen::VectorXd evaluate_taylor(const TaylorCoefficients& taylor, const PointSet& points) {
  if (taylor.coefficients.size() != static_cast<Eigen::Index>(taylor.basis.size()))
    throw DimensionMismatch("evaluate_taylor: coefficient count does not match basis size");
  return evaluate_basis<double>(taylor.basis, points) * taylor.coefficients;
}

} // namespace aedmd
