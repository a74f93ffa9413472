#pragma once

#include "aedmd/basis.hpp"
#include "aedmd/kernel.hpp"

#include <Eigen/Core>

namespace aedmd {

// Values f(x_k) of a function at M sample points.
struct SampledFunction {
  PointSet points;
  Eigen::VectorXd values;

  SampledFunction(PointSet pts, Eigen::VectorXd vals);
};

struct TaylorCoefficients {
  MonomialBasis basis;
  Eigen::VectorXd coefficients; // in the weighted basis {beta_alpha x^alpha}
};

// Data-driven RKHS inner product f^T G^{-1} g.
double rkhs_inner_product(const SampledFunction& f, const SampledFunction& g,
                          const GramMatrix& gram,
                          const InversionPolicy& policy = InversionPolicy::exact());

// Orthogonal Taylor projection: coefficient i is f^T G^{-1} e_i, with e_i the basis
// function sampled at f.points.
TaylorCoefficients taylor_project(const SampledFunction& f, const MonomialBasis& basis,
                                  const GramMatrix& gram,
                                  const InversionPolicy& policy = InversionPolicy::exact());

// sum_i c_i beta_i p^alpha(i) at each point.
Eigen::VectorXd evaluate_taylor(const TaylorCoefficients& taylor, const PointSet& points);

} // namespace aedmd
