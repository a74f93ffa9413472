#pragma once

// Extended-precision scalar used for Gram matrix algebra.
//
// Gram matrices of Taylor-type kernels on clustered samples routinely reach
// condition numbers of 1e25..1e35, so G^{-1} and the bilinear forms X^T G^{-1} Y
// are evaluated with ~60 significant decimal digits and rounded to double at
// the end. Inputs (sample points) stay double.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/Core>

#include <limits>

namespace aedmd {

using ExtReal = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<60>,
                                              boost::multiprecision::et_off>;

} // namespace aedmd

namespace Eigen {

template <>
struct NumTraits<aedmd::ExtReal> : GenericNumTraits<aedmd::ExtReal> {
  using T = aedmd::ExtReal;
  using Real = T;
  using NonInteger = T;
  using Nested = T;
  using Literal = T;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };
  static T epsilon() { return std::numeric_limits<T>::epsilon(); }
  static T dummy_precision() { return 1000 * epsilon(); }
  static T highest() { return (std::numeric_limits<T>::max)(); }
  static T lowest() { return std::numeric_limits<T>::lowest(); }
  static T infinity() { return std::numeric_limits<T>::infinity(); }
  static T quiet_NaN() { return std::numeric_limits<T>::quiet_NaN(); }
  static int digits10() { return std::numeric_limits<T>::digits10; }
};

} // namespace Eigen

namespace aedmd {

using MatrixXe = Eigen::Matrix<ExtReal, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXe = Eigen::Matrix<ExtReal, Eigen::Dynamic, 1>;

inline MatrixXe to_ext(const Eigen::MatrixXd& m) { return m.cast<ExtReal>(); }

inline double to_double(const ExtReal& v) { return static_cast<double>(v); }

inline Eigen::MatrixXd to_double(const MatrixXe& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = static_cast<double>(m(i, j));
  return out;
}

} // namespace aedmd
