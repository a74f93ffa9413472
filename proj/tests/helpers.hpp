#pragma once

#include "aedmd/basis.hpp"
#include "aedmd/dynamics.hpp"
#include "aedmd/edmd.hpp"

#include <initializer_list>

namespace testing {

inline aedmd::PointSet column(std::initializer_list<double> v) {
  aedmd::PointSet p(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index k = 0;
  for (double x : v) p(k++, 0) = x;
  return p;
}

inline aedmd::PointSet uniform(std::size_t m, std::initializer_list<double> box, std::uint64_t seed) {
  aedmd::SamplingPlan plan;
  plan.count = m;
  plan.seed = seed;
  const auto n = static_cast<Eigen::Index>(box.size() / 2);
  plan.low.resize(n);
  plan.high.resize(n);
  auto it = box.begin();
  for (Eigen::Index i = 0; i < n; ++i) {
    plan.low(i) = *it++;
    plan.high(i) = *it++;
  }
  return aedmd::sample_uniform(plan);
}

// ys = f(xs) row by row
template <class F>
aedmd::SnapshotSet map_data(const aedmd::PointSet& xs, F f, std::optional<double> dt = std::nullopt) {
  aedmd::PointSet ys(xs.rows(), xs.cols());
  for (Eigen::Index k = 0; k < xs.rows(); ++k) ys.row(k) = f(Eigen::VectorXd(xs.row(k).transpose())).transpose();
  return aedmd::SnapshotSet(xs, ys, dt);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace testing
