#pragma once

#include <Eigen/Dense>

#include "nndc/dataset.hpp"

namespace nndc::detail {

/// W^T x for a d x k matrix W. Database points and queries go through this
/// same routine so identical inputs always produce identical projections.
inline Eigen::VectorXd project(const Eigen::MatrixXd& w, const PointView& x) {
  if (!x.is_sparse()) {
    const Eigen::Map<const Eigen::VectorXd> v(x.values().data(),
                                              static_cast<Eigen::Index>(x.dim()));
    return w.transpose() * v;
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(w.cols());
  for (std::size_t t = 0; t < x.indices().size(); ++t) {
    z += x.values()[t] * w.row(x.indices()[t]).transpose();
  }
  return z;
}

}  // namespace nndc::detail
