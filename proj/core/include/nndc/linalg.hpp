#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "nndc/dataset.hpp"
#include "nndc/normal.hpp"

namespace nndc {

/// Symmetric real matrix. Construction checks finiteness and symmetry to
/// 1e-10 relative, then stores the exactly symmetrized average.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix identity(std::size_t d, double scale = 1.0);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double trace() const { return m_.trace(); }

 private:
  Eigen::MatrixXd m_;
};

/// Default row cap when estimating covariance from a large dataset.
inline constexpr std::size_t kDefaultCovarianceRows = 10'000;

/// (1/m) sum_i (x_i - mean)(x_i - mean)^T when center is set, otherwise the
/// raw second moment (1/m) sum_i x_i x_i^T. When n exceeds max_rows, a
/// seeded uniform subset of max_rows rows is used.
SymMatrix covariance(const Dataset& data, bool center = true,
                     std::size_t max_rows = kDefaultCovarianceRows, std::uint64_t seed = 0);

/// Column mean of a dataset.
Eigen::VectorXd column_mean(const Dataset& data);

struct EigenPairs {
  Eigen::VectorXd values;   ///< Descending.
  Eigen::MatrixXd vectors;  ///< One column per value.
};

/// Top-k eigenpairs of a symmetric matrix, orthonormal eigenvectors. Each
/// vector's largest-magnitude entry is made positive (first one on ties).
EigenPairs sym_eig_topk(const SymMatrix& m, std::size_t k);

/// Default ridge, relative to trace(b)/d.
inline constexpr double kDefaultRidge = 1e-6;

/// Top-k generalized eigenvectors of a v = lambda (b + ridge * trace(b)/d * I) v,
/// solved by whitening the regularized b. Columns are b-orthonormal with
/// respect to the regularized b; values are the Rayleigh quotients,
/// nonincreasing. Sign convention as in sym_eig_topk.
EigenPairs gen_eig_topk(const SymMatrix& a, const SymMatrix& b, std::size_t k,
                        double ridge = kDefaultRidge);

/// Flips each column so its largest-magnitude entry is positive.
void normalize_signs(Eigen::MatrixXd& vectors);

}  // namespace nndc
