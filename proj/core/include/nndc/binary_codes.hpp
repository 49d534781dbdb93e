#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nndc/dataset.hpp"
#include "nndc/linalg.hpp"

namespace nndc {

enum class CodeTrainer { kPca, kMrc, kRandom };

std::string_view trainer_name(CodeTrainer trainer);

/// Linear binary codes: bit j of x is 1 iff w_j . x + b_j >= 0.
/// Codes are packed into 64-bit words, least significant bit first.
class BinaryCodeIndex {
 public:
  /// Encodes every point of `data` with projections W (d x k) and thresholds b.
  static BinaryCodeIndex encode_dataset(const Dataset& data, Eigen::MatrixXd projections,
                                        Eigen::VectorXd thresholds, CodeTrainer trainer);

  std::vector<std::uint64_t> encode(const PointView& x) const;

  std::span<const std::uint64_t> code(std::size_t i) const {
    return std::span<const std::uint64_t>(codes_).subspan(i * words_, words_);
  }
  bool bit(std::size_t i, std::size_t j) const {
    return (codes_[i * words_ + j / 64] >> (j % 64)) & 1u;
  }

  std::size_t size() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(projections_.rows()); }
  std::size_t bits() const { return static_cast<std::size_t>(projections_.cols()); }
  std::size_t words() const { return words_; }
  CodeTrainer trainer() const { return trainer_; }
  const Eigen::MatrixXd& projections() const { return projections_; }
  const Eigen::VectorXd& thresholds() const { return thresholds_; }

  /// Non-fatal training notes (e.g. rank-deficient covariance).
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  Eigen::MatrixXd projections_;
  Eigen::VectorXd thresholds_;
  std::vector<std::uint64_t> codes_;
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  CodeTrainer trainer_ = CodeTrainer::kRandom;
  std::vector<std::string> warnings_;
};

std::size_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// PCA hashing: W = top-k eigenvectors of the centered covariance, thresholds
/// place the cut at the data mean (b = -W^T mean). If the covariance has rank
/// below k the missing directions are random orthonormal completions and a
/// warning is recorded.
BinaryCodeIndex train_pca_hash(const Dataset& data, std::size_t bits,
                               std::size_t max_rows = kDefaultCovarianceRows,
                               std::uint64_t seed = 0);

/// Contrast-maximizing hashing: W = top-k generalized eigenvectors of
/// (centered covariance, s_nn), i.e. directions maximizing
/// (w^T Sigma w) / (w^T S_NN w). Thresholds as in PCA hashing.
BinaryCodeIndex train_mrc_hash(const Dataset& data, const SymMatrix& s_nn, std::size_t bits,
                               double ridge = kDefaultRidge,
                               std::size_t max_rows = kDefaultCovarianceRows,
                               std::uint64_t seed = 0);

/// Sign random projections (Gaussian W) thresholded at the data mean.
BinaryCodeIndex train_random_hash(const Dataset& data, std::size_t bits, std::uint64_t seed);

/// The m database points with smallest hamming distance to q's code, ties
/// by ascending index.
std::vector<std::size_t> hamming_rank(const BinaryCodeIndex& index, const PointView& q,
                                      std::size_t m);

/// All database points within hamming distance r of q's code, ordered by
/// (distance, index).
std::vector<std::size_t> hamming_radius(const BinaryCodeIndex& index, const PointView& q,
                                        std::size_t r);

struct SnnEstimate {
  SymMatrix s_nn;
  std::size_t used = 0;
  /// Queries that coincide with a database point.
  std::size_t excluded = 0;
};

/// S_NN = mean over queries of (q - nn(q)) (q - nn(q))^T with nn the exact
/// L_p nearest neighbor. Queries equal to a database point are skipped.
SnnEstimate estimate_snn(const Dataset& data, const Dataset& queries, double p);

}  // namespace nndc
