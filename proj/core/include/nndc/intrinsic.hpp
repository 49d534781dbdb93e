#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nndc/dataset.hpp"
#include "nndc/linalg.hpp"

namespace nndc {

/// Smallest k whose top-k centered-covariance eigenvalues hold at least
/// `variance_fraction` of the total variance. Eigenvalues below
/// 1e-12 * lambda_max count as zero.
std::size_t effective_dimension(const Dataset& data, double variance_fraction,
                                std::size_t max_rows = kDefaultCovarianceRows,
                                std::uint64_t seed = 0);

/// Sweep grid: 1..min(64, d_max), then geometric steps of x1.25 (rounded,
/// deduplicated) up to and including d_max.
std::vector<std::size_t> sweep_grid(std::size_t d_max);

/// Default number of (database, query) pairs used for per-dimension moments.
inline constexpr std::size_t kDefaultSweepPairs = 200'000;

struct IntrinsicOptions {
  double variance_fraction = 0.85;  ///< For d_e.
  std::size_t pair_cap = kDefaultSweepPairs;
  std::size_t max_rows = kDefaultCovarianceRows;
  std::uint64_t seed = 0;
};

struct DiscrepancyPoint {
  std::size_t d_prime = 0;
  /// Mean over p of |predicted - empirical|; infinity when a prediction saturates.
  double discrepancy = 0.0;
};

struct DimDetail {
  std::size_t d_prime = 0;
  double p = 0.0;
  std::optional<double> predicted;  ///< Empty when saturated.
  double empirical = 0.0;
  double abs_discrepancy = 0.0;
};

struct DimReport {
  std::size_t d_e = 0;
  std::size_t d_star = 0;
  std::vector<DiscrepancyPoint> discrepancy_curve;
  std::vector<DimDetail> details;
  /// Grid points whose newest PCA direction has (numerically) zero variance.
  std::vector<std::size_t> skipped;
  std::vector<double> p_list;
  std::vector<double> empirical;  ///< Empirical C_r per p, original space.
};

/// Sweeps d' over sweep_grid(d_max): projects data and queries onto the top
/// d' centered PCA directions, estimates per-dimension mean and variance of
/// |x_j - q_j|^p there, combines them as independent coordinates into sigma',
/// and compares the resulting predicted C_r (k = 1) against the empirical C_r
/// of the original space. d_star minimizes the mean absolute discrepancy over
/// p_list (ties to the smallest d').
DimReport intrinsic_dimension_by_contrast(const Dataset& data, const Dataset& queries,
                                          const std::vector<double>& p_list, std::size_t d_max,
                                          const IntrinsicOptions& options = {});

}  // namespace nndc
