#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "nndc/dataset.hpp"
#include "nndc/moments.hpp"

namespace nndc {

// Relative contrast C_r = E_q[D_mean^q] / E_q[D_knn^q]: how far a random
// database point is from a query compared with its k-th nearest neighbor.
// Values near 1 mean nearest-neighbor search is barely meaningful.
//
// The predicted form models R = D(x, q)^p as Gaussian with normalized
// standard deviation sigma' = std(R) / mean(R), which gives
//
//   C_r ~= 1 / [1 + Phi^-1(k/n + Phi(-1/sigma')) * sigma']^(1/p).

enum class ContrastMode { kEmpirical, kPredicted, kAsymptotic };

/// How empirical contrast averages over queries.
enum class EmpiricalEstimator {
  kRatioOfMeans,  ///< mean_q D_mean / mean_q D_knn (default)
  kMeanOfRatios,  ///< mean_q (D_mean / D_knn)
};

struct ContrastFlags {
  /// Base of the prediction is <= 1e-12; contrast is effectively unbounded
  /// and c_r is left empty.
  bool saturated = false;
  /// sigma' == 0: the limit c_r = 1 is reported.
  bool degenerate = false;
  /// The Gaussian model is exact only for L1; for p != 1 it approximates.
  bool approximate_for_p_neq_1 = false;

  std::string to_string() const;
};

struct ContrastReport {
  ContrastMode mode = ContrastMode::kEmpirical;
  EmpiricalEstimator estimator = EmpiricalEstimator::kRatioOfMeans;
  /// Absent only when flags.saturated.
  std::optional<double> c_r;
  ContrastFlags flags;

  std::size_t n = 0;
  std::optional<std::size_t> d;
  std::optional<double> s;
  double p = 1.0;
  std::size_t k = 1;
  std::optional<double> sigma_prime;

  // Empirical mode only.
  std::size_t query_count = 0;
  double d_mean = 0.0;
  double d_knn = 0.0;

  bool valid() const { return c_r.has_value(); }
};

std::string_view mode_name(ContrastMode mode);

/// "mode,n,d,s,p,k,sigma_prime,c_r,flags"
std::string contrast_csv_header();
/// One row matching contrast_csv_header(); unknown fields are empty.
std::string to_csv_row(const ContrastReport& report);

enum class VarianceSource { kEmpiricalPairs, kIndependentDims, kIidModel, kZeroOneModel };

std::string_view source_name(VarianceSource source);

struct NormalizedVariance {
  double sigma_prime = 0.0;
  VarianceSource source = VarianceSource::kEmpiricalPairs;
};

/// Contrast measured on data. D_mean^q averages the distance from q to all
/// n database points; D_knn^q is the k-th smallest. Queries must not
/// coincide with database points: a zero D_knn raises DataError.
ContrastReport empirical_contrast(const Dataset& data, const Dataset& queries, double p,
                                  std::size_t k = 1,
                                  EmpiricalEstimator estimator = EmpiricalEstimator::kRatioOfMeans);

/// Default cap on (database point, query) pairs for empirical_sigma_prime.
inline constexpr std::size_t kDefaultPairCap = 10'000'000;

/// sigma' = std(R) / mean(R) with R = D(x, q)^p over all (x, q) pairs, or
/// over pair_cap pairs sampled uniformly with replacement when n * queries
/// exceeds the cap.
NormalizedVariance empirical_sigma_prime(const Dataset& data, const Dataset& queries, double p,
                                         std::size_t pair_cap = kDefaultPairCap,
                                         std::uint64_t seed = 0);

/// Gaussian-model prediction. k = 1 is the nearest-neighbor form; k > 1
/// predicts contrast to the k-th neighbor through the same code path.
ContrastReport predicted_contrast(double sigma_prime, std::size_t n, double p, std::size_t k = 1);

/// Large-d form with the Phi(-1/sigma') term dropped:
///   1 / [1 + Phi^-1(1/n) * sigma']^(1/p).
ContrastReport asymptotic_contrast(double sigma_prime, std::size_t n, double p);

/// Per-coordinate sparsity model: coordinate j is nonzero with probability
/// s_j, and nonzero values follow a distribution with the given moments.
struct CoordinateModel {
  double s = 1.0;
  MomentSet moments;
};

/// sigma' for independent coordinates:
///   mu_j     = s_j^2 m'_p + 2 (1 - s_j) s_j m_p
///   sigma'^2 = sum_j (s_j^2 m'_2p + 2 (1 - s_j) s_j m_2p - mu_j^2) / (sum_j mu_j)^2
NormalizedVariance sigma_prime_independent(std::span<const CoordinateModel> coordinates);

/// sigma' for d i.i.d. coordinates with sparsity s:
///   sigma' = d^-1/2 sqrt( s[(m'_2p - 2m_2p)s + 2m_2p] / (s^2 [(m'_p - 2m_p)s + 2m_p]^2) - 1 )
NormalizedVariance sigma_prime_iid(double s, std::size_t d, const MomentSet& moments);

/// Zero-one (L0) dissimilarity on s-sparse data:
///   sigma' = d^-1/2 sqrt( (1-s)^2 / (1 - (1-s)^2) ).
NormalizedVariance sigma_prime_zero_one(double s, std::size_t d);

/// sigma' from measured per-coordinate means and variances of |x_j - q_j|^p,
/// assuming independent coordinates: sqrt(sum var_j) / sum mean_j.
double sigma_prime_from_coordinate_stats(std::span<const double> means,
                                         std::span<const double> variances);

}  // namespace nndc
