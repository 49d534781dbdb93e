#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nndc/nndc.hpp"

namespace nndc::tools {

/// One grid point of a synthetic contrast sweep.
struct SweepSetting {
  std::size_t n = 10'000;
  std::size_t d = 64;
  double s = 1.0;
  double p = 1.0;
  std::size_t k = 1;
  std::size_t num_queries = 100;
  ValueDistribution distribution = ValueDistribution::kUniform01;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  /// Pairs used for the empirical sigma'; 0 skips it.
  std::size_t sigma_pairs = 0;
  /// Samples for Monte Carlo coordinate moments (non-uniform values).
  std::size_t moment_samples = 1'000'000;
};

struct SweepResult {
  SweepSetting setting;
  /// sigma' of the i.i.d. coordinate model.
  double sigma_prime_model = 0.0;
  ContrastReport predicted;
  std::vector<double> empirical;  ///< Per seed.
  double empirical_mean = 0.0;
  double empirical_std = 0.0;     ///< Sample standard deviation; 0 for one seed.
  std::optional<double> sigma_prime_empirical_mean;
};

/// Per-coordinate moments of the value distribution: closed form for
/// uniform values, Monte Carlo otherwise.
MomentSet coordinate_moments(ValueDistribution distribution, double p, std::size_t samples,
                             std::uint64_t seed);

SweepResult run_sweep_point(const SweepSetting& setting);

/// Exact 1-NN index of every query.
std::vector<std::size_t> nearest_indices(const Dataset& data, const Dataset& queries, double p);

/// Recall of an LSH index when querying with the first l tables, for each l
/// in table_counts (each at most index.table_count()).
std::vector<RecallPoint> lsh_table_recall(const LshIndex& index, const Dataset& queries,
                                          std::span<const std::size_t> truth,
                                          std::span<const std::size_t> table_counts);

/// Recall of hamming ranking at fixed candidate budgets.
std::vector<RecallPoint> hamming_budget_recall(const BinaryCodeIndex& index,
                                               const Dataset& queries,
                                               std::span<const std::size_t> truth,
                                               std::span<const std::size_t> budgets);

/// Recall of hamming-radius lookup for each radius.
std::vector<RecallPoint> hamming_radius_recall(const BinaryCodeIndex& index,
                                               const Dataset& queries,
                                               std::span<const std::size_t> truth,
                                               std::span<const std::size_t> radii);

/// Diagonal noise variances decaying geometrically from max_variance to
/// max_variance / condition across d coordinates.
std::vector<double> geometric_noise(std::size_t d, double max_variance, double condition);

enum class HashMethod { kPca, kMrc, kLsh };

std::string_view method_name(HashMethod method);
HashMethod parse_method(std::string_view name);

struct HashCompareSetting {
  std::size_t n = 10'000;
  std::size_t d = 64;
  std::vector<double> noise_variance;
  std::size_t num_queries = 1000;      ///< Evaluation queries.
  std::size_t num_snn_queries = 1000;  ///< Held-out queries for S_NN.
  std::vector<std::size_t> bits{32};
  std::vector<std::size_t> budgets{500};
  std::vector<HashMethod> methods{HashMethod::kPca, HashMethod::kMrc, HashMethod::kLsh};
  double ridge = kDefaultRidge;
};

struct HashCompareRow {
  HashMethod method = HashMethod::kPca;
  std::size_t bits = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  RecallPoint point;
};

/// Binary-code comparison on data with a known query-noise model. The first
/// num_snn_queries generated queries estimate S_NN; the rest are evaluated.
std::vector<HashCompareRow> run_hash_compare(const HashCompareSetting& setting,
                                             std::uint64_t seed);

/// Same comparison on user data: S_NN from snn_queries, recall on queries.
std::vector<HashCompareRow> run_hash_compare(const Dataset& data, const Dataset& queries,
                                             const Dataset& snn_queries,
                                             const HashCompareSetting& setting,
                                             std::uint64_t seed);

}  // namespace nndc::tools
