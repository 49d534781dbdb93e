#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nndc/dataset.hpp"

namespace nndc {

enum class ValueDistribution { kUniform01, kGaussian };

/// n points in d dimensions; each coordinate is independently nonzero with
/// probability s, nonzero values drawn from `distribution`.
struct SynthSpec {
  std::size_t n = 1;
  std::size_t d = 1;
  double s = 1.0;
  ValueDistribution distribution = ValueDistribution::kUniform01;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Every cell is a pure function of (seed, row, column), so output does not
/// depend on the thread count. Uniform values lie in the open interval (0, 1).
/// Stored sparse when s < 0.5.
Dataset gen_sparse_iid(const SynthSpec& spec);

/// Queries i.i.d. with gen_sparse_iid(spec): same spec, `count` rows, seed + 1.
Dataset gen_queries(const SynthSpec& spec, std::size_t count);

struct AnisoPairs {
  Dataset database;
  Dataset queries;
  /// Database row each query was perturbed from.
  std::vector<std::size_t> source;
  /// Fraction of queries whose exact L2 nearest neighbor is not their source.
  double mismatch_fraction = 0.0;
  /// mismatch_fraction > 0.2: displacements no longer follow the noise model.
  bool noisy = false;
};

/// Database: n standard normal points in d dimensions. Queries: num_queries
/// database points chosen at random, each plus N(0, diag(noise_variance)).
/// When the noise is small relative to point spacing the query-to-NN
/// displacement covariance approximates diag(noise_variance).
AnisoPairs gen_aniso_pairs(std::size_t n, std::size_t d, std::vector<double> noise_variance,
                           std::uint64_t seed, std::size_t num_queries = 1000);

}  // namespace nndc
