#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "nndc/dataset.hpp"

namespace nndc {

/// d x k matrix whose columns are p-stable projection vectors: standard
/// normal entries for p = 2, standard Cauchy for p = 1.
Eigen::MatrixXd sample_pstable_projections(std::size_t d, std::size_t k, int p,
                                           std::uint64_t seed);

/// floor((w . x + b) / t).
std::int64_t lsh_hash(const PointView& x, const Eigen::VectorXd& w, double b, double t);

struct LshParams {
  std::size_t bits = 16;    ///< Hash functions per table (k).
  std::size_t tables = 1;   ///< Number of tables (l).
  int p = 2;                ///< 1 (Cauchy) or 2 (Gaussian).
  /// Bucket width t. When unset, each table uses the mean over its k
  /// projections of std(w . x) on a seeded sample of at most 10^4 points.
  std::optional<double> width;
  /// Multiplier applied to the automatic width (ignored when width is set).
  double width_scale = 1.0;
  std::uint64_t seed = 1;
};

/// Multi-table p-stable LSH index. Table t is generated from (seed, t) only,
/// so an index with l tables has the same first l' tables as one built with
/// l' < l. Built indexes are immutable and safe to query concurrently.
class LshIndex {
 public:
  struct Table {
    Eigen::MatrixXd projections;  ///< d x k.
    Eigen::VectorXd offsets;      ///< k values in [0, width).
    double width = 1.0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  };

  static LshIndex build(const Dataset& data, const LshParams& params);

  /// Union of q's buckets over the first `tables_used` tables (all when 0),
  /// deduplicated, ascending.
  std::vector<std::size_t> query(const PointView& q, std::size_t tables_used = 0) const;

  /// Integer hash values of x in one table.
  std::vector<std::int64_t> hash_values(std::size_t table, const PointView& x) const;

  /// Bucket key of x in one table.
  std::uint64_t key(std::size_t table, const PointView& x) const;

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  std::size_t bits() const { return params_.bits; }
  std::size_t table_count() const { return tables_.size(); }
  const LshParams& params() const { return params_; }
  const Table& table(std::size_t t) const { return tables_.at(t); }

 private:
  LshParams params_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<Table> tables_;
};

/// Combines k integer hash values into one 64-bit bucket key. Mixer
/// collisions only merge buckets.
std::uint64_t combine_hash_values(const std::vector<std::int64_t>& values);

inline std::vector<std::size_t> lsh_query(const LshIndex& index, const PointView& q) {
  return index.query(q);
}

}  // namespace nndc
