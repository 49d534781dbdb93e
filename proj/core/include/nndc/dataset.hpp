#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nndc {

/// Non-owning view of one point, dense or sparse. Sparse views list the
/// nonzero coordinates with strictly increasing indices.
class PointView {
 public:
  static PointView dense(std::span<const double> values) {
    return PointView(values.size(), values, {});
  }
  static PointView sparse(std::size_t dim, std::span<const std::uint32_t> indices,
                          std::span<const double> values) {
    return PointView(dim, values, indices, true);
  }

  std::size_t dim() const { return dim_; }
  bool is_sparse() const { return sparse_; }

  /// Dense: all d coordinates. Sparse: the nonzero values.
  std::span<const double> values() const { return values_; }
  /// Sparse only: indices of the nonzero values.
  std::span<const std::uint32_t> indices() const { return indices_; }

  std::vector<double> to_dense() const;

 private:
  PointView(std::size_t dim, std::span<const double> values,
            std::span<const std::uint32_t> indices, bool sparse = false)
      : dim_(dim), values_(values), indices_(indices), sparse_(sparse) {}

  std::size_t dim_;
  std::span<const double> values_;
  std::span<const std::uint32_t> indices_;
  bool sparse_;
};

/// Immutable collection of n points in d dimensions. Copies share storage.
class Dataset {
 public:
  /// Row-major n*d values.
  static Dataset from_dense(std::size_t n, std::size_t d, std::vector<double> values,
                            std::string id = {});
  /// CSR layout: row i owns [row_offsets[i], row_offsets[i+1]) of indices/values.
  static Dataset from_sparse(std::size_t n, std::size_t d, std::vector<std::size_t> row_offsets,
                             std::vector<std::uint32_t> indices, std::vector<double> values,
                             std::string id = {});
  static Dataset from_rows(const std::vector<std::vector<double>>& rows, std::string id = {});

  std::size_t size() const { return store_->n; }
  std::size_t dim() const { return store_->d; }
  bool is_sparse() const { return store_->sparse; }
  const std::string& id() const { return store_->id; }

  PointView point(std::size_t i) const;

  /// Dense storage only.
  std::span<const double> dense_row(std::size_t i) const;
  std::span<const double> dense_values() const { return store_->values; }

  /// Sparse storage only.
  std::span<const std::size_t> row_offsets() const { return store_->offsets; }
  std::span<const std::uint32_t> sparse_indices() const { return store_->indices; }
  std::span<const double> sparse_values() const { return store_->values; }

  Dataset to_dense() const;
  Dataset to_sparse() const;

  /// New dataset made of the given rows, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Fraction of stored coordinates that are nonzero.
  double nonzero_fraction() const;

  Dataset with_id(std::string id) const;

 private:
  struct Storage {
    std::size_t n = 0;
    std::size_t d = 0;
    bool sparse = false;
    std::string id;
    std::vector<double> values;
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> indices;
  };

  explicit Dataset(std::shared_ptr<const Storage> store) : store_(std::move(store)) {}

  std::shared_ptr<const Storage> store_;
};

}  // namespace nndc
