#include "nndc/dataset.hpp"

#include <cmath>
#include <string>

#include "nndc/error.hpp"

namespace nndc {

std::vector<double> PointView::to_dense() const {
  if (!sparse_) return {values_.begin(), values_.end()};
  std::vector<double> out(dim_, 0.0);
  for (std::size_t t = 0; t < indices_.size(); ++t) out[indices_[t]] = values_[t];
  return out;
}

Dataset Dataset::from_dense(std::size_t n, std::size_t d, std::vector<double> values,
                            std::string id) {
  if (n == 0 || d == 0) throw InvalidArgument("dataset needs n >= 1 and d >= 1");
  if (values.size() != n * d) {
    throw InvalidArgument("dense dataset: expected " + std::to_string(n * d) +
                          " values, got " + std::to_string(values.size()));
  }
  auto s = std::make_shared<Storage>();
  s->n = n;
  s->d = d;
  s->id = std::move(id);
  s->values = std::move(values);
  return Dataset(std::move(s));
}

Dataset Dataset::from_sparse(std::size_t n, std::size_t d, std::vector<std::size_t> row_offsets,
                             std::vector<std::uint32_t> indices, std::vector<double> values,
                             std::string id) {
  if (n == 0 || d == 0) throw InvalidArgument("dataset needs n >= 1 and d >= 1");
  if (row_offsets.size() != n + 1 || row_offsets.front() != 0 ||
      row_offsets.back() != indices.size() || indices.size() != values.size()) {
    throw InvalidArgument("sparse dataset: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_offsets[i] > row_offsets[i + 1]) {
      throw InvalidArgument("sparse dataset: row offsets decrease at row " + std::to_string(i));
    }
    for (std::size_t t = row_offsets[i]; t < row_offsets[i + 1]; ++t) {
      if (indices[t] >= d) {
        throw InvalidArgument("sparse dataset: index " + std::to_string(indices[t]) +
                              " out of range in row " + std::to_string(i));
      }
      if (t > row_offsets[i] && indices[t] <= indices[t - 1]) {
        throw InvalidArgument("sparse dataset: indices not strictly increasing in row " +
                              std::to_string(i));
      }
    }
  }
  auto s = std::make_shared<Storage>();
  s->n = n;
  s->d = d;
  s->sparse = true;
  s->id = std::move(id);
  s->values = std::move(values);
  s->offsets = std::move(row_offsets);
  s->indices = std::move(indices);
  return Dataset(std::move(s));
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows, std::string id) {
  if (rows.empty() || rows.front().empty()) {
    throw InvalidArgument("dataset needs n >= 1 and d >= 1");
  }
  const std::size_t d = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw InvalidArgument("dataset rows have different lengths");
    values.insert(values.end(), r.begin(), r.end());
  }
  return from_dense(rows.size(), d, std::move(values), std::move(id));
}

PointView Dataset::point(std::size_t i) const {
  const Storage& s = *store_;
  if (i >= s.n) throw InvalidArgument("point index out of range");
  if (!s.sparse) return PointView::dense(std::span<const double>(s.values).subspan(i * s.d, s.d));
  const std::size_t lo = s.offsets[i];
  const std::size_t len = s.offsets[i + 1] - lo;
  return PointView::sparse(s.d, std::span<const std::uint32_t>(s.indices).subspan(lo, len),
                           std::span<const double>(s.values).subspan(lo, len));
}

std::span<const double> Dataset::dense_row(std::size_t i) const {
  if (store_->sparse) throw InvalidArgument("dense_row on sparse dataset");
  if (i >= store_->n) throw InvalidArgument("point index out of range");
  return std::span<const double>(store_->values).subspan(i * store_->d, store_->d);
}

Dataset Dataset::to_dense() const {
  if (!is_sparse()) return *this;
  const Storage& s = *store_;
  std::vector<double> values(s.n * s.d, 0.0);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t t = s.offsets[i]; t < s.offsets[i + 1]; ++t) {
      values[i * s.d + s.indices[t]] = s.values[t];
    }
  }
  return from_dense(s.n, s.d, std::move(values), s.id);
}

Dataset Dataset::to_sparse() const {
  if (is_sparse()) return *this;
  const Storage& s = *store_;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t j = 0; j < s.d; ++j) {
      const double v = s.values[i * s.d + j];
      if (v != 0.0) {
        indices.push_back(static_cast<std::uint32_t>(j));
        values.push_back(v);
      }
    }
    offsets.push_back(indices.size());
  }
  return from_sparse(s.n, s.d, std::move(offsets), std::move(indices), std::move(values), s.id);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  if (rows.empty()) throw InvalidArgument("subset needs at least one row");
  const Storage& s = *store_;
  for (std::size_t r : rows) {
    if (r >= s.n) throw InvalidArgument("subset row out of range");
  }
  if (!s.sparse) {
    std::vector<double> values;
    values.reserve(rows.size() * s.d);
    for (std::size_t r : rows) {
      auto row = dense_row(r);
      values.insert(values.end(), row.begin(), row.end());
    }
    return from_dense(rows.size(), s.d, std::move(values), s.id);
  }
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  for (std::size_t r : rows) {
    for (std::size_t t = s.offsets[r]; t < s.offsets[r + 1]; ++t) {
      indices.push_back(s.indices[t]);
      values.push_back(s.values[t]);
    }
    offsets.push_back(indices.size());
  }
  return from_sparse(rows.size(), s.d, std::move(offsets), std::move(indices), std::move(values),
                     s.id);
}

double Dataset::nonzero_fraction() const {
  const Storage& s = *store_;
  std::size_t nnz = 0;
  for (double v : s.values) nnz += (v != 0.0);
  return static_cast<double>(nnz) / (static_cast<double>(s.n) * static_cast<double>(s.d));
}

Dataset Dataset::with_id(std::string id) const {
  auto s = std::make_shared<Storage>(*store_);
  s->id = std::move(id);
  return Dataset(std::move(s));
}

}  // namespace nndc
