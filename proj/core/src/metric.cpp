#include "nndc/metric.hpp"

#include <string>

#include "nndc/error.hpp"

namespace nndc {

namespace {

template <typename Term>
double dense_dense(std::span<const double> x, std::span<const double> y, Term term) {
  double acc = 0.0;
  const std::size_t d = x.size();
  for (std::size_t j = 0; j < d; ++j) acc += term(x[j] - y[j]);
  return acc;
}

template <typename Term>
double sparse_sparse(const PointView& x, const PointView& y, Term term) {
  auto xi = x.indices();
  auto xv = x.values();
  auto yi = y.indices();
  auto yv = y.values();
  std::size_t a = 0, b = 0;
  double acc = 0.0;
  while (a < xi.size() || b < yi.size()) {
    if (b == yi.size() || (a < xi.size() && xi[a] < yi[b])) {
      acc += term(xv[a++]);
    } else if (a == xi.size() || yi[b] < xi[a]) {
      acc += term(yv[b++]);
    } else {
      acc += term(xv[a++] - yv[b++]);
    }
  }
  return acc;
}

// Walks the dense coordinates in order so the summation order matches the
// dense-dense path.
template <typename Term>
double sparse_dense(const PointView& sparse, std::span<const double> dense, Term term) {
  auto si = sparse.indices();
  auto sv = sparse.values();
  std::size_t t = 0;
  double acc = 0.0;
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (t < si.size() && si[t] == j) {
      acc += term(sv[t++] - dense[j]);
    } else {
      acc += term(dense[j]);
    }
  }
  return acc;
}

template <typename Term>
double dispatch(const PointView& x, const PointView& y, Term term) {
  if (!x.is_sparse() && !y.is_sparse()) return dense_dense(x.values(), y.values(), term);
  if (x.is_sparse() && y.is_sparse()) return sparse_sparse(x, y, term);
  if (x.is_sparse()) return sparse_dense(x, y.values(), term);
  return sparse_dense(y, x.values(), term);
}

}  // namespace

Metric::Metric(double p) : p_(p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw InvalidArgument("metric parameter p must be positive and finite, got " +
                          std::to_string(p));
  }
  kind_ = p == 1.0 ? Kind::kL1 : p == 2.0 ? Kind::kL2 : Kind::kGeneral;
}

double Metric::powered(const PointView& x, const PointView& y) const {
  if (x.dim() != y.dim()) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                          std::to_string(y.dim()));
  }
  switch (kind_) {
    case Kind::kL1:
      return dispatch(x, y, [](double v) { return std::fabs(v); });
    case Kind::kL2:
      return dispatch(x, y, [](double v) { return v * v; });
    default: {
      const double p = p_;
      return dispatch(x, y, [p](double v) { return std::pow(std::fabs(v), p); });
    }
  }
}

double Metric::root(double powered_distance) const {
  switch (kind_) {
    case Kind::kL1: return powered_distance;
    case Kind::kL2: return std::sqrt(powered_distance);
    default: return std::pow(powered_distance, 1.0 / p_);
  }
}

double Metric::distance(const PointView& x, const PointView& y) const {
  return root(powered(x, y));
}

double lp_distance(const PointView& x, const PointView& y, double p) {
  return Metric(p).distance(x, y);
}

}  // namespace nndc
