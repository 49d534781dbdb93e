#include "nndc/knn.hpp"

#include <algorithm>
#include <string>

#include "nndc/error.hpp"
#include "nndc/metric.hpp"
#include "nndc/parallel.hpp"

namespace nndc {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

NeighborList knn_one(const Dataset& data, const PointView& q, std::size_t k,
                     const Metric& metric) {
  const std::size_t n = data.size();
  NeighborList all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = {i, metric.powered(data.point(i), q)};
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    closer);
  all.resize(k);
  for (auto& nb : all) nb.distance = metric.root(nb.distance);
  return all;
}

void check_k(const Dataset& data, std::size_t k) {
  if (k < 1 || k > data.size()) {
    throw InvalidArgument("k must be in [1, " + std::to_string(data.size()) + "], got " +
                          std::to_string(k));
  }
}

}  // namespace

NeighborList brute_force_knn(const Dataset& data, const PointView& q, std::size_t k, double p) {
  check_k(data, k);
  const Metric metric(p);
  if (q.dim() != data.dim()) throw InvalidArgument("query dimension does not match dataset");
  return knn_one(data, q, k, metric);
}

std::vector<NeighborList> brute_force_knn(const Dataset& data, const Dataset& queries,
                                          std::size_t k, double p) {
  check_k(data, k);
  const Metric metric(p);
  if (queries.dim() != data.dim()) throw InvalidArgument("query dimension does not match dataset");
  std::vector<NeighborList> out(queries.size());
  parallel_for(0, queries.size(),
               [&](std::size_t qi) { out[qi] = knn_one(data, queries.point(qi), k, metric); });
  return out;
}

}  // namespace nndc
