#pragma once

#include <cstddef>
#include <vector>

#include "nndc/dataset.hpp"

namespace nndc {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ascending by distance, ties by ascending index.
using NeighborList = std::vector<Neighbor>;

/// Exact k nearest neighbors of q under L_p. Does not skip database points
/// equal to q; callers that need a query distinct from the database must
/// remove it themselves.
NeighborList brute_force_knn(const Dataset& data, const PointView& q, std::size_t k, double p);

/// One NeighborList per query row, computed in parallel over queries.
std::vector<NeighborList> brute_force_knn(const Dataset& data, const Dataset& queries,
                                          std::size_t k, double p);

}  // namespace nndc
