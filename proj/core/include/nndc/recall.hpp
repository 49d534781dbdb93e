#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nndc {

struct RecallPoint {
  /// Mean candidate-set size across queries.
  double candidates_returned = 0.0;
  /// Fraction of queries whose true 1-NN is among the candidates.
  double recall = 0.0;
};

/// candidates[q] holds the candidate indices for query q (any order);
/// truth[q] is the exact 1-NN index of query q.
RecallPoint recall_eval(std::span<const std::vector<std::size_t>> candidates,
                        std::span<const std::size_t> truth);

/// Recall as a function of candidates returned for one method/configuration.
/// Points must arrive with nondecreasing candidate counts and recall; a point
/// with the same candidate count as the previous one replaces it.
struct RecallCurve {
  std::string method;
  double p = 2.0;
  std::size_t bits = 0;
  std::size_t tables_or_radius = 0;
  std::uint64_t seed = 0;
  std::vector<RecallPoint> points;

  void add(const RecallPoint& point);
};

std::string recall_csv_header();

std::string recall_csv_row(std::string_view method, double p, std::size_t bits,
                           std::size_t tables_or_radius, std::uint64_t seed,
                           const RecallPoint& point);

/// One CSV row per curve point.
std::vector<std::string> to_csv_rows(const RecallCurve& curve);

}  // namespace nndc
