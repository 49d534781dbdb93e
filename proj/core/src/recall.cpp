#include "nndc/recall.hpp"

#include <algorithm>

#include "nndc/error.hpp"
#include "nndc/format.hpp"

namespace nndc {

RecallPoint recall_eval(std::span<const std::vector<std::size_t>> candidates,
                        std::span<const std::size_t> truth) {
  if (candidates.empty()) throw InvalidArgument("recall_eval: empty query set");
  if (candidates.size() != truth.size()) {
    throw InvalidArgument("recall_eval: candidate sets and ground truth differ in length");
  }
  std::size_t hits = 0;
  std::size_t total = 0;
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    total += candidates[q].size();
    if (std::find(candidates[q].begin(), candidates[q].end(), truth[q]) != candidates[q].end()) {
      ++hits;
    }
  }
  const auto nq = static_cast<double>(candidates.size());
  return {static_cast<double>(total) / nq, static_cast<double>(hits) / nq};
}

void RecallCurve::add(const RecallPoint& point) {
  if (!points.empty()) {
    const RecallPoint& last = points.back();
    if (point.candidates_returned < last.candidates_returned || point.recall < last.recall) {
      throw InvalidArgument("RecallCurve: points must be nondecreasing in candidates and recall");
    }
    if (point.candidates_returned == last.candidates_returned) {
      points.back() = point;
      return;
    }
  }
  points.push_back(point);
}

std::string recall_csv_header() { return "method,p,bits,tables_or_radius,seed,candidates_returned,recall"; }

std::string recall_csv_row(std::string_view method, double p, std::size_t bits,
                           std::size_t tables_or_radius, std::uint64_t seed,
                           const RecallPoint& point) {
  std::string row(method);
  row += "," + format_double(p) + "," + std::to_string(bits) + "," +
         std::to_string(tables_or_radius) + "," + std::to_string(seed) + "," +
         format_double(point.candidates_returned) + "," + format_double(point.recall);
  return row;
}

std::vector<std::string> to_csv_rows(const RecallCurve& curve) {
  std::vector<std::string> rows;
  rows.reserve(curve.points.size());
  for (const RecallPoint& pt : curve.points) {
    rows.push_back(recall_csv_row(curve.method, curve.p, curve.bits, curve.tables_or_radius,
                                  curve.seed, pt));
  }
  return rows;
}

}  // namespace nndc
