#include "nndc/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nndc/contrast.hpp"
#include "nndc/error.hpp"
#include "nndc/parallel.hpp"
#include "nndc/random.hpp"
#include "projection.hpp"

namespace nndc {

namespace {

constexpr double kNullEigenvalue = 1e-12;
constexpr std::size_t kPairBlock = 4096;
constexpr std::uint64_t kPairSalt = 0x73776565702d7071ULL;

double powered_abs(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

Eigen::MatrixXd project_rows(const Dataset& data, const Eigen::MatrixXd& w) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(data.size()), w.cols());
  parallel_for(0, data.size(), [&](std::size_t i) {
    out.row(static_cast<Eigen::Index>(i)) = detail::project(w, data.point(i)).transpose();
  });
  return out;
}

// Per-dimension mean and variance of |y_j - q_j|^p for each p, over a set
// of (database, query) pairs. Layout: [p][j].
struct CoordinateMoments {
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> var;
};

CoordinateMoments pair_moments(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yq,
                               const std::vector<double>& p_list, std::size_t pair_cap,
                               std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(y.rows());
  const auto nq = static_cast<std::size_t>(yq.rows());
  const auto d = static_cast<std::size_t>(y.cols());
  const std::size_t np = p_list.size();
  const bool exhaustive = n * nq <= pair_cap;
  const std::size_t pairs = exhaustive ? n * nq : pair_cap;
  const std::size_t blocks = (pairs + kPairBlock - 1) / kPairBlock;

  // Each block writes its own slot: [block][p][j] sums and sums of squares.
  const std::size_t slot = np * d;
  std::vector<double> sums(blocks * slot, 0.0), squares(blocks * slot, 0.0);
  parallel_for(0, blocks, [&](std::size_t b) {
    RandomStream rng(seed, kPairSalt, b);
    double* s = sums.data() + b * slot;
    double* s2 = squares.data() + b * slot;
    const std::size_t end = std::min(pairs, (b + 1) * kPairBlock);
    for (std::size_t t = b * kPairBlock; t < end; ++t) {
      std::size_t i = 0, q = 0;
      if (exhaustive) {
        i = t / nq;
        q = t % nq;
      } else {
        i = rng.below(n);
        q = rng.below(nq);
      }
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                            yq(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j));
        for (std::size_t pi = 0; pi < np; ++pi) {
          const double r = powered_abs(diff, p_list[pi]);
          s[pi * d + j] += r;
          s2[pi * d + j] += r * r;
        }
      }
    }
  });

  CoordinateMoments out;
  out.mean.assign(np, std::vector<double>(d));
  out.var.assign(np, std::vector<double>(d));
  const auto m = static_cast<double>(pairs);
  for (std::size_t k = 0; k < slot; ++k) {
    CompensatedSum s, s2;
    for (std::size_t b = 0; b < blocks; ++b) {
      s.add(sums[b * slot + k]);
      s2.add(squares[b * slot + k]);
    }
    const double mean = s.value() / m;
    out.mean[k / d][k % d] = mean;
    out.var[k / d][k % d] = std::max(0.0, s2.value() / m - mean * mean);
  }
  return out;
}

}  // namespace

std::size_t effective_dimension(const Dataset& data, double variance_fraction,
                                std::size_t max_rows, std::uint64_t seed) {
  if (!(variance_fraction > 0.0 && variance_fraction <= 1.0)) {
    throw InvalidArgument("variance fraction must be in (0, 1]");
  }
  if (data.size() < 2) throw InvalidArgument("effective dimension needs n >= 2");
  const EigenPairs eig = sym_eig_topk(covariance(data, true, max_rows, seed), data.dim());
  const double top = eig.values[0];
  if (!(top > 0.0)) throw DataError("effective dimension: data has zero total variance");
  std::vector<double> lambda(static_cast<std::size_t>(eig.values.size()));
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double v = eig.values[static_cast<Eigen::Index>(i)];
    lambda[i] = v > kNullEigenvalue * top ? v : 0.0;
  }
  CompensatedSum total;
  for (double v : lambda) total.add(v);
  const double target = variance_fraction * total.value();
  CompensatedSum cum;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    if (lambda[k] == 0.0) return k;
    cum.add(lambda[k]);
    if (cum.value() >= target * (1.0 - 1e-12)) return k + 1;
  }
  return lambda.size();
}

std::vector<std::size_t> sweep_grid(std::size_t d_max) {
  if (d_max < 1) throw InvalidArgument("sweep grid needs d_max >= 1");
  std::vector<std::size_t> grid;
  const std::size_t dense = std::min<std::size_t>(64, d_max);
  for (std::size_t d = 1; d <= dense; ++d) grid.push_back(d);
  double next = static_cast<double>(dense);
  while (grid.back() < d_max) {
    next *= 1.25;
    const auto d = std::min(d_max, static_cast<std::size_t>(std::llround(next)));
    if (d > grid.back()) grid.push_back(d);
  }
  return grid;
}

DimReport intrinsic_dimension_by_contrast(const Dataset& data, const Dataset& queries,
                                          const std::vector<double>& p_list, std::size_t d_max,
                                          const IntrinsicOptions& options) {
  if (p_list.empty()) throw InvalidArgument("p_list must not be empty");
  if (d_max < 1 || d_max > data.dim()) {
    throw InvalidArgument("d_max must be in [1, d=" + std::to_string(data.dim()) + "]");
  }
  if (queries.dim() != data.dim()) throw InvalidArgument("query dimension does not match data");
  if (queries.size() < 1) throw InvalidArgument("need at least one query");
  if (data.size() < 2) throw InvalidArgument("intrinsic dimension needs n >= 2");

  DimReport report;
  report.p_list = p_list;
  for (double p : p_list) {
    report.empirical.push_back(*empirical_contrast(data, queries, p).c_r);
  }

  const EigenPairs eig =
      sym_eig_topk(covariance(data, true, options.max_rows, options.seed), data.dim());
  const double top = eig.values[0];
  if (!(top > 0.0)) throw DataError("intrinsic dimension: data has zero total variance");
  report.d_e = effective_dimension(data, options.variance_fraction, options.max_rows, options.seed);

  const Eigen::MatrixXd w = eig.vectors.leftCols(static_cast<Eigen::Index>(d_max));
  const CoordinateMoments mom = pair_moments(project_rows(data, w), project_rows(queries, w),
                                             p_list, options.pair_cap, options.seed);

  const std::vector<std::size_t> grid = sweep_grid(d_max);
  const std::size_t np = p_list.size();
  // Prefix sums over dimensions make each grid point O(1).
  std::vector<std::vector<double>> mean_prefix(np, std::vector<double>(d_max + 1, 0.0));
  std::vector<std::vector<double>> var_prefix(np, std::vector<double>(d_max + 1, 0.0));
  for (std::size_t pi = 0; pi < np; ++pi) {
    CompensatedSum sm, sv;
    for (std::size_t j = 0; j < d_max; ++j) {
      sm.add(mom.mean[pi][j]);
      sv.add(mom.var[pi][j]);
      mean_prefix[pi][j + 1] = sm.value();
      var_prefix[pi][j + 1] = sv.value();
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t dp : grid) {
    if (!(eig.values[static_cast<Eigen::Index>(dp - 1)] > kNullEigenvalue * top)) {
      report.skipped.push_back(dp);
      continue;
    }
    double disc = 0.0;
    for (std::size_t pi = 0; pi < np; ++pi) {
      DimDetail row;
      row.d_prime = dp;
      row.p = p_list[pi];
      row.empirical = report.empirical[pi];
      const double sigma = std::sqrt(var_prefix[pi][dp]) / mean_prefix[pi][dp];
      const ContrastReport pred = predicted_contrast(sigma, data.size(), p_list[pi]);
      row.predicted = pred.c_r;
      row.abs_discrepancy = pred.c_r ? std::abs(*pred.c_r - row.empirical)
                                     : std::numeric_limits<double>::infinity();
      disc += row.abs_discrepancy;
      report.details.push_back(row);
    }
    const double value = disc / static_cast<double>(np);
    report.discrepancy_curve.push_back({dp, value});
    if (report.d_star == 0 || value < best) {
      best = value;
      report.d_star = dp;
    }
  }
  if (report.d_star == 0) {
    throw DataError("intrinsic dimension: every sweep point has a zero-variance direction");
  }
  return report;
}

}  // namespace nndc
