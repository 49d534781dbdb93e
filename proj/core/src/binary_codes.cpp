#include "nndc/binary_codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "nndc/error.hpp"
#include "nndc/knn.hpp"
#include "nndc/parallel.hpp"
#include "nndc/random.hpp"
#include "projection.hpp"

namespace nndc {

namespace {

void check_bits(const Dataset& data, std::size_t bits) {
  if (bits < 1 || bits > data.dim()) {
    throw InvalidArgument("code length must be in [1, d=" + std::to_string(data.dim()) +
                          "], got " + std::to_string(bits));
  }
}

std::vector<std::size_t> distances_to(const BinaryCodeIndex& index, const PointView& q) {
  const std::vector<std::uint64_t> qc = index.encode(q);
  std::vector<std::size_t> dist(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) dist[i] = hamming_distance(index.code(i), qc);
  return dist;
}

// Stable counting sort by distance: ascending distance, then index.
std::vector<std::size_t> order_by_distance(const std::vector<std::size_t>& dist,
                                           std::size_t max_dist, std::size_t limit) {
  std::vector<std::size_t> count(max_dist + 2, 0);
  for (std::size_t v : dist) {
    if (v <= max_dist) ++count[v + 1];
  }
  for (std::size_t b = 1; b < count.size(); ++b) count[b] += count[b - 1];
  std::vector<std::size_t> out(count.back());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= max_dist) out[count[dist[i]]++] = i;
  }
  if (out.size() > limit) out.resize(limit);
  return out;
}

BinaryCodeIndex encode_with_mean(const Dataset& data, Eigen::MatrixXd w, CodeTrainer trainer) {
  const Eigen::VectorXd mean = column_mean(data);
  Eigen::VectorXd b = -(w.transpose() * mean);
  return BinaryCodeIndex::encode_dataset(data, std::move(w), std::move(b), trainer);
}

}  // namespace

std::string_view trainer_name(CodeTrainer trainer) {
  switch (trainer) {
    case CodeTrainer::kPca: return "pca";
    case CodeTrainer::kMrc: return "mrc";
    case CodeTrainer::kRandom: return "random";
  }
  return "unknown";
}

std::size_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  return d;
}

BinaryCodeIndex BinaryCodeIndex::encode_dataset(const Dataset& data, Eigen::MatrixXd projections,
                                                Eigen::VectorXd thresholds, CodeTrainer trainer) {
  if (static_cast<std::size_t>(projections.rows()) != data.dim()) {
    throw InvalidArgument("projection rows must equal the data dimension");
  }
  if (projections.cols() < 1 || thresholds.size() != projections.cols()) {
    throw InvalidArgument("need one threshold per projection");
  }
  BinaryCodeIndex index;
  index.projections_ = std::move(projections);
  index.thresholds_ = std::move(thresholds);
  index.trainer_ = trainer;
  index.n_ = data.size();
  index.words_ = (index.bits() + 63) / 64;
  index.codes_.assign(index.n_ * index.words_, 0);
  parallel_for(0, data.size(), [&](std::size_t i) {
    const std::vector<std::uint64_t> c = index.encode(data.point(i));
    std::copy(c.begin(), c.end(), index.codes_.begin() + static_cast<std::ptrdiff_t>(i * index.words_));
  });
  return index;
}

std::vector<std::uint64_t> BinaryCodeIndex::encode(const PointView& x) const {
  if (x.dim() != dim()) throw InvalidArgument("point dimension does not match code projections");
  const Eigen::VectorXd z = detail::project(projections_, x) + thresholds_;
  std::vector<std::uint64_t> out(words_, 0);
  for (std::size_t j = 0; j < bits(); ++j) {
    if (z[static_cast<Eigen::Index>(j)] >= 0.0) out[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  return out;
}

BinaryCodeIndex train_pca_hash(const Dataset& data, std::size_t bits, std::size_t max_rows,
                               std::uint64_t seed) {
  check_bits(data, bits);
  const SymMatrix cov = covariance(data, true, max_rows, seed);
  EigenPairs top = sym_eig_topk(cov, bits);

  const double scale = std::max(top.values[0], 0.0);
  std::size_t rank = 0;
  while (rank < bits && top.values[static_cast<Eigen::Index>(rank)] > 1e-12 * scale &&
         scale > 0.0) {
    ++rank;
  }
  std::string warning;
  if (rank < bits) {
    // Replace null-space directions by random vectors orthonormal to the
    // directions that carry variance.
    Eigen::MatrixXd& w = top.vectors;
    RandomStream rng(seed, 0x706164ULL);
    for (std::size_t c = rank; c < bits; ++c) {
      Eigen::VectorXd v(w.rows());
      for (Eigen::Index r = 0; r < v.size(); ++r) v[r] = rng.normal();
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t prev = 0; prev < c; ++prev) {
          const auto pc = static_cast<Eigen::Index>(prev);
          v -= w.col(pc).dot(v) * w.col(pc);
        }
      }
      w.col(static_cast<Eigen::Index>(c)) = v.normalized();
    }
    warning = "covariance rank " + std::to_string(rank) + " < " + std::to_string(bits) +
              " bits; padded with random orthonormal directions";
  }
  BinaryCodeIndex index = encode_with_mean(data, std::move(top.vectors), CodeTrainer::kPca);
  if (!warning.empty()) index.add_warning(std::move(warning));
  return index;
}

BinaryCodeIndex train_mrc_hash(const Dataset& data, const SymMatrix& s_nn, std::size_t bits,
                               double ridge, std::size_t max_rows, std::uint64_t seed) {
  check_bits(data, bits);
  if (s_nn.dim() != data.dim()) throw InvalidArgument("S_NN dimension does not match data");
  const SymMatrix cov = covariance(data, true, max_rows, seed);
  EigenPairs top = gen_eig_topk(cov, s_nn, bits, ridge);
  return encode_with_mean(data, std::move(top.vectors), CodeTrainer::kMrc);
}

BinaryCodeIndex train_random_hash(const Dataset& data, std::size_t bits, std::uint64_t seed) {
  if (bits < 1) throw InvalidArgument("code length must be >= 1");
  Eigen::MatrixXd w(static_cast<Eigen::Index>(data.dim()), static_cast<Eigen::Index>(bits));
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    RandomStream rng(seed, 0x72616e64ULL, static_cast<std::uint64_t>(c));
    for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.normal();
  }
  return encode_with_mean(data, std::move(w), CodeTrainer::kRandom);
}

std::vector<std::size_t> hamming_rank(const BinaryCodeIndex& index, const PointView& q,
                                      std::size_t m) {
  if (m > index.size()) throw InvalidArgument("m must not exceed the database size");
  return order_by_distance(distances_to(index, q), index.bits(), m);
}

std::vector<std::size_t> hamming_radius(const BinaryCodeIndex& index, const PointView& q,
                                        std::size_t r) {
  return order_by_distance(distances_to(index, q), std::min(r, index.bits()), index.size());
}

SnnEstimate estimate_snn(const Dataset& data, const Dataset& queries, double p) {
  const auto nn = brute_force_knn(data, queries, 1, p);
  const auto d = static_cast<Eigen::Index>(data.dim());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  SnnEstimate out;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    if (nn[qi][0].distance == 0.0) {
      ++out.excluded;
      continue;
    }
    const std::vector<double> q = queries.point(qi).to_dense();
    const std::vector<double> x = data.point(nn[qi][0].index).to_dense();
    Eigen::VectorXd diff(d);
    for (Eigen::Index j = 0; j < d; ++j) diff[j] = q[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)];
    acc.selfadjointView<Eigen::Lower>().rankUpdate(diff);
    ++out.used;
  }
  if (out.used == 0) {
    throw DataError("estimate_snn: every query coincides with a database point");
  }
  Eigen::MatrixXd full = acc.selfadjointView<Eigen::Lower>();
  out.s_nn = SymMatrix(full / static_cast<double>(out.used));
  return out;
}

}  // namespace nndc
