#include "nndc/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nndc/error.hpp"
#include "nndc/parallel.hpp"
#include "nndc/random.hpp"
#include "projection.hpp"

namespace nndc {

namespace {

constexpr std::size_t kWidthSampleRows = 10'000;
constexpr std::uint64_t kOffsetSalt = 0x6f6666736574ULL;

std::uint64_t table_seed(std::uint64_t seed, std::size_t table) {
  return mix64(seed ^ mix64(0x7461626c65ULL + table));
}

std::vector<std::size_t> width_sample(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (n <= kWidthSampleRows) return rows;
  RandomStream rng(seed, 0x7769647468ULL);
  for (std::size_t i = 0; i < kWidthSampleRows; ++i) {
    std::swap(rows[i], rows[i + rng.below(n - i)]);
  }
  rows.resize(kWidthSampleRows);
  return rows;
}

std::int64_t floor_div(double value, double offset, double width) {
  return static_cast<std::int64_t>(std::floor((value + offset) / width));
}

}  // namespace

Eigen::MatrixXd sample_pstable_projections(std::size_t d, std::size_t k, int p,
                                           std::uint64_t seed) {
  if (p != 1 && p != 2) {
    throw InvalidArgument("p-stable projections support p = 1 or p = 2, got " + std::to_string(p));
  }
  if (d < 1 || k < 1) throw InvalidArgument("projections need d >= 1 and k >= 1");
  Eigen::MatrixXd w(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) {
    RandomStream rng(seed, 0x70737461626c65ULL, c);
    for (std::size_t j = 0; j < d; ++j) {
      w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) =
          p == 2 ? rng.normal() : rng.cauchy();
    }
  }
  return w;
}

std::int64_t lsh_hash(const PointView& x, const Eigen::VectorXd& w, double b, double t) {
  if (!(t > 0.0)) throw InvalidArgument("bucket width must be positive");
  if (static_cast<std::size_t>(w.size()) != x.dim()) {
    throw InvalidArgument("projection length does not match point dimension");
  }
  const Eigen::MatrixXd col = w;
  return floor_div(detail::project(col, x)[0], b, t);
}

std::uint64_t combine_hash_values(const std::vector<std::int64_t>& values) {
  std::uint64_t h = 0x6c73682d6b6579ULL ^ values.size();
  for (std::int64_t v : values) h = mix64(h ^ mix64(static_cast<std::uint64_t>(v)));
  return h;
}

LshIndex LshIndex::build(const Dataset& data, const LshParams& params) {
  if (params.bits < 1) throw InvalidArgument("LSH needs at least one hash function per table");
  if (params.tables < 1) throw InvalidArgument("LSH needs at least one table");
  if (params.p != 1 && params.p != 2) throw InvalidArgument("LSH supports p = 1 or p = 2");
  if (params.width && !(*params.width > 0.0)) throw InvalidArgument("bucket width must be positive");
  if (!(params.width_scale > 0.0) || !std::isfinite(params.width_scale)) {
    throw InvalidArgument("width scale must be positive");
  }
  if (data.size() > 0xFFFFFFFFull) throw InvalidArgument("LSH index limited to 2^32 points");

  LshIndex index;
  index.params_ = params;
  index.n_ = data.size();
  index.d_ = data.dim();
  index.tables_.resize(params.tables);

  const std::vector<std::size_t> sample = width_sample(data.size(), params.seed);
  for (std::size_t t = 0; t < params.tables; ++t) {
    Table& table = index.tables_[t];
    const std::uint64_t ts = table_seed(params.seed, t);
    table.projections = sample_pstable_projections(data.dim(), params.bits, params.p, ts);

    if (params.width) {
      table.width = *params.width;
    } else {
      const auto k = static_cast<Eigen::Index>(params.bits);
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(k), sum_sq = Eigen::VectorXd::Zero(k);
      for (std::size_t r : sample) {
        const Eigen::VectorXd z = detail::project(table.projections, data.point(r));
        sum += z;
        sum_sq += z.cwiseProduct(z);
      }
      const double m = static_cast<double>(sample.size());
      const Eigen::VectorXd mean = sum / m;
      const Eigen::VectorXd var = (sum_sq / m - mean.cwiseProduct(mean)).cwiseMax(0.0);
      table.width = params.width_scale * var.cwiseSqrt().mean();
      if (!(table.width > 0.0) || !std::isfinite(table.width)) {
        throw NumericError("automatic bucket width is zero or non-finite; pass an explicit width");
      }
    }

    table.offsets.resize(static_cast<Eigen::Index>(params.bits));
    for (std::size_t c = 0; c < params.bits; ++c) {
      RandomStream rng(ts, kOffsetSalt, c);
      table.offsets[static_cast<Eigen::Index>(c)] = rng.uniform() * table.width;
    }
  }

  // Keys are computed in parallel; buckets filled in row order afterwards.
  std::vector<std::uint64_t> keys(data.size() * params.tables);
  parallel_for(0, data.size(), [&](std::size_t i) {
    const PointView x = data.point(i);
    for (std::size_t t = 0; t < params.tables; ++t) keys[i * params.tables + t] = index.key(t, x);
  });
  for (std::size_t t = 0; t < params.tables; ++t) {
    auto& buckets = index.tables_[t].buckets;
    for (std::size_t i = 0; i < data.size(); ++i) {
      buckets[keys[i * params.tables + t]].push_back(static_cast<std::uint32_t>(i));
    }
  }
  return index;
}

std::vector<std::int64_t> LshIndex::hash_values(std::size_t table, const PointView& x) const {
  if (x.dim() != d_) throw InvalidArgument("query dimension does not match index");
  const Table& tb = tables_.at(table);
  const Eigen::VectorXd z = detail::project(tb.projections, x);
  std::vector<std::int64_t> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index c = 0; c < z.size(); ++c) {
    out[static_cast<std::size_t>(c)] = floor_div(z[c], tb.offsets[c], tb.width);
  }
  return out;
}

std::uint64_t LshIndex::key(std::size_t table, const PointView& x) const {
  return combine_hash_values(hash_values(table, x));
}

std::vector<std::size_t> LshIndex::query(const PointView& q, std::size_t tables_used) const {
  const std::size_t used = tables_used == 0 ? tables_.size() : tables_used;
  if (used > tables_.size()) throw InvalidArgument("query uses more tables than the index has");
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < used; ++t) {
    const auto it = tables_[t].buckets.find(key(t, q));
    if (it == tables_[t].buckets.end()) continue;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace nndc
