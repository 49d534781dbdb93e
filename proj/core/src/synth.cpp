#include "nndc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nndc/error.hpp"
#include "nndc/knn.hpp"
#include "nndc/parallel.hpp"
#include "nndc/random.hpp"

namespace nndc {

namespace {

constexpr std::uint64_t kQuerySalt = 0x71756572ULL;

double draw_value(RandomStream& rng, ValueDistribution dist) {
  return dist == ValueDistribution::kUniform01 ? rng.uniform_open() : rng.normal();
}

}  // namespace

void SynthSpec::validate() const {
  if (n < 1 || d < 1) throw InvalidArgument("synth: n and d must be >= 1");
  if (!(s > 0.0 && s <= 1.0)) {
    throw InvalidArgument("synth: sparsity s must be in (0, 1], got " + std::to_string(s));
  }
  if (d > std::size_t{0xFFFFFFFFu}) throw InvalidArgument("synth: d too large");
}

Dataset gen_sparse_iid(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n, d = spec.d;

  if (spec.s >= 0.5) {
    std::vector<double> values(n * d, 0.0);
    parallel_for(0, n, [&](std::size_t i) {
      for (std::size_t j = 0; j < d; ++j) {
        RandomStream rng(spec.seed, i, j);
        const bool nonzero = spec.s >= 1.0 || rng.uniform() < spec.s;
        if (nonzero) values[i * d + j] = draw_value(rng, spec.distribution);
      }
    });
    return Dataset::from_dense(n, d, std::move(values));
  }

  std::vector<std::vector<std::uint32_t>> row_idx(n);
  std::vector<std::vector<double>> row_val(n);
  parallel_for(0, n, [&](std::size_t i) {
    for (std::size_t j = 0; j < d; ++j) {
      RandomStream rng(spec.seed, i, j);
      if (rng.uniform() < spec.s) {
        const double v = draw_value(rng, spec.distribution);
        if (v != 0.0) {
          row_idx[i].push_back(static_cast<std::uint32_t>(j));
          row_val[i].push_back(v);
        }
      }
    }
  });
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    indices.insert(indices.end(), row_idx[i].begin(), row_idx[i].end());
    values.insert(values.end(), row_val[i].begin(), row_val[i].end());
    offsets.push_back(indices.size());
  }
  return Dataset::from_sparse(n, d, std::move(offsets), std::move(indices), std::move(values));
}

Dataset gen_queries(const SynthSpec& spec, std::size_t count) {
  SynthSpec q = spec;
  q.n = count;
  q.seed = spec.seed + 1;
  return gen_sparse_iid(q);
}

AnisoPairs gen_aniso_pairs(std::size_t n, std::size_t d, std::vector<double> noise_variance,
                           std::uint64_t seed, std::size_t num_queries) {
  if (d < 2) throw InvalidArgument("gen_aniso_pairs: d must be >= 2");
  if (n < 2) throw InvalidArgument("gen_aniso_pairs: n must be >= 2");
  if (num_queries < 1) throw InvalidArgument("gen_aniso_pairs: need at least one query");
  if (noise_variance.size() != d) {
    throw InvalidArgument("gen_aniso_pairs: noise diagonal must have d entries");
  }
  for (double v : noise_variance) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("gen_aniso_pairs: noise variances must be positive");
    }
  }

  std::vector<double> base(n * d);
  parallel_for(0, n, [&](std::size_t i) {
    for (std::size_t j = 0; j < d; ++j) {
      RandomStream rng(seed, i, j);
      base[i * d + j] = rng.normal();
    }
  });

  std::vector<std::size_t> source(num_queries);
  std::vector<double> queries(num_queries * d);
  for (std::size_t qi = 0; qi < num_queries; ++qi) {
    RandomStream pick(seed, kQuerySalt, qi);
    source[qi] = pick.below(n);
    for (std::size_t j = 0; j < d; ++j) {
      RandomStream rng(seed ^ kQuerySalt, qi, j);
      queries[qi * d + j] = base[source[qi] * d + j] + std::sqrt(noise_variance[j]) * rng.normal();
    }
  }

  AnisoPairs out{Dataset::from_dense(n, d, std::move(base)),
                 Dataset::from_dense(num_queries, d, std::move(queries)),
                 std::move(source)};
  const auto nn = brute_force_knn(out.database, out.queries, 1, 2.0);
  std::size_t mismatched = 0;
  for (std::size_t qi = 0; qi < num_queries; ++qi) mismatched += nn[qi][0].index != out.source[qi];
  out.mismatch_fraction = static_cast<double>(mismatched) / static_cast<double>(num_queries);
  out.noisy = out.mismatch_fraction > 0.2;
  return out;
}

}  // namespace nndc
