#include "nndc_tools/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nndc::tools {

namespace {

constexpr std::uint64_t kMomentSeed = 0x6d6f6d656e7473ULL;

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

Dataset rows_of(const Dataset& data, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> rows(end - begin);
  std::iota(rows.begin(), rows.end(), begin);
  return data.subset(rows);
}

}  // namespace

MomentSet coordinate_moments(ValueDistribution distribution, double p, std::size_t samples,
                             std::uint64_t seed) {
  if (distribution == ValueDistribution::kUniform01) return uniform_moments(p);
  const ScalarSampler normal = [](RandomStream& rng) { return rng.normal(); };
  return mc_moments(normal, p, samples, seed).moments;
}

SweepResult run_sweep_point(const SweepSetting& setting) {
  if (setting.seeds.empty()) throw InvalidArgument("sweep needs at least one seed");
  SweepResult out;
  out.setting = setting;
  const MomentSet moments =
      coordinate_moments(setting.distribution, setting.p, setting.moment_samples, kMomentSeed);
  out.sigma_prime_model = sigma_prime_iid(setting.s, setting.d, moments).sigma_prime;
  out.predicted = predicted_contrast(out.sigma_prime_model, setting.n, setting.p, setting.k);
  out.predicted.d = setting.d;
  out.predicted.s = setting.s;

  double sigma_sum = 0.0;
  for (std::uint64_t seed : setting.seeds) {
    SynthSpec spec{setting.n, setting.d, setting.s, setting.distribution, seed};
    const Dataset data = gen_sparse_iid(spec);
    const Dataset queries = gen_queries(spec, setting.num_queries);
    out.empirical.push_back(*empirical_contrast(data, queries, setting.p, setting.k).c_r);
    if (setting.sigma_pairs > 0) {
      sigma_sum +=
          empirical_sigma_prime(data, queries, setting.p, setting.sigma_pairs, seed).sigma_prime;
    }
  }
  const auto count = static_cast<double>(out.empirical.size());
  out.empirical_mean = std::accumulate(out.empirical.begin(), out.empirical.end(), 0.0) / count;
  out.empirical_std = sample_std(out.empirical, out.empirical_mean);
  if (setting.sigma_pairs > 0) out.sigma_prime_empirical_mean = sigma_sum / count;
  return out;
}

std::vector<std::size_t> nearest_indices(const Dataset& data, const Dataset& queries, double p) {
  const auto nn = brute_force_knn(data, queries, 1, p);
  std::vector<std::size_t> out(nn.size());
  for (std::size_t q = 0; q < nn.size(); ++q) out[q] = nn[q][0].index;
  return out;
}

std::vector<RecallPoint> lsh_table_recall(const LshIndex& index, const Dataset& queries,
                                          std::span<const std::size_t> truth,
                                          std::span<const std::size_t> table_counts) {
  if (queries.size() == 0) throw InvalidArgument("recall needs at least one query");
  for (std::size_t l : table_counts) {
    if (l < 1 || l > index.table_count()) {
      throw InvalidArgument("table count " + std::to_string(l) + " outside [1, " +
                            std::to_string(index.table_count()) + "]");
    }
  }
  const std::size_t nl = table_counts.size();
  const std::size_t max_l =
      nl == 0 ? 0 : *std::max_element(table_counts.begin(), table_counts.end());
  // sizes/hits per (query, table count), filled by growing one union per query.
  std::vector<std::size_t> sizes(queries.size() * nl, 0);
  std::vector<char> hits(queries.size() * nl, 0);
  parallel_for(0, queries.size(), [&](std::size_t q) {
    const PointView x = queries.point(q);
    std::vector<char> seen(index.size(), 0);
    std::size_t size = 0;
    for (std::size_t t = 0; t < max_l; ++t) {
      const auto& buckets = index.table(t).buckets;
      const auto it = buckets.find(index.key(t, x));
      if (it != buckets.end()) {
        for (std::uint32_t i : it->second) {
          if (!seen[i]) {
            seen[i] = 1;
            ++size;
          }
        }
      }
      for (std::size_t c = 0; c < nl; ++c) {
        if (table_counts[c] == t + 1) {
          sizes[q * nl + c] = size;
          hits[q * nl + c] = seen[truth[q]];
        }
      }
    }
  });
  std::vector<RecallPoint> out(nl);
  const auto nq = static_cast<double>(queries.size());
  for (std::size_t c = 0; c < nl; ++c) {
    std::size_t total = 0, hit = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      total += sizes[q * nl + c];
      hit += static_cast<std::size_t>(hits[q * nl + c]);
    }
    out[c] = {static_cast<double>(total) / nq, static_cast<double>(hit) / nq};
  }
  return out;
}

std::vector<RecallPoint> hamming_budget_recall(const BinaryCodeIndex& index,
                                               const Dataset& queries,
                                               std::span<const std::size_t> truth,
                                               std::span<const std::size_t> budgets) {
  if (budgets.empty()) return {};
  const std::size_t max_m = *std::max_element(budgets.begin(), budgets.end());
  std::vector<std::vector<std::size_t>> ranked(queries.size());
  parallel_for(0, queries.size(), [&](std::size_t q) {
    ranked[q] = hamming_rank(index, queries.point(q), max_m);
  });
  std::vector<RecallPoint> out;
  for (std::size_t m : budgets) {
    std::vector<std::vector<std::size_t>> cand(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
      cand[q].assign(ranked[q].begin(), ranked[q].begin() + static_cast<std::ptrdiff_t>(m));
    }
    out.push_back(recall_eval(cand, truth));
  }
  return out;
}

std::vector<RecallPoint> hamming_radius_recall(const BinaryCodeIndex& index,
                                               const Dataset& queries,
                                               std::span<const std::size_t> truth,
                                               std::span<const std::size_t> radii) {
  std::vector<RecallPoint> out;
  for (std::size_t r : radii) {
    std::vector<std::vector<std::size_t>> cand(queries.size());
    parallel_for(0, queries.size(), [&](std::size_t q) {
      cand[q] = hamming_radius(index, queries.point(q), r);
    });
    out.push_back(recall_eval(cand, truth));
  }
  return out;
}

std::vector<double> geometric_noise(std::size_t d, double max_variance, double condition) {
  if (d < 1 || !(max_variance > 0.0) || !(condition >= 1.0)) {
    throw InvalidArgument("noise profile needs d >= 1, max_variance > 0, condition >= 1");
  }
  std::vector<double> v(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double t = d == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(d - 1);
    v[j] = max_variance * std::pow(condition, -t);
  }
  return v;
}

std::string_view method_name(HashMethod method) {
  switch (method) {
    case HashMethod::kPca: return "pca";
    case HashMethod::kMrc: return "mrc";
    case HashMethod::kLsh: return "lsh";
  }
  return "unknown";
}

HashMethod parse_method(std::string_view name) {
  if (name == "pca") return HashMethod::kPca;
  if (name == "mrc") return HashMethod::kMrc;
  if (name == "lsh") return HashMethod::kLsh;
  throw InvalidArgument("unknown hashing method '" + std::string(name) + "' (pca, mrc, lsh)");
}

std::vector<HashCompareRow> run_hash_compare(const Dataset& data, const Dataset& queries,
                                             const Dataset& snn_queries,
                                             const HashCompareSetting& setting,
                                             std::uint64_t seed) {
  for (std::size_t m : setting.budgets) {
    if (m < 1 || m > data.size()) throw InvalidArgument("candidate budget outside [1, n]");
  }
  const std::vector<std::size_t> truth = nearest_indices(data, queries, 2.0);
  std::optional<SymMatrix> s_nn;
  std::vector<HashCompareRow> rows;
  for (HashMethod method : setting.methods) {
    for (std::size_t bits : setting.bits) {
      BinaryCodeIndex index = [&] {
        switch (method) {
          case HashMethod::kPca: return train_pca_hash(data, bits);
          case HashMethod::kMrc:
            if (!s_nn) s_nn = estimate_snn(data, snn_queries, 2.0).s_nn;
            return train_mrc_hash(data, *s_nn, bits, setting.ridge);
          case HashMethod::kLsh: break;
        }
        return train_random_hash(data, bits, seed);
      }();
      const auto points = hamming_budget_recall(index, queries, truth, setting.budgets);
      for (std::size_t b = 0; b < points.size(); ++b) {
        rows.push_back({method, bits, setting.budgets[b], seed, points[b]});
      }
    }
  }
  return rows;
}

std::vector<HashCompareRow> run_hash_compare(const HashCompareSetting& setting,
                                             std::uint64_t seed) {
  const AnisoPairs pairs = gen_aniso_pairs(setting.n, setting.d, setting.noise_variance, seed,
                                           setting.num_snn_queries + setting.num_queries);
  const Dataset snn = rows_of(pairs.queries, 0, setting.num_snn_queries);
  const Dataset eval =
      rows_of(pairs.queries, setting.num_snn_queries, pairs.queries.size());
  return run_hash_compare(pairs.database, eval, snn, setting, seed);
}

}  // namespace nndc::tools
