#include "nndc/contrast.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <vector>

#include "nndc/error.hpp"
#include "nndc/format.hpp"
#include "nndc/metric.hpp"
#include "nndc/normal.hpp"
#include "nndc/parallel.hpp"
#include "nndc/random.hpp"

namespace nndc {

namespace {

constexpr double kSaturationFloor = 1e-12;
constexpr double kRadicandSlack = 1e-12;

std::string num(double v) { return format_double(v); }

void check_p(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw InvalidArgument("p must be positive, got " + num(p));
  }
}

// sigma'^2 may come out a hair below zero from rounding; anything beyond the
// slack means the inputs are inconsistent.
double checked_sqrt(double radicand, const char* what) {
  if (!std::isfinite(radicand)) throw NumericError(std::string(what) + ": non-finite variance");
  if (radicand < -kRadicandSlack) {
    throw NumericError(std::string(what) + ": negative normalized variance " + num(radicand) +
                       " (inconsistent moments)");
  }
  return std::sqrt(std::max(radicand, 0.0));
}

ContrastReport gaussian_model(ContrastMode mode, double sigma_prime, std::size_t n, double p,
                              std::size_t k, double tail) {
  ContrastReport r;
  r.mode = mode;
  r.n = n;
  r.p = p;
  r.k = k;
  r.sigma_prime = sigma_prime;
  r.flags.approximate_for_p_neq_1 = p != 1.0;
  if (sigma_prime == 0.0) {
    r.flags.degenerate = true;
    r.c_r = 1.0;
    return r;
  }
  const double u = static_cast<double>(k) / static_cast<double>(n) + tail;
  if (!(u < 1.0)) {
    throw InvalidArgument("k/n + Phi(-1/sigma') must be < 1, got " + num(u));
  }
  const double base = 1.0 + normal_quantile(u) * sigma_prime;
  if (base <= kSaturationFloor) {
    r.flags.saturated = true;
    return r;
  }
  r.c_r = std::pow(base, -1.0 / p);
  return r;
}

void check_model_args(double sigma_prime, std::size_t n, double p) {
  check_p(p);
  if (n < 2) throw InvalidArgument("n must be >= 2");
  if (!(sigma_prime >= 0.0) || !std::isfinite(sigma_prime)) {
    throw InvalidArgument("sigma' must be a finite nonnegative number, got " + num(sigma_prime));
  }
}

struct PairStats {
  CompensatedSum sum;
  CompensatedSum sum_sq;
  std::size_t count = 0;

  void add(double centered) {
    sum.add(centered);
    sum_sq.add(centered * centered);
    ++count;
  }
};

}  // namespace

std::string ContrastFlags::to_string() const {
  std::string out;
  auto add = [&](const char* f) {
    if (!out.empty()) out.push_back('|');
    out += f;
  };
  if (saturated) add("saturated");
  if (degenerate) add("degenerate");
  if (approximate_for_p_neq_1) add("approximate_for_p_neq_1");
  return out;
}

std::string_view mode_name(ContrastMode mode) {
  switch (mode) {
    case ContrastMode::kEmpirical: return "empirical";
    case ContrastMode::kPredicted: return "predicted";
    case ContrastMode::kAsymptotic: return "asymptotic";
  }
  return "unknown";
}

std::string_view source_name(VarianceSource source) {
  switch (source) {
    case VarianceSource::kEmpiricalPairs: return "empirical-pairs";
    case VarianceSource::kIndependentDims: return "independent-dims";
    case VarianceSource::kIidModel: return "iid-model";
    case VarianceSource::kZeroOneModel: return "zero-one-model";
  }
  return "unknown";
}

std::string contrast_csv_header() { return "mode,n,d,s,p,k,sigma_prime,c_r,flags"; }

std::string to_csv_row(const ContrastReport& r) {
  std::string mode(mode_name(r.mode));
  if (r.mode == ContrastMode::kEmpirical && r.estimator == EmpiricalEstimator::kMeanOfRatios) {
    mode += "-mean-of-ratios";
  }
  std::string row = mode;
  row += ',' + std::to_string(r.n);
  row += ',' + (r.d ? std::to_string(*r.d) : std::string{});
  row += ',' + (r.s ? num(*r.s) : std::string{});
  row += ',' + num(r.p);
  row += ',' + std::to_string(r.k);
  row += ',' + (r.sigma_prime ? num(*r.sigma_prime) : std::string{});
  row += ',' + (r.c_r ? num(*r.c_r) : std::string{});
  row += ',' + r.flags.to_string();
  return row;
}

ContrastReport empirical_contrast(const Dataset& data, const Dataset& queries, double p,
                                  std::size_t k, EmpiricalEstimator estimator) {
  const Metric metric(p);
  const std::size_t n = data.size();
  if (k < 1 || k > n) throw InvalidArgument("k must be in [1, n]");
  if (queries.dim() != data.dim()) throw InvalidArgument("query dimension does not match dataset");

  const std::size_t nq = queries.size();
  std::vector<double> d_mean(nq), d_knn(nq);
  parallel_for(0, nq, [&](std::size_t qi) {
    const PointView q = queries.point(qi);
    std::vector<double> dist(n);
    CompensatedSum total;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = metric.distance(data.point(i), q);
      total.add(dist[i]);
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    d_mean[qi] = total.value() / static_cast<double>(n);
    d_knn[qi] = dist[k - 1];
  });

  CompensatedSum mean_sum, knn_sum, ratio_sum;
  for (std::size_t qi = 0; qi < nq; ++qi) {
    if (d_knn[qi] == 0.0) {
      throw DataError("query " + std::to_string(qi) +
                      " has zero distance to its nearest neighbor; queries must be distinct "
                      "from database points (exclude them first)");
    }
    mean_sum.add(d_mean[qi]);
    knn_sum.add(d_knn[qi]);
    ratio_sum.add(d_mean[qi] / d_knn[qi]);
  }

  ContrastReport r;
  r.mode = ContrastMode::kEmpirical;
  r.estimator = estimator;
  r.n = n;
  r.d = data.dim();
  r.s = data.nonzero_fraction();
  r.p = p;
  r.k = k;
  r.query_count = nq;
  r.d_mean = mean_sum.value() / static_cast<double>(nq);
  r.d_knn = knn_sum.value() / static_cast<double>(nq);
  r.c_r = estimator == EmpiricalEstimator::kRatioOfMeans
              ? r.d_mean / r.d_knn
              : ratio_sum.value() / static_cast<double>(nq);
  return r;
}

NormalizedVariance empirical_sigma_prime(const Dataset& data, const Dataset& queries, double p,
                                         std::size_t pair_cap, std::uint64_t seed) {
  const Metric metric(p);
  if (data.size() < 2) throw InvalidArgument("empirical_sigma_prime needs at least 2 points");
  if (queries.dim() != data.dim()) throw InvalidArgument("query dimension does not match dataset");
  if (pair_cap == 0) throw InvalidArgument("pair cap must be positive");

  const std::size_t n = data.size();
  const std::size_t nq = queries.size();

  // Shift by a reference value so the variance does not cancel badly when
  // sigma' is small.
  double ref = 0.0;
  {
    CompensatedSum s;
    const std::size_t m = std::min<std::size_t>(n, 1024);
    for (std::size_t i = 0; i < m; ++i) s.add(metric.powered(data.point(i), queries.point(0)));
    ref = s.value() / static_cast<double>(m);
  }

  std::vector<PairStats> partial;
  const bool exhaustive = n <= pair_cap / nq;
  if (exhaustive) {
    partial.resize(nq);
    parallel_for(0, nq, [&](std::size_t qi) {
      const PointView q = queries.point(qi);
      for (std::size_t i = 0; i < n; ++i) partial[qi].add(metric.powered(data.point(i), q) - ref);
    });
  } else {
    constexpr std::size_t kBlock = 65536;
    const std::size_t blocks = (pair_cap + kBlock - 1) / kBlock;
    partial.resize(blocks);
    parallel_for(0, blocks, [&](std::size_t b) {
      RandomStream rng(seed, 0x7061697273ULL, b);
      const std::size_t count = std::min(kBlock, pair_cap - b * kBlock);
      for (std::size_t t = 0; t < count; ++t) {
        const std::size_t i = rng.below(n);
        const std::size_t qi = rng.below(nq);
        partial[b].add(metric.powered(data.point(i), queries.point(qi)) - ref);
      }
    });
  }

  CompensatedSum sum, sum_sq;
  std::size_t count = 0;
  for (const auto& s : partial) {
    sum.add(s.sum.value());
    sum_sq.add(s.sum_sq.value());
    count += s.count;
  }
  const double inv = 1.0 / static_cast<double>(count);
  const double shifted_mean = sum.value() * inv;
  const double mean = ref + shifted_mean;
  const double var = std::max(0.0, sum_sq.value() * inv - shifted_mean * shifted_mean);
  if (!(mean > 0.0)) {
    throw NumericError("mean of D^p is zero: every query coincides with every database point");
  }
  return {std::sqrt(var) / mean, VarianceSource::kEmpiricalPairs};
}

ContrastReport predicted_contrast(double sigma_prime, std::size_t n, double p, std::size_t k) {
  check_model_args(sigma_prime, n, p);
  if (k < 1 || k >= n) throw InvalidArgument("k must be in [1, n)");
  const double tail = sigma_prime > 0.0 ? normal_cdf(-1.0 / sigma_prime) : 0.0;
  ContrastReport r = gaussian_model(ContrastMode::kPredicted, sigma_prime, n, p, k, tail);
  return r;
}

ContrastReport asymptotic_contrast(double sigma_prime, std::size_t n, double p) {
  check_model_args(sigma_prime, n, p);
  return gaussian_model(ContrastMode::kAsymptotic, sigma_prime, n, p, 1, 0.0);
}

NormalizedVariance sigma_prime_independent(std::span<const CoordinateModel> coordinates) {
  if (coordinates.empty()) throw InvalidArgument("need at least one coordinate");
  CompensatedSum mu_sum, var_sum;
  for (const auto& c : coordinates) {
    if (!(c.s > 0.0 && c.s <= 1.0)) {
      throw InvalidArgument("sparsity must be in (0, 1], got " + num(c.s));
    }
    const MomentSet& m = c.moments;
    const double mu = c.s * c.s * m.mprime_p + 2.0 * (1.0 - c.s) * c.s * m.m_p;
    const double second = c.s * c.s * m.mprime_2p + 2.0 * (1.0 - c.s) * c.s * m.m_2p;
    mu_sum.add(mu);
    var_sum.add(second - mu * mu);
  }
  const double mu = mu_sum.value();
  if (!(mu > 0.0)) throw NumericError("all coordinate means are zero");
  return {checked_sqrt(var_sum.value() / (mu * mu), "sigma_prime_independent"),
          VarianceSource::kIndependentDims};
}

NormalizedVariance sigma_prime_iid(double s, std::size_t d, const MomentSet& m) {
  if (!(s > 0.0 && s <= 1.0)) throw InvalidArgument("sparsity must be in (0, 1], got " + num(s));
  if (d < 1) throw InvalidArgument("d must be >= 1");
  const double numerator = s * ((m.mprime_2p - 2.0 * m.m_2p) * s + 2.0 * m.m_2p);
  const double mean = s * ((m.mprime_p - 2.0 * m.m_p) * s + 2.0 * m.m_p);
  if (!(mean > 0.0)) throw InvalidArgument("moment denominator must be positive");
  const double radicand = numerator / (mean * mean) - 1.0;
  return {checked_sqrt(radicand, "sigma_prime_iid") / std::sqrt(static_cast<double>(d)),
          VarianceSource::kIidModel};
}

NormalizedVariance sigma_prime_zero_one(double s, std::size_t d) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("sparsity must be in (0, 1), got " + num(s));
  if (d < 1) throw InvalidArgument("d must be >= 1");
  const double z = (1.0 - s) * (1.0 - s);
  return {std::sqrt(z / (1.0 - z)) / std::sqrt(static_cast<double>(d)),
          VarianceSource::kZeroOneModel};
}

double sigma_prime_from_coordinate_stats(std::span<const double> means,
                                         std::span<const double> variances) {
  if (means.size() != variances.size() || means.empty()) {
    throw InvalidArgument("means and variances must be nonempty and equally long");
  }
  CompensatedSum mu, var;
  for (std::size_t j = 0; j < means.size(); ++j) {
    mu.add(means[j]);
    var.add(variances[j]);
  }
  if (!(mu.value() > 0.0)) throw NumericError("all coordinate means are zero");
  return checked_sqrt(var.value(), "coordinate variance") / mu.value();
}

}  // namespace nndc
