#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "nndc/contrast.hpp"
#include "nndc/error.hpp"
#include "nndc/moments.hpp"
#include "nndc/normal.hpp"
#include "nndc/parallel.hpp"
#include "nndc/synth.hpp"

namespace nndc {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

double big_quantile(double u) {
  return static_cast<double>(boost::math::quantile(boost::math::normal_distribution<Big>(), Big(u)));
}

double big_cdf(double z) {
  return static_cast<double>(boost::math::cdf(boost::math::normal_distribution<Big>(), Big(z)));
}

// mpmath, 30 digits.
constexpr double kQuantile1e6 = -4.75342430882289894819;
constexpr double kQuantile975 = 1.95996398454005423552;
constexpr double kQuantile1e15 = -7.94134532617099678097;
constexpr double kQuantile1e4 = -3.71901648545568056439;
constexpr double kContrastSigma01 = 1.90600509525031542901;
constexpr double kBaseSigma01 = 0.52465756911771010533;
constexpr double kAsymptoticSigma005 = 1.10834426791779040763;

TEST(Normal, CdfAgainstHighPrecision) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  for (double z = -8.0; z <= 8.0; z += 0.37) {
    EXPECT_NEAR(normal_cdf(z), big_cdf(z), 1e-12) << z;
  }
}

TEST(Normal, QuantileAgainstHighPrecision) {
  const std::vector<double> us{1e-15, 1e-12, 1e-9, 1e-6, 1e-4, 0.01, 0.02425, 0.1, 0.3,
                               0.5,   0.7,   0.9,  0.975, 0.99, 1 - 1e-6, 1 - 1e-12};
  for (double u : us) EXPECT_NEAR(normal_quantile(u), big_quantile(u), 1e-9) << u;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(1e-15, 1 - 1e-15);
  for (int i = 0; i < 200; ++i) {
    const double u = unif(rng);
    EXPECT_NEAR(normal_quantile(u), big_quantile(u), 1e-9) << u;
  }
}

TEST(Normal, FrozenQuantileValues) {
  EXPECT_NEAR(normal_quantile(1e-6), kQuantile1e6, 1e-12);
  EXPECT_NEAR(normal_quantile(0.975), kQuantile975, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-15), kQuantile1e15, 1e-11);
  EXPECT_NEAR(normal_quantile(1e-4), kQuantile1e4, 1e-12);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(Normal, RoundTrip) {
  for (double z = -6.0; z <= 6.0; z += 0.05) EXPECT_NEAR(normal_quantile(normal_cdf(z)), z, 1e-8);
}

TEST(Normal, EndpointsAndErrors) {
  EXPECT_EQ(normal_quantile(0.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(normal_quantile(1.0), std::numeric_limits<double>::infinity());
  EXPECT_THROW(normal_quantile(-0.1), InvalidArgument);
  EXPECT_THROW(normal_quantile(1.5), InvalidArgument);
  EXPECT_THROW(normal_quantile(std::nan("")), InvalidArgument);
}

TEST(Moments, UniformClosedForm) {
  const MomentSet m1 = uniform_moments(1.0);
  EXPECT_DOUBLE_EQ(m1.m_p, 0.5);
  EXPECT_DOUBLE_EQ(m1.mprime_p, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m1.m_2p, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m1.mprime_2p, 1.0 / 6.0);
  const MomentSet m2 = uniform_moments(2.0);
  EXPECT_DOUBLE_EQ(m2.m_p, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m2.mprime_p, 1.0 / 6.0);
  EXPECT_THROW(uniform_moments(0.0), InvalidArgument);
}

TEST(Moments, JensenHolds) {
  for (double p : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}) {
    const MomentSet m = uniform_moments(p);
    EXPECT_GE(m.m_2p, m.m_p * m.m_p);
    EXPECT_GE(m.mprime_2p, m.mprime_p * m.mprime_p);
  }
}

TEST(Moments, MonteCarloMatchesClosedForm) {
  const MomentEstimate e = mc_moments(uniform01_sampler(), 1.0, 1'000'000, 17);
  const MomentSet c = uniform_moments(1.0);
  EXPECT_FALSE(e.degenerate);
  EXPECT_NEAR(e.moments.m_p, c.m_p, 0.01 * c.m_p);
  EXPECT_NEAR(e.moments.m_2p, c.m_2p, 0.01 * c.m_2p);
  EXPECT_NEAR(e.moments.mprime_p, c.mprime_p, 0.01 * c.mprime_p);
  EXPECT_NEAR(e.moments.mprime_2p, c.mprime_2p, 0.01 * c.mprime_2p);
}

TEST(Moments, ConstantSamplerIsDegenerate) {
  const ScalarSampler constant = [](RandomStream&) { return -1.5; };
  const MomentEstimate e = mc_moments(constant, 2.0, 1000, 1);
  EXPECT_TRUE(e.degenerate);
  EXPECT_DOUBLE_EQ(e.moments.m_p, 2.25);
  EXPECT_DOUBLE_EQ(e.moments.m_2p, std::pow(1.5, 4));
  EXPECT_EQ(e.moments.mprime_p, 0.0);
  EXPECT_EQ(e.moments.mprime_2p, 0.0);
}

TEST(Moments, DeterministicAcrossRunsAndThreads) {
  set_thread_count(1);
  const MomentEstimate a = mc_moments(uniform01_sampler(), 1.5, 50'000, 99);
  set_thread_count(3);
  const MomentEstimate b = mc_moments(uniform01_sampler(), 1.5, 50'000, 99);
  set_thread_count(0);
  EXPECT_EQ(a.moments.m_p, b.moments.m_p);
  EXPECT_EQ(a.moments.m_2p, b.moments.m_2p);
  EXPECT_EQ(a.moments.mprime_p, b.moments.mprime_p);
  EXPECT_EQ(a.moments.mprime_2p, b.moments.mprime_2p);
}

TEST(Moments, ErrorShrinksWithSamples) {
  const MomentSet c = uniform_moments(1.0);
  double small = 0.0, large = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    small += std::fabs(mc_moments(uniform01_sampler(), 1.0, 4'000, seed).moments.mprime_p - c.mprime_p);
    large += std::fabs(mc_moments(uniform01_sampler(), 1.0, 64'000, seed).moments.mprime_p - c.mprime_p);
  }
  EXPECT_LT(large, small);
}

TEST(Moments, RejectsTooFewSamples) {
  EXPECT_THROW(mc_moments(uniform01_sampler(), 1.0, 10, 1), InvalidArgument);
}

TEST(EmpiricalContrast, HandComputation) {
  const Dataset data = Dataset::from_rows({{1.0}, {2.0}, {10.0}});
  const Dataset q = Dataset::from_rows({{0.0}});
  const ContrastReport r = empirical_contrast(data, q, 1.0);
  ASSERT_TRUE(r.valid());
  EXPECT_DOUBLE_EQ(r.d_mean, 13.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.d_knn, 1.0);
  EXPECT_DOUBLE_EQ(*r.c_r, 13.0 / 3.0);
}

TEST(EmpiricalContrast, EquidistantPointsGiveOne) {
  const Dataset data = Dataset::from_rows({{5.0, 0.0}, {0.0, 5.0}, {-3.0, 4.0}});
  const Dataset q = Dataset::from_rows({{0.0, 0.0}});
  EXPECT_DOUBLE_EQ(*empirical_contrast(data, q, 2.0).c_r, 1.0);
}

TEST(EmpiricalContrast, CollisionIsDataError) {
  const Dataset data = Dataset::from_rows({{1.0}, {2.0}});
  const Dataset q = Dataset::from_rows({{2.0}});
  EXPECT_THROW(empirical_contrast(data, q, 1.0), DataError);
}

TEST(EmpiricalContrast, MatchesTwoLoopScan) {
  SynthSpec spec;
  spec.n = 10'000;
  spec.d = 128;
  spec.seed = 4;
  const Dataset data = gen_sparse_iid(spec);
  const Dataset queries = gen_queries(spec, 100);
  const std::vector<double> raw(data.dense_values().begin(), data.dense_values().end());
  double sum_mean = 0.0, sum_min = 0.0, sum_ratio = 0.0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const std::vector<double> q = queries.point(qi).to_dense();
    double total = 0.0, best = INFINITY;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double dist = 0.0;
      for (std::size_t j = 0; j < spec.d; ++j) dist += std::fabs(raw[i * spec.d + j] - q[j]);
      total += dist;
      best = std::min(best, dist);
    }
    const double mean = total / static_cast<double>(data.size());
    sum_mean += mean;
    sum_min += best;
    sum_ratio += mean / best;
  }
  const ContrastReport rom = empirical_contrast(data, queries, 1.0);
  EXPECT_NEAR(*rom.c_r, sum_mean / sum_min, 1e-10);
  const ContrastReport mor =
      empirical_contrast(data, queries, 1.0, 1, EmpiricalEstimator::kMeanOfRatios);
  EXPECT_NEAR(*mor.c_r, sum_ratio / 100.0, 1e-10);
}

TEST(EmpiricalContrast, AtLeastOneForNearestNeighbor) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthSpec spec{200, 6, 0.7, ValueDistribution::kGaussian, seed};
    const ContrastReport r = empirical_contrast(gen_sparse_iid(spec), gen_queries(spec, 10), 1.3);
    EXPECT_GE(*r.c_r, 1.0);
  }
}

TEST(EmpiricalSigmaPrime, EqualDistancesGiveZero) {
  const Dataset data = Dataset::from_rows({{1.0}, {-1.0}});
  const Dataset q = Dataset::from_rows({{0.0}});
  EXPECT_EQ(empirical_sigma_prime(data, q, 1.0).sigma_prime, 0.0);
}

TEST(EmpiricalSigmaPrime, OneDimensionalUniform) {
  SynthSpec spec{20'000, 1, 1.0, ValueDistribution::kUniform01, 8};
  const double sp = empirical_sigma_prime(gen_sparse_iid(spec), gen_queries(spec, 500), 1.0).sigma_prime;
  EXPECT_NEAR(sp, std::sqrt(0.5), 0.02);
}

TEST(EmpiricalSigmaPrime, ScalesAsInverseRootD) {
  for (std::size_t d : {16u, 64u}) {
    SynthSpec spec{5'000, d, 1.0, ValueDistribution::kUniform01, 21};
    const double sp =
        empirical_sigma_prime(gen_sparse_iid(spec), gen_queries(spec, 200), 1.0).sigma_prime;
    const double model = std::sqrt(0.5 / static_cast<double>(d));
    EXPECT_NEAR(sp, model, 0.05 * model) << d;
  }
}

TEST(EmpiricalSigmaPrime, MatchesNaiveFormula) {
  SynthSpec spec{300, 10, 0.4, ValueDistribution::kUniform01, 2};
  const Dataset data = gen_sparse_iid(spec), queries = gen_queries(spec, 20);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const auto q = queries.point(qi).to_dense();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto x = data.point(i).to_dense();
      double r = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) r += std::pow(std::fabs(x[j] - q[j]), 2.0);
      s1 += r;
      s2 += r * r;
    }
  }
  const double m = s1 / 6000.0;
  const double naive = std::sqrt(s2 / 6000.0 - m * m) / m;
  EXPECT_NEAR(empirical_sigma_prime(data, queries, 2.0).sigma_prime, naive, 1e-9);
}

TEST(EmpiricalSigmaPrime, ThreadIndependent) {
  SynthSpec spec{2'000, 12, 1.0, ValueDistribution::kUniform01, 6};
  const Dataset data = gen_sparse_iid(spec), queries = gen_queries(spec, 40);
  set_thread_count(1);
  const double a = empirical_sigma_prime(data, queries, 1.0, 10'000, 3).sigma_prime;
  set_thread_count(4);
  const double b = empirical_sigma_prime(data, queries, 1.0, 10'000, 3).sigma_prime;
  set_thread_count(0);
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(PredictedContrast, FrozenValue) {
  const ContrastReport r = predicted_contrast(0.1, 1'000'000, 1.0);
  ASSERT_TRUE(r.valid());
  EXPECT_NEAR(*r.c_r, kContrastSigma01, 1e-12);
  EXPECT_NEAR(1.0 / *r.c_r, kBaseSigma01, 1e-12);
  EXPECT_FALSE(r.flags.approximate_for_p_neq_1);
}

TEST(PredictedContrast, DegenerateLimits) {
  const ContrastReport zero = predicted_contrast(0.0, 1'000'000, 1.0);
  EXPECT_TRUE(zero.flags.degenerate);
  EXPECT_EQ(*zero.c_r, 1.0);
  EXPECT_NEAR(*predicted_contrast(1e-12, 1'000'000, 1.0).c_r, 1.0, 1e-10);
}

TEST(PredictedContrast, HalfProbabilityGivesOne) {
  EXPECT_EQ(*predicted_contrast(0.01, 4, 1.0, 2).c_r, 1.0);
}

TEST(PredictedContrast, SaturatesInsteadOfOverflowing) {
  const ContrastReport r = asymptotic_contrast(0.5, 1'000'000, 1.0);
  EXPECT_TRUE(r.flags.saturated);
  EXPECT_FALSE(r.valid());
  EXPECT_NE(to_csv_row(r).find("saturated"), std::string::npos);
}

TEST(PredictedContrast, RejectsBadArguments) {
  EXPECT_THROW(predicted_contrast(-0.1, 100, 1.0), InvalidArgument);
  EXPECT_THROW(predicted_contrast(0.1, 1, 1.0), InvalidArgument);
  EXPECT_THROW(predicted_contrast(0.1, 100, 0.0), InvalidArgument);
  EXPECT_THROW(predicted_contrast(0.1, 100, 1.0, 0), InvalidArgument);
}

TEST(PredictedContrast, GridProperties) {
  for (double p : {0.5, 1.0, 2.0}) {
    for (std::size_t k : {1u, 5u}) {
      for (std::size_t n : {100u, 10'000u, 1'000'000u}) {
        double prev = 0.0;
        for (double sp = 0.001; sp <= 0.5; sp += 0.001) {
          const ContrastReport r = predicted_contrast(sp, n, p, k);
          const double u = static_cast<double>(k) / static_cast<double>(n) + normal_cdf(-1.0 / sp);
          if (!r.valid()) {
            prev = INFINITY;
            continue;
          }
          if (u <= 0.5) {
            EXPECT_GE(*r.c_r, 1.0);
          }
          EXPECT_GE(*r.c_r, prev) << "sigma'=" << sp << " n=" << n;
          prev = *r.c_r;
        }
      }
    }
  }
  for (double sp : {0.02, 0.1, 0.2}) {
    double prev = 0.0;
    for (std::size_t n = 10; n <= 100'000'000; n *= 10) {
      const ContrastReport r = predicted_contrast(sp, n, 1.0);
      const double v = r.valid() ? *r.c_r : INFINITY;
      EXPECT_GE(v, prev) << "sigma'=" << sp << " n=" << n;
      prev = v;
    }
  }
}

TEST(AsymptoticContrast, CloseToPredictedForSmallSigma) {
  const double a = *asymptotic_contrast(0.01, 1'000'000, 1.0).c_r;
  const double b = *predicted_contrast(0.01, 1'000'000, 1.0).c_r;
  EXPECT_LT(std::fabs(a - b) / b, 1e-6);
}

TEST(AsymptoticContrast, FrozenValueAndLimit) {
  EXPECT_NEAR(*asymptotic_contrast(0.05, 10'000, 2.0).c_r, kAsymptoticSigma005, 1e-12);
  EXPECT_EQ(*asymptotic_contrast(0.0, 10'000, 2.0).c_r, 1.0);
}

TEST(SigmaPrimeModels, UniformSubstitution) {
  const MomentSet m = uniform_moments(1.0);
  EXPECT_NEAR(sigma_prime_iid(1.0, 1, m).sigma_prime, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(sigma_prime_iid(1.0, 100, m).sigma_prime, std::sqrt(0.5) / 10.0, 1e-15);
  EXPECT_THROW(sigma_prime_iid(0.0, 10, m), InvalidArgument);
  EXPECT_THROW(sigma_prime_iid(0.5, 0, m), InvalidArgument);
}

TEST(SigmaPrimeModels, IidDecreasesInD) {
  const MomentSet m = uniform_moments(1.0);
  double prev = INFINITY;
  for (std::size_t d = 1; d <= 4096; d *= 2) {
    const double v = sigma_prime_iid(0.3, d, m).sigma_prime;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(SigmaPrimeModels, InconsistentMomentsRejected) {
  MomentSet bad{1.0, 1.0, 1.0, 0.1};
  EXPECT_THROW(sigma_prime_iid(1.0, 1, bad), NumericError);
}

TEST(SigmaPrimeModels, IndependentEqualsIidForConstantSparsity) {
  for (double p : {0.5, 1.0, 2.0}) {
    for (double s : {0.05, 0.3, 1.0}) {
      const MomentSet m = uniform_moments(p);
      const std::vector<CoordinateModel> coords(37, CoordinateModel{s, m});
      const double a = sigma_prime_independent(coords).sigma_prime;
      const double b = sigma_prime_iid(s, 37, m).sigma_prime;
      EXPECT_NEAR(a, b, 1e-12 * b);
    }
  }
}

TEST(SigmaPrimeModels, IndependentSingleDense) {
  const MomentSet m = uniform_moments(2.0);
  const std::vector<CoordinateModel> one{{1.0, m}};
  EXPECT_NEAR(sigma_prime_independent(one).sigma_prime,
              std::sqrt(m.mprime_2p / (m.mprime_p * m.mprime_p) - 1.0), 1e-15);
}

TEST(SigmaPrimeModels, IndependentMatchesData) {
  const std::size_t d = 512, n = 4'000, nq = 100;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pick(0.05, 1.0);
  std::vector<double> s(d);
  for (double& v : s) v = pick(rng);
  auto make = [&](std::size_t rows, std::uint64_t seed) {
    std::vector<double> values(rows * d);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        RandomStream cell(seed, i, j);
        values[i * d + j] = cell.uniform() < s[j] ? cell.uniform_open() : 0.0;
      }
    }
    return Dataset::from_dense(rows, d, std::move(values));
  };
  const Dataset data = make(n, 1), queries = make(nq, 2);
  std::vector<CoordinateModel> coords;
  for (double sj : s) coords.push_back({sj, uniform_moments(1.0)});
  const double model = sigma_prime_independent(coords).sigma_prime;
  const double measured = empirical_sigma_prime(data, queries, 1.0).sigma_prime;
  EXPECT_NEAR(measured, model, 0.03 * model);
}

TEST(SigmaPrimeModels, IidMatchesSparseData) {
  SynthSpec spec{10'000, 1024, 0.1, ValueDistribution::kUniform01, 5};
  const double model = sigma_prime_iid(0.1, 1024, uniform_moments(1.0)).sigma_prime;
  double measured = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    spec.seed = seed;
    measured += empirical_sigma_prime(gen_sparse_iid(spec), gen_queries(spec, 100), 1.0).sigma_prime;
  }
  EXPECT_NEAR(measured / 3.0, model, 0.05 * model);
}

TEST(SigmaPrimeModels, ZeroOne) {
  EXPECT_NEAR(sigma_prime_zero_one(0.5, 100).sigma_prime, std::sqrt(0.25 / 0.75) / 10.0, 1e-15);
  double prev = INFINITY;
  for (double s = 0.05; s < 1.0; s += 0.05) {
    const double v = sigma_prime_zero_one(s, 64).sigma_prime;
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(sigma_prime_zero_one(1.0 - 1e-9, 64).sigma_prime, 1e-3);
  EXPECT_THROW(sigma_prime_zero_one(0.0, 10), InvalidArgument);
  EXPECT_THROW(sigma_prime_zero_one(1.0, 10), InvalidArgument);
}

TEST(SigmaPrimeModels, IidWithUnitMomentsIsZeroOne) {
  const MomentSet unit{1.0, 1.0, 1.0, 1.0};
  for (double s : {0.1, 0.4, 0.8}) {
    EXPECT_NEAR(sigma_prime_iid(s, 50, unit).sigma_prime, sigma_prime_zero_one(s, 50).sigma_prime,
                1e-12);
  }
}

TEST(ContrastCsv, RowMatchesHeader) {
  EXPECT_EQ(contrast_csv_header(), "mode,n,d,s,p,k,sigma_prime,c_r,flags");
  const std::string row = to_csv_row(predicted_contrast(0.1, 1000, 2.0));
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 8);
  EXPECT_EQ(row.rfind("predicted,1000,", 0), 0u) << row;
}

}  // namespace
}  // namespace nndc
