#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "nndc/error.hpp"
#include "nndc/intrinsic.hpp"
#include "nndc/linalg.hpp"
#include "nndc/parallel.hpp"
#include "nndc/synth.hpp"

namespace nndc {
namespace {

// Cyclic Jacobi rotations; returns eigenvalues in descending order.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(out.rbegin(), out.rend());
  return out;
}

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
  return m;
}

Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, 2 * n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x * x.transpose() / static_cast<double>(2 * n) + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_rotation(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(x).householderQ();
}

Dataset from_matrix(const Eigen::MatrixXd& rows) {
  std::vector<double> v(static_cast<std::size_t>(rows.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
      v[static_cast<std::size_t>(i * rows.cols() + j)] = rows(i, j);
  return Dataset::from_dense(static_cast<std::size_t>(rows.rows()),
                             static_cast<std::size_t>(rows.cols()), std::move(v));
}

TEST(Synth, DenseSmallSpec) {
  const Dataset d = gen_sparse_iid({3, 2, 1.0, ValueDistribution::kUniform01, 42});
  EXPECT_FALSE(d.is_sparse());
  ASSERT_EQ(d.size(), 3u);
  for (double v : d.dense_values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Synth, SparsityConcentration) {
  const Dataset d = gen_sparse_iid({10'000, 1000, 0.1, ValueDistribution::kUniform01, 7});
  EXPECT_TRUE(d.is_sparse());
  EXPECT_NEAR(d.nonzero_fraction(), 0.1, 0.001);
  double sum = 0.0;
  for (double v : d.sparse_values()) sum += v;
  EXPECT_NEAR(sum / static_cast<double>(d.sparse_values().size()), 0.5, 0.01);
}

TEST(Synth, DeterministicAndThreadIndependent) {
  const SynthSpec spec{500, 40, 0.3, ValueDistribution::kGaussian, 11};
  set_thread_count(1);
  const Dataset a = gen_sparse_iid(spec);
  set_thread_count(4);
  const Dataset b = gen_sparse_iid(spec);
  set_thread_count(0);
  ASSERT_TRUE(std::equal(a.sparse_values().begin(), a.sparse_values().end(),
                         b.sparse_values().begin(), b.sparse_values().end()));
  ASSERT_TRUE(std::equal(a.sparse_indices().begin(), a.sparse_indices().end(),
                         b.sparse_indices().begin(), b.sparse_indices().end()));
  const Dataset c = gen_sparse_iid({500, 40, 0.3, ValueDistribution::kGaussian, 12});
  EXPECT_FALSE(std::equal(a.sparse_values().begin(), a.sparse_values().end(),
                          c.sparse_values().begin(), c.sparse_values().end()));
}

TEST(Synth, QueriesUseNextSeed) {
  const SynthSpec spec{20, 5, 1.0, ValueDistribution::kUniform01, 3};
  SynthSpec next = spec;
  next.seed = 4;
  next.n = 6;
  const Dataset q = gen_queries(spec, 6);
  const Dataset ref = gen_sparse_iid(next);
  EXPECT_TRUE(std::equal(q.dense_values().begin(), q.dense_values().end(), ref.dense_values().begin()));
}

TEST(Synth, RejectsBadSpec) {
  EXPECT_THROW(gen_sparse_iid({0, 2, 1.0, ValueDistribution::kUniform01, 1}), InvalidArgument);
  EXPECT_THROW(gen_sparse_iid({2, 2, 0.0, ValueDistribution::kUniform01, 1}), InvalidArgument);
  EXPECT_THROW(gen_sparse_iid({2, 2, 1.5, ValueDistribution::kUniform01, 1}), InvalidArgument);
}

TEST(Synth, AnisoPairsIsotropicNoise) {
  const double c = 0.01;
  const AnisoPairs pairs = gen_aniso_pairs(2000, 8, std::vector<double>(8, c), 5, 2000);
  EXPECT_FALSE(pairs.noisy);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(8, 8);
  for (std::size_t qi = 0; qi < pairs.queries.size(); ++qi) {
    const auto q = pairs.queries.point(qi).to_dense();
    const auto x = pairs.database.point(pairs.source[qi]).to_dense();
    Eigen::VectorXd diff(8);
    for (int j = 0; j < 8; ++j) diff[j] = q[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)];
    s += diff * diff.transpose();
  }
  s /= static_cast<double>(pairs.queries.size());
  const Eigen::MatrixXd target = c * Eigen::MatrixXd::Identity(8, 8);
  EXPECT_LT((s - target).norm() / target.norm(), 0.1);
}

TEST(Synth, AnisoPairsSingleCoordinateAndDeterminism) {
  std::vector<double> noise(4, 1e-12);
  noise[0] = 0.05;
  const AnisoPairs a = gen_aniso_pairs(500, 4, noise, 9, 100);
  const AnisoPairs b = gen_aniso_pairs(500, 4, noise, 9, 100);
  EXPECT_EQ(a.source, b.source);
  for (std::size_t qi = 0; qi < a.queries.size(); ++qi) {
    EXPECT_EQ(a.queries.point(qi).to_dense(), b.queries.point(qi).to_dense());
    const auto q = a.queries.point(qi).to_dense();
    const auto x = a.database.point(a.source[qi]).to_dense();
    for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(q[j], x[j], 1e-4);
  }
}

TEST(Synth, AnisoPairsFlagsLargeNoise) {
  const AnisoPairs pairs = gen_aniso_pairs(2000, 4, std::vector<double>(4, 25.0), 1, 200);
  EXPECT_TRUE(pairs.noisy);
  EXPECT_GT(pairs.mismatch_fraction, 0.2);
}

TEST(Covariance, ScaledIdentityRowsAndCentering) {
  const Dataset rows = Dataset::from_rows({{2, 0, 0}, {0, 3, 0}, {0, 0, 5}});
  const Eigen::MatrixXd raw = covariance(rows, false).matrix();
  EXPECT_TRUE(raw.isApprox(Eigen::Vector3d(4.0 / 3, 9.0 / 3, 25.0 / 3).asDiagonal().toDenseMatrix()));
  const Dataset pm = Dataset::from_rows({{-1.0}, {1.0}});
  EXPECT_DOUBLE_EQ(covariance(pm, true).matrix()(0, 0), 1.0);
}

TEST(Covariance, MatchesNaive) {
  const Dataset data = gen_sparse_iid({300, 6, 0.5, ValueDistribution::kGaussian, 3});
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
  for (std::size_t i = 0; i < data.size(); ++i) mean += Eigen::Map<const Eigen::VectorXd>(data.point(i).to_dense().data(), 6);
  mean /= 300.0;
  Eigen::MatrixXd naive = Eigen::MatrixXd::Zero(6, 6);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.point(i).to_dense();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), 6) - mean;
    naive += v * v.transpose();
  }
  naive /= 300.0;
  EXPECT_LT((covariance(data).matrix() - naive).norm(), 1e-12);
}

TEST(Covariance, SubsampleCloseToFull) {
  const Dataset data = gen_sparse_iid({50'000, 10, 1.0, ValueDistribution::kUniform01, 8});
  const Eigen::MatrixXd full = covariance(data, true, data.size()).matrix();
  const Eigen::MatrixXd sub = covariance(data, true, 10'000, 2).matrix();
  EXPECT_LT((full - sub).norm() / full.norm(), 0.05);
}

TEST(SymEig, DiagonalExample) {
  const SymMatrix m(Eigen::Vector3d(3, 2, 1).asDiagonal().toDenseMatrix());
  const EigenPairs e = sym_eig_topk(m, 2);
  EXPECT_DOUBLE_EQ(e.values[0], 3.0);
  EXPECT_DOUBLE_EQ(e.values[1], 2.0);
  EXPECT_TRUE(e.vectors.col(0).isApprox(Eigen::Vector3d::UnitX()));
  EXPECT_TRUE(e.vectors.col(1).isApprox(Eigen::Vector3d::UnitY()));
}

TEST(SymEig, MatchesJacobiReference) {
  const Eigen::MatrixXd a = random_symmetric(50, 4);
  const EigenPairs e = sym_eig_topk(SymMatrix(a), 50);
  const std::vector<double> ref = jacobi_eigenvalues(a);
  const double scale = a.norm();
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_NEAR(e.values[static_cast<Eigen::Index>(i)], ref[i], 1e-8 * scale);
    const Eigen::VectorXd v = e.vectors.col(static_cast<Eigen::Index>(i));
    EXPECT_LE((a * v - e.values[static_cast<Eigen::Index>(i)] * v).norm(), 1e-8 * scale);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(v[arg], 0.0);
  }
  EXPECT_TRUE((e.vectors.transpose() * e.vectors).isIdentity(1e-10));
}

TEST(SymEig, SimilarityInvariance) {
  const Eigen::MatrixXd a = random_symmetric(12, 6);
  const Eigen::MatrixXd r = random_rotation(12, 7);
  const EigenPairs e1 = sym_eig_topk(SymMatrix(a), 12);
  const EigenPairs e2 = sym_eig_topk(SymMatrix(r * a * r.transpose()), 12);
  EXPECT_LT((e1.values - e2.values).norm(), 1e-10);
}

TEST(SymEig, Errors) {
  EXPECT_THROW(sym_eig_topk(SymMatrix::identity(3), 4), InvalidArgument);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 0, 1;
  EXPECT_THROW(SymMatrix{asym}, InvalidArgument);
}

TEST(GenEig, IdentityBReducesToSymEig) {
  const Eigen::MatrixXd a = random_spd(10, 2);
  const EigenPairs g = gen_eig_topk(SymMatrix(a), SymMatrix::identity(10), 4, 0.0);
  const EigenPairs s = sym_eig_topk(SymMatrix(a), 4);
  EXPECT_LT((g.values - s.values).norm(), 1e-10);
  EXPECT_LT((g.vectors - s.vectors).norm(), 1e-8);
}

TEST(GenEig, DiagonalExample) {
  const SymMatrix a(Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix());
  const SymMatrix b(Eigen::Vector2d(1, 4).asDiagonal().toDenseMatrix());
  const EigenPairs g = gen_eig_topk(a, b, 2, 0.0);
  EXPECT_NEAR(g.values[0], 2.0, 1e-12);
  EXPECT_NEAR(g.values[1], 0.25, 1e-12);
  EXPECT_NEAR(std::fabs(g.vectors(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(g.vectors(1, 0), 0.0, 1e-12);
}

TEST(GenEig, TopQuotientBeatsRandomSearch) {
  const Eigen::MatrixXd a = random_spd(20, 10), b = random_spd(20, 11);
  const EigenPairs g = gen_eig_topk(SymMatrix(a), SymMatrix(b), 3, 0.0);
  const Eigen::VectorXd w = g.vectors.col(0);
  const double top = w.dot(a * w) / w.dot(b * w);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 10'000; ++t) {
    Eigen::VectorXd v(20);
    for (Eigen::Index j = 0; j < 20; ++j) v[j] = n01(rng);
    EXPECT_LE(v.dot(a * v) / v.dot(b * v), top * (1 + 1e-12));
  }
  EXPECT_TRUE((g.vectors.transpose() * b * g.vectors).isIdentity(1e-8));
  EXPECT_GE(g.values[0], g.values[1]);
  EXPECT_GE(g.values[1], g.values[2]);
}

TEST(GenEig, ScaleInvariantUpToSign) {
  const Eigen::MatrixXd a = random_spd(8, 20), b = random_spd(8, 21);
  const EigenPairs g1 = gen_eig_topk(SymMatrix(a), SymMatrix(b), 3);
  const EigenPairs g2 = gen_eig_topk(SymMatrix(7.5 * a), SymMatrix(7.5 * b), 3);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double cosine = g1.vectors.col(c).normalized().dot(g2.vectors.col(c).normalized());
    EXPECT_GT(std::fabs(cosine), 1 - 1e-9);
  }
}

TEST(GenEig, ZeroBRejected) {
  const SymMatrix zero(Eigen::MatrixXd::Zero(3, 3));
  EXPECT_THROW(gen_eig_topk(SymMatrix::identity(3), zero, 1, 0.0), InvalidArgument);
}

TEST(EffectiveDimension, SingleAxis) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 50; ++i) rows.push_back({0.3 * i, 1.0, -2.0});
  const Dataset data = Dataset::from_rows(rows);
  for (double f : {0.5, 0.85, 1.0}) EXPECT_EQ(effective_dimension(data, f), 1u);
}

TEST(EffectiveDimension, IsotropicGaussianAndFullRank) {
  const Dataset data = gen_sparse_iid({20'000, 40, 1.0, ValueDistribution::kGaussian, 13});
  const double de = static_cast<double>(effective_dimension(data, 0.85));
  EXPECT_NEAR(de, 0.85 * 40, 0.1 * 0.85 * 40);
  EXPECT_EQ(effective_dimension(data, 1.0), 40u);
  EXPECT_THROW(effective_dimension(data, 0.0), InvalidArgument);
}

TEST(EffectiveDimension, ZeroVariance) {
  const Dataset same = Dataset::from_rows({{1.0, 2.0}, {1.0, 2.0}});
  EXPECT_THROW(effective_dimension(same, 0.85), DataError);
}

TEST(SweepGrid, Shape) {
  const std::vector<std::size_t> g = sweep_grid(512);
  ASSERT_GE(g.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(g[i], i + 1);
  EXPECT_EQ(g.back(), 512u);
  EXPECT_EQ(g[64], 80u);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
  EXPECT_EQ(sweep_grid(1), std::vector<std::size_t>{1});
  EXPECT_EQ(sweep_grid(10).size(), 10u);
}

TEST(IntrinsicDimension, SingleDimension) {
  const SynthSpec spec{2'000, 5, 1.0, ValueDistribution::kUniform01, 1};
  const DimReport r = intrinsic_dimension_by_contrast(gen_sparse_iid(spec), gen_queries(spec, 50),
                                                      {1.0, 2.0}, 1);
  EXPECT_EQ(r.d_star, 1u);
  EXPECT_EQ(r.discrepancy_curve.size(), 1u);
}

TEST(IntrinsicDimension, DenseUniformSelfConsistent) {
  const std::size_t d = 20;
  const SynthSpec spec{4'000, d, 1.0, ValueDistribution::kUniform01, 2};
  const Dataset data = gen_sparse_iid(spec), queries = gen_queries(spec, 100);
  const DimReport r = intrinsic_dimension_by_contrast(data, queries, {1.0, 2.0}, d);
  EXPECT_GE(static_cast<double>(r.d_star), 0.6 * d);
  EXPECT_LE(static_cast<double>(r.d_star), 1.5 * d);
  double lo = INFINITY;
  for (const DiscrepancyPoint& pt : r.discrepancy_curve) {
    EXPECT_GE(pt.discrepancy, 0.0);
    lo = std::min(lo, pt.discrepancy);
  }
  const auto best = std::find_if(r.discrepancy_curve.begin(), r.discrepancy_curve.end(),
                                 [&](const DiscrepancyPoint& pt) { return pt.discrepancy == lo; });
  EXPECT_EQ(best->d_prime, r.d_star);

  // Scaling by a power of two is exact in floating point.
  const Eigen::MatrixXd scaled =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          data.dense_values().data(), 4'000, d) * 8.0;
  const Eigen::MatrixXd qscaled =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          queries.dense_values().data(), 100, d) * 8.0;
  const DimReport s = intrinsic_dimension_by_contrast(from_matrix(scaled), from_matrix(qscaled),
                                                      {1.0, 2.0}, d);
  EXPECT_EQ(s.d_star, r.d_star);
}

TEST(IntrinsicDimension, Errors) {
  const Dataset data = gen_sparse_iid({100, 4, 1.0, ValueDistribution::kUniform01, 1});
  const Dataset q = gen_queries({100, 4, 1.0, ValueDistribution::kUniform01, 1}, 5);
  EXPECT_THROW(intrinsic_dimension_by_contrast(data, q, {}, 2), InvalidArgument);
  EXPECT_THROW(intrinsic_dimension_by_contrast(data, q, {1.0}, 5), InvalidArgument);
}

}  // namespace
}  // namespace nndc
