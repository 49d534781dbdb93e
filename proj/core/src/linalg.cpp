#include "nndc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nndc/error.hpp"
#include "nndc/random.hpp"

namespace nndc {

namespace {

void add_row(Eigen::MatrixXd& acc, Eigen::VectorXd& x, const PointView& p,
             const Eigen::VectorXd* mean) {
  x.setZero();
  if (p.is_sparse()) {
    for (std::size_t t = 0; t < p.indices().size(); ++t) x[p.indices()[t]] = p.values()[t];
  } else {
    for (std::size_t j = 0; j < p.dim(); ++j) x[static_cast<Eigen::Index>(j)] = p.values()[j];
  }
  if (mean != nullptr) x -= *mean;
  acc.selfadjointView<Eigen::Lower>().rankUpdate(x);
}

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (m >= n) return rows;
  RandomStream rng(seed, 0x636f76ULL);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(rows[i], rows[j]);
  }
  rows.resize(m);
  std::sort(rows.begin(), rows.end());
  return rows;
}

EigenPairs top_k_from_solver(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& solver,
                             std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  EigenPairs out;
  // Eigen returns ascending order.
  out.values = solver.eigenvalues().tail(kk).reverse();
  out.vectors = solver.eigenvectors().rightCols(kk).rowwise().reverse();
  return out;
}

}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("SymMatrix: matrix must be square and nonempty");
  }
  if (!m.allFinite()) throw InvalidArgument("SymMatrix: non-finite entries");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw InvalidArgument("SymMatrix: matrix is not symmetric (max |a_ij - a_ji| = " +
                          std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(std::size_t d, double scale) {
  const auto n = static_cast<Eigen::Index>(d);
  return SymMatrix(Eigen::MatrixXd::Identity(n, n) * scale);
}

Eigen::VectorXd column_mean(const Dataset& data) {
  const auto d = static_cast<Eigen::Index>(data.dim());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PointView p = data.point(i);
    if (p.is_sparse()) {
      for (std::size_t t = 0; t < p.indices().size(); ++t) mean[p.indices()[t]] += p.values()[t];
    } else {
      mean += Eigen::Map<const Eigen::VectorXd>(p.values().data(), d);
    }
  }
  return mean / static_cast<double>(data.size());
}

SymMatrix covariance(const Dataset& data, bool center, std::size_t max_rows, std::uint64_t seed) {
  if (data.size() < 2) throw InvalidArgument("covariance needs at least 2 points");
  if (max_rows < 2) throw InvalidArgument("covariance row cap must be >= 2");
  const auto d = static_cast<Eigen::Index>(data.dim());
  const std::vector<std::size_t> rows = sample_rows(data.size(), max_rows, seed);

  Eigen::VectorXd mean;
  if (center) {
    mean = Eigen::VectorXd::Zero(d);
    for (std::size_t r : rows) {
      const PointView p = data.point(r);
      if (p.is_sparse()) {
        for (std::size_t t = 0; t < p.indices().size(); ++t) mean[p.indices()[t]] += p.values()[t];
      } else {
        mean += Eigen::Map<const Eigen::VectorXd>(p.values().data(), d);
      }
    }
    mean /= static_cast<double>(rows.size());
  }

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  if (!data.is_sparse()) {
    // Blocked GEMM path for dense data.
    constexpr std::size_t kBlock = 2048;
    for (std::size_t lo = 0; lo < rows.size(); lo += kBlock) {
      const std::size_t hi = std::min(rows.size(), lo + kBlock);
      Eigen::MatrixXd block(static_cast<Eigen::Index>(hi - lo), d);
      for (std::size_t t = lo; t < hi; ++t) {
        auto row = data.dense_row(rows[t]);
        block.row(static_cast<Eigen::Index>(t - lo)) =
            Eigen::Map<const Eigen::RowVectorXd>(row.data(), d);
      }
      if (center) block.rowwise() -= mean.transpose();
      acc.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    }
  } else {
    Eigen::VectorXd x(d);
    for (std::size_t r : rows) add_row(acc, x, data.point(r), center ? &mean : nullptr);
  }
  Eigen::MatrixXd full = acc.selfadjointView<Eigen::Lower>();
  return SymMatrix(full / static_cast<double>(rows.size()));
}

void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::fabs(vectors(r, c));
      if (a > best_abs * (1.0 + 1e-12)) {
        best_abs = a;
        best = r;
      }
    }
    if (vectors(best, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

EigenPairs sym_eig_topk(const SymMatrix& m, std::size_t k) {
  if (k < 1 || k > m.dim()) {
    throw InvalidArgument("sym_eig_topk: k must be in [1, " + std::to_string(m.dim()) + "]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eig_topk: eigensolver did not converge");
  }
  EigenPairs out = top_k_from_solver(solver, k);
  normalize_signs(out.vectors);
  return out;
}

EigenPairs gen_eig_topk(const SymMatrix& a, const SymMatrix& b, std::size_t k, double ridge) {
  const std::size_t d = a.dim();
  if (b.dim() != d) throw InvalidArgument("gen_eig_topk: a and b differ in size");
  if (k < 1 || k > d) {
    throw InvalidArgument("gen_eig_topk: k must be in [1, " + std::to_string(d) + "]");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw InvalidArgument("gen_eig_topk: ridge must be nonnegative");
  }
  const auto n = static_cast<Eigen::Index>(d);
  const double shift = ridge * b.trace() / static_cast<double>(d);
  const Eigen::MatrixXd reg = b.matrix() + shift * Eigen::MatrixXd::Identity(n, n);
  if (reg.cwiseAbs().maxCoeff() == 0.0) {
    throw InvalidArgument("gen_eig_topk: regularized b is identically zero");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bsolver(reg);
  if (bsolver.info() != Eigen::Success) {
    throw NumericError("gen_eig_topk: eigensolver on b did not converge");
  }
  const Eigen::VectorXd& bvals = bsolver.eigenvalues();
  const double floor = 1e-14 * std::max(bvals.cwiseAbs().maxCoeff(), 1e-300);
  if (bvals.minCoeff() <= floor) {
    throw NumericError(
        "gen_eig_topk: regularized b is singular or indefinite (smallest eigenvalue " +
        std::to_string(bvals.minCoeff()) + "); increase the ridge");
  }
  // reg = U L U^T, whitening W = U L^-1/2 gives W^T reg W = I.
  const Eigen::MatrixXd whiten = bsolver.eigenvectors() * bvals.cwiseInverse().cwiseSqrt().asDiagonal();
  Eigen::MatrixXd c = whiten.transpose() * a.matrix() * whiten;
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> csolver(c);
  if (csolver.info() != Eigen::Success) {
    throw NumericError("gen_eig_topk: eigensolver on whitened a did not converge");
  }
  EigenPairs top = top_k_from_solver(csolver, k);
  top.vectors = whiten * top.vectors;
  normalize_signs(top.vectors);
  return top;
}

}  // namespace nndc
