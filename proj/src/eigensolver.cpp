#include "polariton/eigensolver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polariton/error.hpp"

namespace polariton {

Eigen::VectorXd SpectrumResult::intensities(Eigen::Index k) const {
  if (has_real_vectors()) return real_vectors().col(k).array().square();
  if (!has_vectors()) throw DomainError("spectrum holds no eigenvectors");
  return complex_vectors().col(k).cwiseAbs2();
}

double SpectrumResult::orthonormality_defect() const {
  return std::visit(
      [](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return 0.0;
        } else {
          const auto gram = (v.adjoint() * v).eval();
          return (gram - V::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
        }
      },
      eigenvectors);
}

// ---------------------------------------------------------------------------

Eigen::VectorXd dense_eigensolve(Eigen::MatrixXd& matrix, bool want_vectors) {
  const auto n = static_cast<lapack_int>(matrix.rows());
  if (matrix.rows() != matrix.cols()) throw DimensionMismatchError("matrix is not square");
  Eigen::VectorXd values(n);
  if (n == 0) return values;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n,
                                         matrix.data(), n, values.data());
  if (info != 0) throw ConvergenceError("dsyevd failed with info=" + std::to_string(info), NAN);
  return values;
}

Eigen::VectorXd dense_eigensolve(Eigen::MatrixXcd& matrix, bool want_vectors) {
  const auto n = static_cast<lapack_int>(matrix.rows());
  if (matrix.rows() != matrix.cols()) throw DimensionMismatchError("matrix is not square");
  Eigen::VectorXd values(n);
  if (n == 0) return values;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n,
                                         reinterpret_cast<lapack_complex_double*>(matrix.data()), n, values.data());
  if (info != 0) throw ConvergenceError("zheevd failed with info=" + std::to_string(info), NAN);
  return values;
}

namespace {

template <typename Derived>
Eigen::Index first_significant(const Eigen::MatrixBase<Derived>& column) {
  const double scale = column.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    if (std::abs(column[i]) > 1e-8 * scale) return i;
  }
  return 0;
}

}  // namespace

void fix_phases(Eigen::MatrixXd& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    auto col = vectors.col(k);
    if (col[first_significant(col)] < 0.0) col = -col;
  }
}

void fix_phases(Eigen::MatrixXcd& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    auto col = vectors.col(k);
    const auto lead = col[first_significant(col)];
    if (std::abs(lead) > 0.0) col *= std::conj(lead) / std::abs(lead);
  }
}

namespace {

template <typename Sparse, typename Dense>
double max_residual(const Sparse& h, const Dense& vectors, const Eigen::VectorXd& values) {
  constexpr Eigen::Index kBlock = 256;
  double worst = 0.0;
  for (Eigen::Index start = 0; start < vectors.cols(); start += kBlock) {
    const Eigen::Index width = std::min(kBlock, vectors.cols() - start);
    const auto block = vectors.middleCols(start, width);
    Dense r = h * block;
    for (Eigen::Index j = 0; j < width; ++j) {
      r.col(j) -= values[start + j] * block.col(j);
      worst = std::max(worst, r.col(j).norm());
    }
  }
  return worst;
}

double residual_scale(const Eigen::VectorXd& values) {
  if (values.size() == 0) return 0.0;
  const double range = values[values.size() - 1] - values[0];
  return std::max(range, values.cwiseAbs().maxCoeff());
}

}  // namespace

SpectrumResult full_spectrum(const SectorOperator& op, bool want_vectors, Eigen::Index dense_threshold) {
  if (op.dim() > dense_threshold) {
    throw CapacityError("sector dimension " + std::to_string(op.dim()) +
                        " exceeds the dense threshold " + std::to_string(dense_threshold));
  }
  SpectrumResult result;
  if (op.is_real()) {
    Eigen::MatrixXd a = op.dense_real();
    result.eigenvalues = dense_eigensolve(a, want_vectors);
    if (want_vectors) {
      fix_phases(a);
      result.residual_max = max_residual(op.real(), a, result.eigenvalues);
      result.eigenvectors = std::move(a);
    }
  } else {
    Eigen::MatrixXcd a = op.dense_complex();
    result.eigenvalues = dense_eigensolve(a, want_vectors);
    if (want_vectors) {
      fix_phases(a);
      result.residual_max = max_residual(op.complex(), a, result.eigenvalues);
      result.eigenvectors = std::move(a);
    }
  }
  if (want_vectors) {
    const double scale = residual_scale(result.eigenvalues);
    if (!(result.residual_max <= 1e-9 * std::max(scale, 1e-300) || result.residual_max < 1e-13)) {
      throw ConvergenceError("dense eigensolver residual above contract", result.residual_max);
    }
  }
  return result;
}

SpectrumResult full_spectrum(const HamiltonianBlock& block, bool want_vectors, Eigen::Index dense_threshold) {
  auto result = full_spectrum(block.total, want_vectors, dense_threshold);
  result.sector = block.sector;
  result.params = block.params;
  return result;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Vec>
Vec seeded_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + seed);
  std::normal_distribution<double> normal;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

template <typename Scalar, typename Sparse>
Eigenpair thick_restart_lanczos(const Sparse& h, const LanczosOptions& opt) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = h.rows();
  if (n == 0) throw DimensionMismatchError("empty operator");

  Eigenpair out;
  if (n == 1) {
    out.value = std::real(h.coeff(0, 0));
    out.vector = Vec::Ones(1).eval();
    return out;
  }

  const Eigen::Index m = std::clamp<Eigen::Index>(opt.krylov_dim, 2, n);
  const Eigen::Index keep = std::clamp<Eigen::Index>(opt.keep, 1, m - 1);

  Mat basis(n, m);
  Mat projected = Mat::Zero(m, m);
  basis.col(0) = Vec::Constant(n, Scalar(1.0 / std::sqrt(static_cast<double>(n))));
  Eigen::Index start = 0;
  double range = 0.0;
  double best_residual = INFINITY;
  Vec w(n);

  for (int cycle = 0; cycle <= opt.max_restarts; ++cycle) {
    Eigen::Index size = m;
    Vec next;
    for (Eigen::Index j = start; j < m; ++j) {
      w.noalias() = h * basis.col(j);
      ++out.matvecs;
      const auto v = basis.leftCols(j + 1);
      Vec coeff = v.adjoint() * w;
      w.noalias() -= v * coeff;
      const Vec again = v.adjoint() * w;  // second Gram-Schmidt pass
      w.noalias() -= v * again;
      coeff += again;
      for (Eigen::Index i = 0; i <= j; ++i) {
        projected(i, j) = coeff[i];
        projected(j, i) = Eigen::numext::conj(coeff[i]);
      }
      projected(j, j) = std::real(coeff[j]);
      double beta = w.norm();
      if (beta <= 1e-13 * std::max(1.0, projected.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff())) {
        if (j + 1 == n) {
          size = j + 1;  // the basis spans the whole space
          next.resize(0);
          break;
        }
        // Invariant subspace that may miss the target: continue from a
        // fixed-seed vector orthogonal to the current basis.
        w = seeded_vector<Vec>(n, static_cast<unsigned>(out.matvecs));
        w -= v * (v.adjoint() * w).eval();
        w -= v * (v.adjoint() * w).eval();
        beta = w.norm();
      }
      if (j + 1 < m) {
        basis.col(j + 1) = w / beta;
      } else {
        next = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Mat> ritz(projected.topLeftCorner(size, size));
    const Eigen::VectorXd theta = ritz.eigenvalues();
    range = std::max(range, theta[size - 1] - theta[0]);
    Vec x = basis.leftCols(size) * ritz.eigenvectors().col(0);
    x.normalize();
    Vec r = h * x;
    ++out.matvecs;
    r -= theta[0] * x;
    const double residual = r.norm();
    best_residual = std::min(best_residual, residual);
    const double scale = std::max(range, 1e-300);

    if (residual <= opt.tolerance * scale || next.size() == 0 || cycle == opt.max_restarts) {
      if (!(residual <= opt.contract * scale || residual == 0.0)) {
        throw ConvergenceError("Lanczos did not converge (residual " + std::to_string(residual) + ")",
                               residual);
      }
      Mat as_matrix = x;
      fix_phases(as_matrix);
      out.value = theta[0];
      out.vector = Vec(as_matrix.col(0));
      out.residual = residual;
      out.range_estimate = range;
      return out;
    }

    // Restart with the lowest `keep` Ritz vectors plus the current residual direction.
    const Mat kept = basis.leftCols(size) * ritz.eigenvectors().leftCols(keep);
    basis.leftCols(keep) = kept;
    projected.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) projected(i, i) = theta[i];
    basis.col(keep) = next;
    start = keep;
  }
  throw ConvergenceError("Lanczos exhausted restarts", best_residual);
}

}  // namespace

Eigenpair extremal_eigenpair(const SectorOperator& op, const LanczosOptions& options) {
  if (op.is_real()) return thick_restart_lanczos<double>(op.real(), options);
  return thick_restart_lanczos<std::complex<double>>(op.complex(), options);
}

}  // namespace polariton
