#pragma once

#include <complex>
#include <optional>
#include <variant>

#include <Eigen/Dense>

#include "polariton/model.hpp"

namespace polariton {

inline constexpr Eigen::Index kDefaultDenseThreshold = 12000;

/// Ascending eigenvalues of one sector block, optionally with eigenvectors
/// stored column-wise in the sector basis.
struct SpectrumResult {
  Sector sector;
  ModelParams params;
  Eigen::VectorXd eigenvalues;
  std::variant<std::monostate, Eigen::MatrixXd, Eigen::MatrixXcd> eigenvectors;
  // max_k ||H v_k - E_k v_k||_2; NaN when no vectors were computed.
  double residual_max = std::numeric_limits<double>::quiet_NaN();

  Eigen::Index dim() const { return eigenvalues.size(); }
  bool has_vectors() const { return !std::holds_alternative<std::monostate>(eigenvectors); }
  bool has_real_vectors() const { return std::holds_alternative<Eigen::MatrixXd>(eigenvectors); }
  const Eigen::MatrixXd& real_vectors() const { return std::get<Eigen::MatrixXd>(eigenvectors); }
  const Eigen::MatrixXcd& complex_vectors() const { return std::get<Eigen::MatrixXcd>(eigenvectors); }

  // |psi_alpha|^2 of eigenvector k.
  Eigen::VectorXd intensities(Eigen::Index k) const;
  // max |V^dagger V - 1| entry.
  double orthonormality_defect() const;
};

// Dense Hermitian solve of a block with D <= dense_threshold. The residual
// contract (1e-9 of the spectral range) is checked whenever vectors are kept.
SpectrumResult full_spectrum(const HamiltonianBlock& block, bool want_vectors,
                             Eigen::Index dense_threshold = kDefaultDenseThreshold);
SpectrumResult full_spectrum(const SectorOperator& op, bool want_vectors,
                             Eigen::Index dense_threshold = kDefaultDenseThreshold);

// Thin LAPACK wrappers; the input is overwritten with eigenvectors when requested.
Eigen::VectorXd dense_eigensolve(Eigen::MatrixXd& matrix, bool want_vectors);
Eigen::VectorXd dense_eigensolve(Eigen::MatrixXcd& matrix, bool want_vectors);

// Makes the first non-negligible entry of every column real and positive.
void fix_phases(Eigen::MatrixXd& vectors);
void fix_phases(Eigen::MatrixXcd& vectors);

struct LanczosOptions {
  Eigen::Index krylov_dim = 64;  // basis size before a restart
  Eigen::Index keep = 20;        // Ritz vectors kept across a restart
  int max_restarts = 500;
  double tolerance = 1e-10;      // target residual relative to the spectral range estimate
  double contract = 1e-8;        // residual above this is a ConvergenceError
};

struct Eigenpair {
  double value = 0.0;
  std::variant<Eigen::VectorXd, Eigen::VectorXcd> vector;
  double residual = 0.0;
  double range_estimate = 0.0;
  int matvecs = 0;

  bool is_real() const { return std::holds_alternative<Eigen::VectorXd>(vector); }
  const Eigen::VectorXd& real_vector() const { return std::get<Eigen::VectorXd>(vector); }
  const Eigen::VectorXcd& complex_vector() const { return std::get<Eigen::VectorXcd>(vector); }
};

/// Lowest eigenpair by thick-restart Lanczos with full reorthogonalization,
/// started from the normalized all-equal vector.
Eigenpair extremal_eigenpair(const SectorOperator& op, const LanczosOptions& options = {});
inline Eigenpair extremal_eigenpair(const HamiltonianBlock& block, const LanczosOptions& options = {}) {
  return extremal_eigenpair(block.total, options);
}

}  // namespace polariton
