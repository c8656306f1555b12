#pragma once

#include <complex>
#include <iosfwd>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "polariton/basis.hpp"

namespace polariton {

// Couplings in units of the atom-photon coupling g (g = 1 by default).
struct ModelParams {
  double delta = 0.0;  // atom-photon detuning
  double g = 1.0;
  double t = 0.0;      // photon tunnelling
  Boundary boundary = Boundary::Periodic;

  void validate() const;
};

/// Sparse Hermitian operator restricted to one sector. Real sectors (Q = 0,
/// Q = L/2, HWBC) store real matrices; other momenta store complex ones.
class SectorOperator {
 public:
  using RealMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  using ComplexMatrix = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

  SectorOperator() : matrix_(RealMatrix()) {}
  explicit SectorOperator(RealMatrix m) : matrix_(std::move(m)) {}
  explicit SectorOperator(ComplexMatrix m) : matrix_(std::move(m)) {}

  bool is_real() const { return std::holds_alternative<RealMatrix>(matrix_); }
  Eigen::Index dim() const;
  Eigen::Index nonzeros() const;

  const RealMatrix& real() const { return std::get<RealMatrix>(matrix_); }
  const ComplexMatrix& complex() const { return std::get<ComplexMatrix>(matrix_); }
  ComplexMatrix as_complex() const;

  Eigen::MatrixXd dense_real() const;
  Eigen::MatrixXcd dense_complex() const;

  // max |A - A^dagger| / max |A| (0 for the zero operator).
  double hermiticity_defect() const;
  double trace() const;

  // Triplet dump: "row col value" (or "row col re im") with 17 significant digits.
  void write_triplets(std::ostream& out) const;

  friend SectorOperator operator+(const SectorOperator& a, const SectorOperator& b);

 private:
  std::variant<RealMatrix, ComplexMatrix> matrix_;
};

/// H = H_int + H_tun in one sector basis.
struct HamiltonianBlock {
  Sector sector;
  ModelParams params;
  SectorOperator interaction;
  SectorOperator tunneling;  // includes the factor -t
  SectorOperator total;

  Eigen::Index dim() const { return total.dim(); }
};

HamiltonianBlock build_hamiltonian(const ModelParams& params, const SymBasis& basis);

// Same operator in the unreduced product basis (oracle for sector tests).
HamiltonianBlock build_product_hamiltonian(const ModelParams& params, const ProductBasis& basis);

struct DressedEnergies {
  double upper;  // (delta + chi_n) / 2
  double lower;  // (delta - chi_n) / 2
};

// Single-cavity Jaynes-Cummings levels at n excitations, chi_n = sqrt(4 g^2 n + delta^2).
// For n = 0 only |0,g> exists; both entries are 0.
DressedEnergies dressed_energies(int n, double delta, double g = 1.0);

// Sign of the chiral operator on a product state, counting sites from 1:
// (-1)^(photons on even sites) * (-1)^(excited atoms on odd sites).
int chiral_sign(const StateCodec& codec, StateKey key);

// Gamma applied to a vector in a sector basis. Throws DomainError when Gamma
// does not map the sector onto itself.
Eigen::VectorXd apply_chiral(const Eigen::Ref<const Eigen::VectorXd>& state, const SymBasis& basis);
Eigen::VectorXcd apply_chiral(const Eigen::Ref<const Eigen::VectorXcd>& state, const SymBasis& basis);

// Diagonal of Gamma in the sector basis.
Eigen::VectorXd chiral_diagonal(const SymBasis& basis);

}  // namespace polariton
