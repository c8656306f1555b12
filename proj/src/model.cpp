#include "polariton/model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "polariton/error.hpp"

namespace polariton {

void ModelParams::validate() const {
  if (!(g > 0.0)) throw DomainError("coupling g must be positive");
  if (!(t >= 0.0)) throw DomainError("tunnelling t must be non-negative");
  if (!std::isfinite(delta) || !std::isfinite(t) || !std::isfinite(g)) {
    throw DomainError("model parameters must be finite");
  }
}

// ---------------------------------------------------------------------------

Eigen::Index SectorOperator::dim() const {
  return std::visit([](const auto& m) { return m.rows(); }, matrix_);
}

Eigen::Index SectorOperator::nonzeros() const {
  return std::visit([](const auto& m) { return m.nonZeros(); }, matrix_);
}

SectorOperator::ComplexMatrix SectorOperator::as_complex() const {
  if (!is_real()) return complex();
  return real().cast<std::complex<double>>();
}

Eigen::MatrixXd SectorOperator::dense_real() const {
  if (!is_real()) throw DomainError("complex operator requested as real");
  return Eigen::MatrixXd(real());
}

Eigen::MatrixXcd SectorOperator::dense_complex() const { return Eigen::MatrixXcd(as_complex()); }

double SectorOperator::hermiticity_defect() const {
  return std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        const M adjoint = M(m.adjoint());
        const M diff = m - adjoint;
        double scale = 0.0, defect = 0.0;
        for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
          for (typename M::InnerIterator it(m, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
          for (typename M::InnerIterator it(diff, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
        }
        return scale > 0.0 ? defect / scale : defect;
      },
      matrix_);
}

double SectorOperator::trace() const {
  return std::visit(
      [](const auto& m) {
        double sum = 0.0;
        for (Eigen::Index k = 0; k < m.outerSize(); ++k) sum += std::real(m.coeff(k, k));
        return sum;
      },
      matrix_);
}

void SectorOperator::write_triplets(std::ostream& out) const {
  if (is_real()) {
    const auto& m = real();
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (RealMatrix::InnerIterator it(m, r); it; ++it) {
        fmt::print(out, "{} {} {:.17g}\n", it.row(), it.col(), it.value());
      }
    }
    return;
  }
  const auto& m = complex();
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (ComplexMatrix::InnerIterator it(m, r); it; ++it) {
      fmt::print(out, "{} {} {:.17g} {:.17g}\n", it.row(), it.col(), it.value().real(),
                 it.value().imag());
    }
  }
}

SectorOperator operator+(const SectorOperator& a, const SectorOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatchError("operator dimensions differ");
  if (a.is_real() && b.is_real()) return SectorOperator(SectorOperator::RealMatrix(a.real() + b.real()));
  return SectorOperator(SectorOperator::ComplexMatrix(a.as_complex() + b.as_complex()));
}

// ---------------------------------------------------------------------------

namespace {

// Calls emit(target_key, amplitude) for every term of H_int |key>.
template <typename Emit>
void interaction_terms(const StateCodec& codec, StateKey key, const ModelParams& p, Emit&& emit) {
  int excited = 0;
  for (int i = 0; i < codec.sites(); ++i) {
    const int n = codec.photons(key, i);
    const StateKey place = codec.place(i);
    if (codec.atom(key, i) == 1) {
      ++excited;
      // a^dagger sigma^- : |n,e> -> sqrt(n+1) |n+1,g>;  digit 2n+1 -> 2n+2
      emit(key + place, p.g * std::sqrt(static_cast<double>(n + 1)));
    } else if (n > 0) {
      // a sigma^+ : |n,g> -> sqrt(n) |n-1,e>;  digit 2n -> 2n-1
      emit(key - place, p.g * std::sqrt(static_cast<double>(n)));
    }
  }
  if (excited > 0 && p.delta != 0.0) emit(key, p.delta * excited);
}

std::vector<std::pair<int, int>> bonds(int sites, Boundary boundary) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i + 1 < sites; ++i) out.emplace_back(i, i + 1);
  // The periodic sum runs over all L sites; for L = 2 the wrap-around bond
  // duplicates (0,1). A single site has no bonds.
  if (boundary == Boundary::Periodic && sites >= 2) out.emplace_back(sites - 1, 0);
  return out;
}

// Calls emit(target_key, amplitude) for every term of H_tun |key>.
template <typename Emit>
void tunneling_terms(const StateCodec& codec, StateKey key, const ModelParams& p,
                     const std::vector<std::pair<int, int>>& bond_list, Emit&& emit) {
  if (p.t == 0.0) return;
  for (const auto& [i, j] : bond_list) {
    const int ni = codec.photons(key, i);
    const int nj = codec.photons(key, j);
    // One photon = 2 in the site digit.
    const StateKey pi = 2 * codec.place(i), pj = 2 * codec.place(j);
    if (nj > 0) emit(key + pi - pj, -p.t * std::sqrt(static_cast<double>((ni + 1) * nj)));
    if (ni > 0) emit(key - pi + pj, -p.t * std::sqrt(static_cast<double>(ni * (nj + 1))));
  }
}

template <typename Scalar>
using Triplets = std::vector<Eigen::Triplet<Scalar, Eigen::Index>>;

template <typename Scalar>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor> to_sparse(Eigen::Index dim, const Triplets<Scalar>& t) {
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(Scalar(0));
  return m;
}

template <typename Scalar>
Scalar project(std::complex<double> component) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return component.real();
  } else {
    return std::conj(component);
  }
}

// Columns are sector vectors; the matrix element <v_k'|H|v_k> equals
// sum_s <s|H|r_k> conj(<s|v_k'>) / ||P r_k|| over product states s.
template <typename Scalar>
std::pair<SectorOperator, SectorOperator> assemble(const ModelParams& params, const SymBasis& basis) {
  const auto& product = basis.product();
  const auto& codec = product.codec();
  const auto bond_list = bonds(basis.sector().sites, params.boundary);
  const auto reps = basis.representatives();
  const auto norms = basis.normalizations();
  const auto dim = static_cast<Eigen::Index>(basis.dimension());

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::vector<Triplets<Scalar>> int_parts(threads), tun_parts(threads);

#pragma omp parallel for schedule(static) num_threads(threads)
  for (Eigen::Index k = 0; k < dim; ++k) {
    int tid = 0;
#ifdef _OPENMP
    tid = omp_get_thread_num();
#endif
    const double inv_norm = 1.0 / norms[k];
    auto sink = [&](Triplets<Scalar>& out) {
      return [&, k, inv_norm](StateKey target, double amplitude) {
        const auto where = product.index_of(target);
        if (!where) return;
        const auto row = basis.owner(*where);
        if (row < 0) return;
        out.emplace_back(row, k, amplitude * inv_norm * project<Scalar>(basis.component(*where)));
      };
    };
    interaction_terms(codec, reps[k], params, sink(int_parts[tid]));
    tunneling_terms(codec, reps[k], params, bond_list, sink(tun_parts[tid]));
  }

  // Static schedule gives contiguous chunks; concatenating in thread order
  // reproduces the serial triplet order.
  Triplets<Scalar> int_all, tun_all;
  for (int i = 0; i < threads; ++i) {
    int_all.insert(int_all.end(), int_parts[i].begin(), int_parts[i].end());
    tun_all.insert(tun_all.end(), tun_parts[i].begin(), tun_parts[i].end());
  }
  return {SectorOperator(to_sparse<Scalar>(dim, int_all)), SectorOperator(to_sparse<Scalar>(dim, tun_all))};
}

HamiltonianBlock finish(const Sector& sector, const ModelParams& params,
                        std::pair<SectorOperator, SectorOperator> parts) {
  HamiltonianBlock block{sector, params, std::move(parts.first), std::move(parts.second), {}};
  block.total = block.interaction + block.tunneling;
  const double defect = block.total.hermiticity_defect();
  if (defect > 1e-12) {
    throw Error("assembled Hamiltonian is not Hermitian (relative defect " + std::to_string(defect) + ")");
  }
  return block;
}

}  // namespace

HamiltonianBlock build_hamiltonian(const ModelParams& params, const SymBasis& basis) {
  params.validate();
  if (params.boundary != basis.sector().boundary) {
    throw DimensionMismatchError("basis boundary condition does not match model parameters");
  }
  if (basis.is_real()) return finish(basis.sector(), params, assemble<double>(params, basis));
  return finish(basis.sector(), params, assemble<std::complex<double>>(params, basis));
}

HamiltonianBlock build_product_hamiltonian(const ModelParams& params, const ProductBasis& basis) {
  params.validate();
  const auto& codec = basis.codec();
  const auto bond_list = bonds(basis.sites(), params.boundary);
  Triplets<double> int_t, tun_t;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    auto sink = [&](Triplets<double>& out) {
      return [&](StateKey target, double amplitude) {
        const auto where = basis.index_of(target);
        if (where) out.emplace_back(static_cast<Eigen::Index>(*where), col, amplitude);
      };
    };
    interaction_terms(codec, basis.key(k), params, sink(int_t));
    tunneling_terms(codec, basis.key(k), params, bond_list, sink(tun_t));
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  // Unreduced: no momentum label even under PBC.
  const Sector sector{basis.sites(), basis.excitations(), params.boundary, std::nullopt, Parity::None};
  return finish(sector, params,
                {SectorOperator(to_sparse<double>(dim, int_t)), SectorOperator(to_sparse<double>(dim, tun_t))});
}

DressedEnergies dressed_energies(int n, double delta, double g) {
  if (n < 0) throw DomainError("excitation number must be non-negative");
  if (n == 0) return {0.0, 0.0};
  const double chi = std::sqrt(4.0 * g * g * n + delta * delta);
  return {(delta + chi) / 2.0, (delta - chi) / 2.0};
}

int chiral_sign(const StateCodec& codec, StateKey key) {
  int exponent = 0;
  for (int i = 0; i < codec.sites(); ++i) {
    // Site i is site number i+1: even numbers count photons, odd count atoms.
    exponent += ((i + 1) % 2 == 0) ? codec.photons(key, i) : codec.atom(key, i);
  }
  return exponent % 2 == 0 ? 1 : -1;
}

Eigen::VectorXd chiral_diagonal(const SymBasis& basis) {
  const auto& product = basis.product();
  Eigen::VectorXd signs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dimension()));
  for (std::size_t i = 0; i < product.size(); ++i) {
    const auto k = basis.owner(i);
    if (k < 0) continue;
    const double s = chiral_sign(product.codec(), product.key(i));
    if (signs[k] == 0.0) {
      signs[k] = s;
    } else if (signs[k] != s) {
      throw DomainError("chiral operator does not map sector " + basis.sector().label() + " onto itself");
    }
  }
  return signs;
}

Eigen::VectorXd apply_chiral(const Eigen::Ref<const Eigen::VectorXd>& state, const SymBasis& basis) {
  if (static_cast<std::size_t>(state.size()) != basis.dimension()) {
    throw DimensionMismatchError("state does not match sector dimension");
  }
  return chiral_diagonal(basis).cwiseProduct(state);
}

Eigen::VectorXcd apply_chiral(const Eigen::Ref<const Eigen::VectorXcd>& state, const SymBasis& basis) {
  if (static_cast<std::size_t>(state.size()) != basis.dimension()) {
    throw DimensionMismatchError("state does not match sector dimension");
  }
  return chiral_diagonal(basis).cast<std::complex<double>>().cwiseProduct(state);
}

}  // namespace polariton
