#include "polariton/eigensolver.hpp"

#include <gtest/gtest.h>

#include "polariton/error.hpp"

namespace polariton {
namespace {

SectorOperator from_dense(const Eigen::MatrixXd& m) {
  return SectorOperator(SectorOperator::RealMatrix(m.sparseView()));
}

TEST(FullSpectrum, PauliX) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const auto spec = full_spectrum(from_dense(m), true);
  EXPECT_NEAR(spec.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(spec.eigenvalues[1], 1.0, 1e-15);
  EXPECT_LT(spec.residual_max, 1e-14);
  EXPECT_LT(spec.orthonormality_defect(), 1e-14);
}

TEST(FullSpectrum, SortsAscending) {
  const Eigen::Vector3d d(3, 1, 2);
  const auto spec = full_spectrum(from_dense(Eigen::MatrixXd(d.asDiagonal())), false);
  EXPECT_EQ(spec.eigenvalues, Eigen::Vector3d(1, 2, 3));
  EXPECT_FALSE(spec.has_vectors());
  EXPECT_TRUE(std::isnan(spec.residual_max));
}

TEST(FullSpectrum, ContractsOnSectorBlocks) {
  for (const auto& [q, p] : {std::pair{0, Parity::Odd}, std::pair{1, Parity::None}}) {
    const auto basis = build_sector_basis(5, 5, Boundary::Periodic, q, p);
    const auto block = build_hamiltonian({1.0, 1.0, 0.6, Boundary::Periodic}, basis);
    const auto spec = full_spectrum(block, true);
    const auto& e = spec.eigenvalues;
    for (Eigen::Index i = 1; i < e.size(); ++i) EXPECT_LE(e[i - 1], e[i]);
    EXPECT_LT(spec.residual_max, 1e-9 * (e[e.size() - 1] - e[0]));
    EXPECT_LT(spec.orthonormality_defect(), 1e-10);
    EXPECT_EQ(spec.has_real_vectors(), q == 0);
    EXPECT_EQ(spec.sector, basis.sector());
  }
}

TEST(FullSpectrum, PhaseConvention) {
  const auto basis = build_sector_basis(4, 4, Boundary::Periodic, 1, Parity::None);
  const auto spec = full_spectrum(build_hamiltonian({0.2, 1.0, 1.0, Boundary::Periodic}, basis), true);
  const auto& v = spec.complex_vectors();
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double scale = v.col(k).cwiseAbs().maxCoeff();
    Eigen::Index i = 0;
    while (std::abs(v(i, k)) <= 1e-8 * scale) ++i;
    EXPECT_GT(v(i, k).real(), 0.0);
    EXPECT_NEAR(v(i, k).imag(), 0.0, 1e-15);
  }
}

TEST(FullSpectrum, CapacityError) {
  const auto basis = build_sector_basis(5, 5, Boundary::Periodic, 0, Parity::Odd);
  const auto block = build_hamiltonian({0.0, 1.0, 1.0, Boundary::Periodic}, basis);
  EXPECT_THROW(full_spectrum(block, false, 10), CapacityError);
}

TEST(Lanczos, PauliX) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const auto pair = extremal_eigenpair(from_dense(m));
  EXPECT_NEAR(pair.value, -1.0, 1e-12);
  const auto& v = pair.real_vector();
  EXPECT_NEAR(v[0], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(v[1], -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Lanczos, DecoupledResonantGroundState) {
  for (int L : {3, 4, 6}) {
    const auto basis = build_sector_basis(L, L, Boundary::Periodic, 0, Parity::Even);
    const auto pair = extremal_eigenpair(build_hamiltonian({0.0, 1.0, 0.0, Boundary::Periodic}, basis));
    EXPECT_NEAR(pair.value, -static_cast<double>(L), 1e-10);
  }
}

TEST(Lanczos, AgreesWithDenseSolver) {
  struct Case {
    int L;
    Boundary bc;
    std::optional<int> q;
    Parity p;
    double delta, t;
  };
  const Case cases[] = {
      {7, Boundary::Periodic, 0, Parity::Even, 0.0, 0.2},
      {7, Boundary::Periodic, 0, Parity::Odd, -1.0, 1.0},
      {6, Boundary::Periodic, 2, Parity::None, 1.0, 0.5},
      {6, Boundary::HardWall, std::nullopt, Parity::Even, 1.0, 0.07},
      {5, Boundary::HardWall, std::nullopt, Parity::None, 0.0, 30.0},
  };
  for (const auto& c : cases) {
    const auto basis = build_sector_basis(c.L, c.L, c.bc, c.q, c.p);
    const auto block = build_hamiltonian({c.delta, 1.0, c.t, c.bc}, basis);
    const auto dense = full_spectrum(block, false);
    const auto pair = extremal_eigenpair(block);
    const double e0 = dense.eigenvalues[0];
    EXPECT_NEAR(pair.value, e0, 1e-8 * std::abs(e0)) << basis.sector().label();
    EXPECT_LT(pair.residual, 1e-8 * pair.range_estimate);
  }
}

TEST(Lanczos, Deterministic) {
  const auto basis = build_sector_basis(6, 6, Boundary::HardWall, std::nullopt, Parity::Even);
  const auto block = build_hamiltonian({0.0, 1.0, 0.3, Boundary::HardWall}, basis);
  const auto a = extremal_eigenpair(block);
  const auto b = extremal_eigenpair(block);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.real_vector(), b.real_vector());
}

TEST(Lanczos, ReportsNonConvergence) {
  const auto basis = build_sector_basis(6, 6, Boundary::Periodic, 0, Parity::Even);
  const auto block = build_hamiltonian({0.0, 1.0, 0.5, Boundary::Periodic}, basis);
  LanczosOptions options;
  options.krylov_dim = 3;
  options.keep = 1;
  options.max_restarts = 1;
  try {
    extremal_eigenpair(block, options);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

}  // namespace
}  // namespace polariton
