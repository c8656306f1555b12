#include "polariton/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "polariton/eigensolver.hpp"
#include "polariton/error.hpp"

namespace polariton {
namespace {

std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(DressedEnergies, ClosedForms) {
  auto e = dressed_energies(1, 0.0);
  EXPECT_DOUBLE_EQ(e.upper, 1.0);
  EXPECT_DOUBLE_EQ(e.lower, -1.0);
  e = dressed_energies(2, 0.0);
  EXPECT_NEAR(e.upper, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(e.lower, -std::sqrt(2.0), 1e-15);
  e = dressed_energies(1, 3.0);
  EXPECT_NEAR(e.upper, (3.0 + std::sqrt(13.0)) / 2.0, 1e-15);
  EXPECT_NEAR(e.lower, (3.0 - std::sqrt(13.0)) / 2.0, 1e-15);
  e = dressed_energies(0, 2.0);
  EXPECT_EQ(e.upper, 0.0);
  EXPECT_THROW(dressed_energies(-1, 0.0), DomainError);
}

TEST(Hamiltonian, SingleSiteResonance) {
  const auto basis = build_sector_basis(1, 1, Boundary::HardWall, std::nullopt, Parity::None);
  const auto block = build_hamiltonian({0.0, 1.0, 0.0, Boundary::HardWall}, basis);
  const Eigen::MatrixXd h = block.total.dense_real();
  ASSERT_EQ(h.rows(), 2);
  EXPECT_DOUBLE_EQ(h(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(h(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(h(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(h(1, 0), 1.0);
}

TEST(Hamiltonian, SingleSiteDetuned) {
  for (double delta : {-7.0, -1.0, 0.5, 3.0, 10.0}) {
    for (int n = 1; n <= 4; ++n) {
      const auto basis = build_sector_basis(1, n, Boundary::Periodic, 0, Parity::None);
      const auto spec = full_spectrum(build_hamiltonian({delta, 1.0, 0.7, Boundary::Periodic}, basis), false);
      const auto e = dressed_energies(n, delta);
      EXPECT_NEAR(spec.eigenvalues[0], e.lower, 1e-13);
      EXPECT_NEAR(spec.eigenvalues[1], e.upper, 1e-13);
    }
  }
}

TEST(Hamiltonian, InvalidParameters) {
  const auto basis = build_sector_basis(2, 2, Boundary::Periodic, 0, Parity::Even);
  EXPECT_THROW(build_hamiltonian({0.0, 0.0, 1.0, Boundary::Periodic}, basis), DomainError);
  EXPECT_THROW(build_hamiltonian({0.0, 1.0, -1.0, Boundary::Periodic}, basis), DomainError);
  EXPECT_THROW(build_hamiltonian({0.0, 1.0, 1.0, Boundary::HardWall}, basis), DimensionMismatchError);
}

TEST(Hamiltonian, HermitianInEverySector) {
  for (Boundary bc : {Boundary::Periodic, Boundary::HardWall}) {
    for (const auto& sector : all_sectors(5, 5, bc)) {
      const auto basis = build_sector_basis(5, 5, bc, sector.momentum, sector.parity);
      const auto block = build_hamiltonian({1.3, 1.0, 0.8, bc}, basis);
      EXPECT_LT(block.total.hermiticity_defect(), 1e-12) << sector.label();
      EXPECT_EQ(block.total.is_real(), sector.is_real());
    }
  }
}

TEST(Hamiltonian, PartsAddUp) {
  const auto basis = build_sector_basis(4, 4, Boundary::Periodic, 0, Parity::Odd);
  const auto block = build_hamiltonian({2.0, 1.0, 0.3, Boundary::Periodic}, basis);
  const Eigen::MatrixXd diff =
      block.total.dense_real() - block.interaction.dense_real() - block.tunneling.dense_real();
  EXPECT_EQ(diff.cwiseAbs().maxCoeff(), 0.0);
}

// Union of sector spectra equals the spectrum in the unreduced product basis.
TEST(Hamiltonian, SectorUnionMatchesProductBasis) {
  for (int L = 1; L <= 4; ++L) {
    for (Boundary bc : {Boundary::Periodic, Boundary::HardWall}) {
      const ModelParams params{0.7, 1.0, 0.45, bc};
      const auto product = std::make_shared<const ProductBasis>(ProductBasis::enumerate(L, L));
      const auto full = full_spectrum(build_product_hamiltonian(params, *product), false);
      std::vector<double> merged;
      for (const auto& sector : all_sectors(L, L, bc)) {
        const auto spec = full_spectrum(build_hamiltonian(params, SymBasis::build(sector, product)), false);
        merged.insert(merged.end(), spec.eigenvalues.data(), spec.eigenvalues.data() + spec.dim());
      }
      std::sort(merged.begin(), merged.end());
      const auto expected = sorted(full.eigenvalues);
      ASSERT_EQ(merged.size(), expected.size());
      for (std::size_t i = 0; i < merged.size(); ++i) {
        EXPECT_NEAR(merged[i], expected[i], 1e-10) << "L=" << L << " " << to_string(bc);
      }
    }
  }
}

// At t = 0 the spectrum is every sum of single-site dressed levels.
TEST(Hamiltonian, DecoupledSitesGiveDressedSums) {
  for (int L = 1; L <= 3; ++L) {
    for (double delta : {0.0, -2.5, 4.0}) {
      std::vector<double> oracle;
      std::function<void(int, int, double)> recurse = [&](int site, int left, double energy) {
        if (site == L) {
          if (left == 0) oracle.push_back(energy);
          return;
        }
        for (int n = 0; n <= left; ++n) {
          if (n == 0) {
            recurse(site + 1, left, energy);
            continue;
          }
          const double chi = std::sqrt(4.0 * n + delta * delta);
          recurse(site + 1, left - n, energy + (delta + chi) / 2);
          recurse(site + 1, left - n, energy + (delta - chi) / 2);
        }
      };
      recurse(0, L, 0.0);
      std::sort(oracle.begin(), oracle.end());
      const auto product = ProductBasis::enumerate(L, L);
      const auto spec = full_spectrum(build_product_hamiltonian({delta, 1.0, 0.0, Boundary::Periodic}, product), false);
      const auto got = sorted(spec.eigenvalues);
      ASSERT_EQ(got.size(), oracle.size());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], oracle[i], 1e-12);
    }
  }
}

TEST(Chiral, SignConvention) {
  // Sites numbered from 1: |(1,g),(0,e)> has no photon on even site 2 and no
  // excited atom on odd site 1.
  const StateCodec codec(2, 1);
  EXPECT_EQ(chiral_sign(codec, codec.encode({{{1, 0}, {0, 1}}})), 1);
  EXPECT_EQ(chiral_sign(codec, codec.encode({{{0, 1}, {1, 0}}})), 1);
  const StateCodec codec3(3, 3);
  EXPECT_EQ(chiral_sign(codec3, codec3.encode({{{0, 1}, {1, 0}, {1, 0}}})), 1);
  EXPECT_EQ(chiral_sign(codec3, codec3.encode({{{0, 0}, {1, 0}, {1, 1}}})), 1);
  EXPECT_EQ(chiral_sign(codec3, codec3.encode({{{0, 0}, {2, 1}, {0, 0}}})), 1);
  EXPECT_EQ(chiral_sign(codec3, codec3.encode({{{0, 1}, {2, 0}, {0, 0}}})), -1);
}

TEST(Chiral, InvolutionOnRandomVectors) {
  const auto basis = build_sector_basis(6, 6, Boundary::Periodic, 0, Parity::Odd);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.dimension()));
  for (auto& x : v) x = normal(rng);
  EXPECT_EQ((apply_chiral(apply_chiral(v, basis), basis) - v).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Chiral, AnticommutesAtResonance) {
  // For L = 2 translation and reflection coincide, so Q=0 has only p=+1.
  for (int L : {2, 4, 6}) {
    const auto basis = build_sector_basis(L, L, Boundary::Periodic, 0, L == 2 ? Parity::Even : Parity::Odd);
    const auto block = build_hamiltonian({0.0, 1.0, 0.9, Boundary::Periodic}, basis);
    const Eigen::VectorXd gamma = chiral_diagonal(basis);
    const Eigen::MatrixXd h = block.total.dense_real();
    const Eigen::MatrixXd conj = gamma.asDiagonal() * h * gamma.asDiagonal();
    EXPECT_LT((conj + h).cwiseAbs().maxCoeff(), 1e-13) << "L=" << L;
  }
  // Odd L under PBC breaks the symmetry through the wrap-around bond.
  const auto product = ProductBasis::enumerate(3, 3);
  const auto block = build_product_hamiltonian({0.0, 1.0, 0.9, Boundary::Periodic}, product);
  Eigen::VectorXd gamma(static_cast<Eigen::Index>(product.size()));
  for (std::size_t i = 0; i < product.size(); ++i) {
    gamma[static_cast<Eigen::Index>(i)] = chiral_sign(product.codec(), product.key(i));
  }
  const Eigen::MatrixXd h = block.total.dense_real();
  EXPECT_GT((gamma.asDiagonal() * h * gamma.asDiagonal() + h).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Chiral, SpectrumReflectsAboutMidpoint) {
  const auto basis = build_sector_basis(6, 6, Boundary::Periodic, 0, Parity::Odd);
  for (double t : {0.1, 1.0, 10.0}) {
    const auto spec = full_spectrum(build_hamiltonian({0.0, 1.0, t, Boundary::Periodic}, basis), false);
    const auto& e = spec.eigenvalues;
    const Eigen::Index d = e.size();
    for (Eigen::Index k = 0; k < d; ++k) EXPECT_NEAR(e[k] + e[d - 1 - k], 0.0, 1e-10);
  }
}

TEST(Hamiltonian, TripletDump) {
  const auto basis = build_sector_basis(1, 1, Boundary::HardWall, std::nullopt, Parity::None);
  const auto block = build_hamiltonian({0.5, 1.0, 0.0, Boundary::HardWall}, basis);
  std::ostringstream out;
  block.total.write_triplets(out);
  EXPECT_EQ(out.str(), "0 0 0.5\n0 1 1\n1 0 1\n");
}

}  // namespace
}  // namespace polariton
