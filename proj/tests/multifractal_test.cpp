#include "polariton/multifractal.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polariton/error.hpp"

namespace polariton {
namespace {

Eigen::VectorXd random_state(std::mt19937_64& rng, Eigen::Index n, double sparsity = 0.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = u(rng) < sparsity ? 0.0 : normal(rng);
  if (v.norm() == 0.0) v[0] = 1.0;
  return v.normalized();
}

TEST(Gfd, Examples) {
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(10);
  e0[3] = 1.0;
  for (double q : {0.5, 1.0, 2.0, 7.0, kInfiniteQ}) EXPECT_EQ(gfd(e0, q, 10).value, 0.0);
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(100, 0.1);
  EXPECT_NEAR(gfd(uniform, 2.0, 100).value, 1.0, 1e-14);
  EXPECT_NEAR(gfd(uniform, 1.0, 100).value, 1.0, 1e-14);
  EXPECT_NEAR(gfd(uniform, kInfiniteQ, 100).value, 1.0, 1e-14);
  Eigen::VectorXd pair = Eigen::VectorXd::Zero(4);
  pair[0] = pair[2] = std::sqrt(0.5);
  EXPECT_NEAR(gfd(pair, 1.0, 4).value, 0.5, 1e-15);
}

TEST(Gfd, Errors) {
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.5);
  EXPECT_THROW(gfd(v, 0.0, 4), DomainError);
  EXPECT_THROW(gfd(v, -1.0, 4), DomainError);
  EXPECT_THROW(gfd(v, 1.0, 1), DomainError);
  EXPECT_THROW(gfd(Eigen::VectorXd(v * 1.001), 1.0, 4), DomainError);
}

TEST(Gfd, ComplexAmplitudes) {
  Eigen::VectorXcd v(4);
  v << std::complex<double>(0.5, 0.0), std::complex<double>(0.0, 0.5), std::complex<double>(-0.5, 0.0),
      std::complex<double>(0.0, -0.5);
  EXPECT_NEAR(gfd(v, 2.0, 4).value, 1.0, 1e-15);
}

TEST(Gfd, OrderingInQ) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = random_state(rng, 50, trial % 2 ? 0.8 : 0.0);
    const double d1 = gfd(v, 1.0, 50).value;
    const double d2 = gfd(v, 2.0, 50).value;
    const double dinf = gfd(v, kInfiniteQ, 50).value;
    EXPECT_GE(dinf, 0.0);
    EXPECT_LE(dinf, d2 + 1e-12);
    EXPECT_LE(d2, d1 + 1e-12);
    EXPECT_LE(d1, 1.0 + 1e-12);
  }
}

TEST(Gfd, PermutationInvariance) {
  std::mt19937_64 rng(4);
  auto v = random_state(rng, 64);
  const double before = gfd(v, 2.0, 64).value;
  std::vector<double> a(v.data(), v.data() + v.size());
  std::shuffle(a.begin(), a.end(), rng);
  const Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(a.data(), 64);
  EXPECT_NEAR(gfd(w, 2.0, 64).value, before, 1e-14);
}

TEST(Gfd, InformationDimensionIsTheLimit) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_state(rng, 80, 0.3);
    const double d1 = gfd(v, 1.0, 80).value;
    EXPECT_LT(std::abs(d1 - gfd(v, 1.0 + 1e-5, 80).value), 1e-3);
    EXPECT_LT(std::abs(d1 - gfd(v, 1.0 - 1e-5, 80).value), 1e-3);
  }
}

TEST(GoeReference, TwoLevels) {
  const auto ref = goe_reference(2);
  EXPECT_NEAR(harmonic_number(1.0), 1.0, 1e-15);
  EXPECT_NEAR(ref.mean_d1, (std::log(4.0) - 1.0) / std::log(2.0), 1e-14);
  EXPECT_NEAR(ref.mean_d1, 0.5573, 1e-4);
  EXPECT_THROW(goe_reference(1), DomainError);
}

TEST(GoeReference, HalfIntegerHarmonicNumber) {
  // H_{1/2} = 2 - 2 ln 2.
  EXPECT_NEAR(harmonic_number(0.5), 2.0 - 2.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(harmonic_number(4.0), 1.0 + 0.5 + 1.0 / 3.0 + 0.25, 1e-14);
}

TEST(GoeReference, FiniteAndMonotone) {
  double prev = 0.0;
  for (double d = 2; d <= 1e6; d = std::ceil(d * 1.37)) {
    const auto ref = goe_reference(d);
    EXPECT_TRUE(std::isfinite(ref.mean_d1));
    EXPECT_GT(ref.mean_d1, 0.0);
    EXPECT_LT(ref.mean_d1, 1.0);
    EXPECT_GT(ref.var_d1, 0.0) << d;
    EXPECT_GT(ref.mean_d1, prev);
    prev = ref.mean_d1;
  }
  EXPECT_GT(goe_reference(1e4).mean_d1, goe_reference(1e2).mean_d1);
}

// Monte-Carlo oracle: information dimensions of GOE eigenvectors.
TEST(GoeReference, MatchesRandomMatrixEnsemble) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> normal;
  const Eigen::Index d = 2000;
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) a(i, j) = a(j, i) = normal(rng) * (i == j ? std::sqrt(2.0) : 1.0);
  }
  dense_eigensolve(a, true);
  std::vector<double> d1;
  for (Eigen::Index k = d / 2 - 100; k < d / 2 + 100; ++k) d1.push_back(gfd(Eigen::VectorXd(a.col(k)), 1.0, d).value);
  double mean = 0.0;
  for (double x : d1) mean += x;
  mean /= static_cast<double>(d1.size());
  double var = 0.0;
  for (double x : d1) var += (x - mean) * (x - mean);
  var /= static_cast<double>(d1.size() - 1);
  const auto ref = goe_reference(static_cast<double>(d));
  EXPECT_LT(std::abs(mean - ref.mean_d1), 0.01 * ref.mean_d1);
  EXPECT_LT(std::abs(var - ref.var_d1), 0.2 * ref.var_d1) << var << " vs " << ref.var_d1;
}

TEST(GfdWindowStats, IdenticalVectorsHaveNoVariance) {
  SpectrumResult spec;
  spec.eigenvalues = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(6, 6, 1.0 / std::sqrt(6.0));
  spec.eigenvectors = v;
  const auto stats = gfd_window_stats(spec, 1.0, middle_third(6));
  EXPECT_EQ(stats.count, 2u);
  EXPECT_NEAR(stats.mean, 1.0, 1e-14);
  EXPECT_EQ(stats.variance, 0.0);
  EXPECT_EQ(stats.bins.total(), 6u);
  EXPECT_THROW(gfd_window_stats(spec, 1.0, {3, 3}), DomainError);
}

TEST(GfdWindowStats, DegenerateMultipletsAreExcluded) {
  SpectrumResult spec;
  spec.eigenvalues.resize(9);
  spec.eigenvalues << 0.0, 0.1, 0.2, 0.4, 0.4, 0.6, 0.7, 0.8, 1.0;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(9, 9);
  v.col(5).setConstant(1.0 / 3.0);
  spec.eigenvectors = v;
  const auto stats = gfd_window_stats(spec, 1.0, middle_third(9));
  EXPECT_EQ(stats.excluded, 2u);
  EXPECT_EQ(stats.count, 1u);
  EXPECT_NEAR(stats.mean, 1.0, 1e-14);
  EXPECT_EQ(stats.bins.total(), 7u);
  EXPECT_THROW(gfd_window_stats(spec, 1.0, {3, 5}), DomainError);
}

TEST(GfdWindowStats, ChaoticSectorNearGoe) {
  const auto basis = build_sector_basis(7, 7, Boundary::Periodic, 0, Parity::Odd);
  const auto spec = full_spectrum(build_hamiltonian({0.0, 1.0, 1.0, Boundary::Periodic}, basis), true);
  const auto stats = gfd_window_stats(spec, 1.0, middle_third(spec.dim()));
  const auto ref = goe_reference(static_cast<double>(spec.dim()));
  EXPECT_NEAR(stats.mean, ref.mean_d1, 0.03);
  for (double x : stats.values) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0 + 1e-12);
  }
}

}  // namespace
}  // namespace polariton
