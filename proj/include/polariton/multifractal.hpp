#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "polariton/eigensolver.hpp"
#include "polariton/spectral.hpp"

namespace polariton {

inline constexpr double kInfiniteQ = std::numeric_limits<double>::infinity();
inline constexpr double kIntensityFloor = 1e-30;

struct GfdRecord {
  double q = 1.0;
  double value = 0.0;
  double basis_size = 0.0;  // base of the logarithm
};

// Generalized fractal dimension of the intensities |psi_alpha|^2, which must
// sum to one within 1e-10. q = 1 and q = infinity use their limit forms.
GfdRecord gfd(std::span<const double> intensities, double q, double basis_size);
GfdRecord gfd(const Eigen::VectorXd& amplitudes, double q, double basis_size);
GfdRecord gfd(const Eigen::VectorXcd& amplitudes, double q, double basis_size);

/// Random-matrix prediction for the information dimension of GOE eigenvectors.
struct GoeReference {
  double dimension = 0.0;
  double mean_d1 = 0.0;
  double var_d1 = 0.0;
};

GoeReference goe_reference(double dimension);

// H_x = psi(x + 1) + gamma, defined for real x > -1.
double harmonic_number(double x);

struct GfdWindowStats {
  double q = 1.0;
  double mean = 0.0;
  double variance = 0.0;  // population variance over the window
  std::size_t count = 0;
  std::size_t excluded = 0;    // window states inside degenerate multiplets
  std::vector<double> values;  // one per eigenstate, ascending energy
  BinnedStatistic bins;        // non-degenerate eigenstates binned by scaled energy
};

// D_q of every eigenvector in `spectrum` with the sector dimension as log base.
std::vector<double> gfd_per_state(const SpectrumResult& spectrum, double q);

// Window mean and population variance of D_q. States in an exactly degenerate
// multiplet are left out (their vectors are not fixed by H) and counted.
GfdWindowStats gfd_window_stats(const SpectrumResult& spectrum, double q, IndexWindow window,
                                std::size_t bins = 100);

}  // namespace polariton
