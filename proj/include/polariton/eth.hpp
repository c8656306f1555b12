#pragma once

#include <cstddef>
#include <vector>

#include "polariton/eigensolver.hpp"
#include "polariton/model.hpp"
#include "polariton/spectral.hpp"

namespace polariton {

/// Diagonal elements <alpha|O|alpha> of every eigenstate plus the window used
/// for statistics.
struct EthDiagonal {
  double eps_av = 0.0;           // mean scaled eigenvalue
  std::vector<double> epsilons;  // scaled energies, ascending
  std::vector<double> values;    // one per eigenstate
  IndexWindow window;

  double ratio(std::size_t alpha) const { return epsilons[alpha] / eps_av; }
  std::vector<double> window_values() const;
};

// Throws DimensionMismatchError if the operator and the eigenvectors live in
// different bases.
EthDiagonal diagonal_elements(const SpectrumResult& spectrum, const SectorOperator& observable,
                              std::optional<IndexWindow> window = std::nullopt);

// Mean of |v[k+1] - v[k]| over consecutive entries.
double z_statistic(std::span<const double> values);

struct OffDiagonalElement {
  std::size_t alpha = 0;  // higher level
  std::size_t beta = 0;   // lower level
  double omega = 0.0;     // eps_alpha - eps_beta >= 0
  double magnitude = 0.0;
};

struct EthOffdiag {
  double eps_av = 0.0;
  double delta = 0.0;
  double lower = 0.0;  // strict bounds on the mean energy of a pair
  double upper = 0.0;
  std::vector<OffDiagonalElement> elements;  // sorted by omega, then (alpha, beta)
  std::vector<double> running_average;       // trailing mean over up to `subset` points
  std::size_t subset = 100;
  double mean_magnitude = 0.0;
};

inline constexpr double kDefaultEthWidth = 0.01;

// All pairs alpha != beta with 1 - delta/2 < (eps_alpha + eps_beta) / (2 eps_av) < 1 + delta/2.
EthOffdiag offdiagonal_elements(const SpectrumResult& spectrum, const SectorOperator& observable,
                                double delta = kDefaultEthWidth, std::size_t subset = 100);

std::vector<double> running_average(std::span<const double> series, std::size_t subset);

}  // namespace polariton
