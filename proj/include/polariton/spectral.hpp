#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace polariton {

/// Eigenvalues mapped affinely onto [0, 1].
struct ScaledSpectrum {
  std::vector<double> epsilons;
  double e_min = 0.0;
  double e_max = 0.0;
};

// Throws DomainError for fewer than two levels or a zero-width spectrum.
ScaledSpectrum scale_energies(std::span<const double> eigenvalues);

/// Half-open range [begin, end) of level indices on the sorted spectrum.
struct IndexWindow {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

// Levels floor(D/3) .. floor(2D/3)-1.
IndexWindow middle_third(std::size_t dimension);
// Levels with lo <= eps < hi (eps <= hi when right_closed). eps must be ascending.
IndexWindow energy_window(std::span<const double> epsilons, double lo, double hi,
                          bool right_closed = false);

/// Consecutive-spacing ratios. Entry k uses levels k, k+1, k+2 and belongs
/// to the middle level k+1. Ratios touching a spacing below the degeneracy
/// floor are left undefined.
struct RRatios {
  std::vector<std::optional<double>> values;
  std::size_t excluded = 0;
  double floor = 0.0;

  std::size_t level_of(std::size_t k) const { return k + 1; }
};

inline constexpr double kDegeneracyFloor = 1e-12;  // relative to the spectral range

RRatios r_ratios(std::span<const double> eigenvalues, double relative_floor = kDegeneracyFloor);

// True for every level that shares a spacing below the degeneracy floor with a
// neighbour. Eigenvectors inside such a multiplet are an arbitrary basis.
std::vector<bool> degenerate_levels(std::span<const double> eigenvalues, double relative_floor = kDegeneracyFloor);

struct MeanR {
  double mean = 0.0;
  std::size_t count = 0;     // defined ratios in the window
  std::size_t excluded = 0;  // undefined ratios in the window
};

// Mean of the defined ratios whose middle level lies in `window`.
// Throws DomainError when the window holds no defined ratio.
MeanR mean_r(std::span<const double> eigenvalues, IndexWindow window);

enum class BinMode { EqualWidth, EqualCount };

/// Per-bin aggregates over [0, 1]. Empty bins carry no mean or variance.
struct BinnedStatistic {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
  std::vector<std::optional<double>> mean;
  std::vector<std::optional<double>> variance;  // population variance

  std::size_t bins() const { return counts.size(); }
  double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
  double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
  std::size_t total() const;
};

// Equal-width bin of eps in [0,1]; eps == 1 falls in the last bin.
std::size_t bin_index(double epsilon, std::size_t bins);

// rho = count / (D * width), so sum(rho * width) = 1. Every bin gets a mean.
BinnedStatistic density_of_states(std::span<const double> epsilons, std::size_t bins = 100,
                                  BinMode mode = BinMode::EqualWidth);

BinnedStatistic bin_values(std::span<const double> epsilons, std::span<const double> values,
                           std::size_t bins = 100);

// Defined r-ratios binned by the scaled energy of their middle level.
BinnedStatistic binned_r(std::span<const double> eigenvalues, std::size_t bins = 100);

}  // namespace polariton
