#include "polariton/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polariton/error.hpp"

namespace polariton {

ScaledSpectrum scale_energies(std::span<const double> eigenvalues) {
  if (eigenvalues.size() < 2) throw DomainError("scaling needs at least two levels");
  const auto [lo, hi] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
  ScaledSpectrum out;
  out.e_min = *lo;
  out.e_max = *hi;
  const double width = out.e_max - out.e_min;
  if (!(width > 0.0)) throw DomainError("degenerate spectrum: E_max == E_min");
  out.epsilons.reserve(eigenvalues.size());
  for (double e : eigenvalues) out.epsilons.push_back((e - out.e_min) / width);
  // Pin the ends so rounding cannot push them outside [0, 1].
  out.epsilons[lo - eigenvalues.begin()] = 0.0;
  out.epsilons[hi - eigenvalues.begin()] = 1.0;
  return out;
}

IndexWindow middle_third(std::size_t dimension) {
  return {dimension / 3, 2 * dimension / 3};
}

IndexWindow energy_window(std::span<const double> epsilons, double lo, double hi, bool right_closed) {
  const auto first = std::lower_bound(epsilons.begin(), epsilons.end(), lo);
  const auto last = right_closed ? std::upper_bound(first, epsilons.end(), hi)
                                 : std::lower_bound(first, epsilons.end(), hi);
  return {static_cast<std::size_t>(first - epsilons.begin()), static_cast<std::size_t>(last - epsilons.begin())};
}

RRatios r_ratios(std::span<const double> eigenvalues, double relative_floor) {
  const std::size_t n = eigenvalues.size();
  if (n < 3) throw DomainError("r-ratios need at least three levels, got " + std::to_string(n));
  RRatios out;
  out.floor = relative_floor * (eigenvalues[n - 1] - eigenvalues[0]);
  out.values.reserve(n - 2);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const double a = eigenvalues[k + 1] - eigenvalues[k];
    const double b = eigenvalues[k + 2] - eigenvalues[k + 1];
    if (a < 0.0 || b < 0.0) throw DomainError("eigenvalues are not ascending");
    if (a <= out.floor || b <= out.floor) {
      out.values.emplace_back();
      ++out.excluded;
      continue;
    }
    out.values.emplace_back(std::min(a, b) / std::max(a, b));
  }
  return out;
}

std::vector<bool> degenerate_levels(std::span<const double> eigenvalues, double relative_floor) {
  const std::size_t n = eigenvalues.size();
  std::vector<bool> out(n, false);
  if (n < 2) return out;
  const double floor = relative_floor * (eigenvalues[n - 1] - eigenvalues[0]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (eigenvalues[k + 1] - eigenvalues[k] <= floor) out[k] = out[k + 1] = true;
  }
  return out;
}

MeanR mean_r(std::span<const double> eigenvalues, IndexWindow window) {
  const auto r = r_ratios(eigenvalues);
  MeanR out;
  double sum = 0.0;
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    if (!window.contains(r.level_of(k))) continue;
    if (!r.values[k]) {
      ++out.excluded;
      continue;
    }
    sum += *r.values[k];
    ++out.count;
  }
  if (out.count == 0) throw DomainError("no defined r-ratio inside the window");
  out.mean = sum / static_cast<double>(out.count);
  return out;
}

std::size_t BinnedStatistic::total() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::size_t bin_index(double epsilon, std::size_t bins) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("scaled energy outside [0,1]: " + std::to_string(epsilon));
  }
  return std::min(static_cast<std::size_t>(epsilon * static_cast<double>(bins)), bins - 1);
}

namespace {

BinnedStatistic empty_bins(std::size_t bins) {
  if (bins == 0) throw DomainError("bin count must be positive");
  BinnedStatistic out;
  out.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) out.edges[b] = static_cast<double>(b) / static_cast<double>(bins);
  out.counts.assign(bins, 0);
  out.mean.assign(bins, std::nullopt);
  out.variance.assign(bins, std::nullopt);
  return out;
}

}  // namespace

BinnedStatistic density_of_states(std::span<const double> epsilons, std::size_t bins, BinMode mode) {
  auto out = empty_bins(bins);
  const std::size_t d = epsilons.size();
  if (d == 0) return out;
  if (mode == BinMode::EqualWidth) {
    for (double e : epsilons) ++out.counts[bin_index(e, bins)];
  } else {
    // Bin b holds sorted levels [b*D/bins, (b+1)*D/bins); its edges sit at the
    // first level of each block so the widths still tile [0, 1].
    std::vector<double> sorted(epsilons.begin(), epsilons.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t b = 0; b < bins; ++b) {
      const std::size_t first = b * d / bins;
      const std::size_t last = (b + 1) * d / bins;
      out.counts[b] = last - first;
      out.edges[b] = b == 0 ? 0.0 : (first < d ? sorted[first] : 1.0);
    }
    out.edges[bins] = 1.0;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    const double w = out.width(b);
    out.mean[b] = w > 0.0 ? static_cast<double>(out.counts[b]) / (static_cast<double>(d) * w)
                          : (out.counts[b] == 0 ? 0.0 : INFINITY);
  }
  return out;
}

BinnedStatistic bin_values(std::span<const double> epsilons, std::span<const double> values, std::size_t bins) {
  if (epsilons.size() != values.size()) {
    throw DimensionMismatchError("bin_values: " + std::to_string(epsilons.size()) + " energies vs " +
                                 std::to_string(values.size()) + " values");
  }
  auto out = empty_bins(bins);
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> index(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    index[i] = bin_index(epsilons[i], bins);
    ++out.counts[index[i]];
    sum[index[i]] += values[i];
  }
  std::vector<double> squares(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    if (out.counts[b] > 0) out.mean[b] = sum[b] / static_cast<double>(out.counts[b]);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dev = values[i] - *out.mean[index[i]];
    squares[index[i]] += dev * dev;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (out.counts[b] > 0) out.variance[b] = squares[b] / static_cast<double>(out.counts[b]);
  }
  return out;
}

BinnedStatistic binned_r(std::span<const double> eigenvalues, std::size_t bins) {
  const auto scaled = scale_energies(eigenvalues);
  const auto r = r_ratios(eigenvalues);
  std::vector<double> eps;
  std::vector<double> vals;
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    if (!r.values[k]) continue;
    eps.push_back(scaled.epsilons[r.level_of(k)]);
    vals.push_back(*r.values[k]);
  }
  return bin_values(eps, vals, bins);
}

}  // namespace polariton
