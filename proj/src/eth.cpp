#include "polariton/eth.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "polariton/error.hpp"

namespace polariton {

namespace {

void check_compatible(const SpectrumResult& spectrum, const SectorOperator& op) {
  if (!spectrum.has_vectors()) throw DomainError("ETH analysis needs eigenvectors");
  if (op.dim() != spectrum.dim()) {
    throw DimensionMismatchError(fmt::format("observable has dimension {} but the spectrum has {}", op.dim(),
                                             spectrum.dim()));
  }
  if (!spectrum.has_real_vectors() && op.is_real()) return;  // real operator, complex vectors is fine
  if (spectrum.has_real_vectors() && !op.is_real()) {
    throw DimensionMismatchError("complex observable paired with real eigenvectors");
  }
}

template <typename Sparse, typename Mat>
std::vector<double> quadratic_forms(const Sparse& op, const Mat& vectors) {
  constexpr Eigen::Index kBlock = 256;
  std::vector<double> out(static_cast<std::size_t>(vectors.cols()));
  for (Eigen::Index start = 0; start < vectors.cols(); start += kBlock) {
    const Eigen::Index width = std::min(kBlock, vectors.cols() - start);
    const Mat applied = op * vectors.middleCols(start, width);
    for (Eigen::Index j = 0; j < width; ++j) {
      out[static_cast<std::size_t>(start + j)] = std::real(vectors.col(start + j).dot(applied.col(j)));
    }
  }
  return out;
}

double mean_of(const std::vector<double>& eps) {
  double sum = 0.0;
  for (double e : eps) sum += e;
  return sum / static_cast<double>(eps.size());
}

std::vector<double> scaled(const SpectrumResult& spectrum) {
  return scale_energies(std::span(spectrum.eigenvalues.data(), static_cast<std::size_t>(spectrum.dim()))).epsilons;
}

template <typename Sparse, typename Mat>
void collect_pairs(const Sparse& op, const Mat& vectors, const std::vector<double>& eps, EthOffdiag& out) {
  using Vec = Eigen::Matrix<typename Mat::Scalar, Eigen::Dynamic, 1>;
  const std::size_t d = eps.size();
  const double lo = out.lower * out.eps_av;
  const double hi = out.upper * out.eps_av;
  Vec applied;
  for (std::size_t alpha = 1; alpha < d; ++alpha) {
    // Partners beta < alpha with (eps_alpha + eps_beta)/2 strictly inside (lo, hi).
    const auto first = std::upper_bound(eps.begin(), eps.begin() + static_cast<std::ptrdiff_t>(alpha),
                                        2.0 * lo - eps[alpha] - 1e-12);
    const auto last = std::lower_bound(first, eps.begin() + static_cast<std::ptrdiff_t>(alpha),
                                       2.0 * hi - eps[alpha] + 1e-12);
    bool computed = false;
    for (auto it = first; it != last; ++it) {
      const auto beta = static_cast<std::size_t>(it - eps.begin());
      const double ratio = 0.5 * (eps[alpha] + eps[beta]) / out.eps_av;
      if (!(ratio > out.lower && ratio < out.upper)) continue;
      if (!computed) {
        applied = op * vectors.col(static_cast<Eigen::Index>(alpha));
        computed = true;
      }
      const double magnitude = std::abs(vectors.col(static_cast<Eigen::Index>(beta)).dot(applied));
      out.elements.push_back({alpha, beta, eps[alpha] - eps[beta], magnitude});
    }
  }
}

}  // namespace

std::vector<double> EthDiagonal::window_values() const {
  return {values.begin() + static_cast<std::ptrdiff_t>(window.begin),
          values.begin() + static_cast<std::ptrdiff_t>(window.end)};
}

EthDiagonal diagonal_elements(const SpectrumResult& spectrum, const SectorOperator& observable,
                              std::optional<IndexWindow> window) {
  check_compatible(spectrum, observable);
  EthDiagonal out;
  out.epsilons = scaled(spectrum);
  out.eps_av = mean_of(out.epsilons);
  out.window = window.value_or(middle_third(out.epsilons.size()));
  out.window.end = std::min(out.window.end, out.epsilons.size());
  if (spectrum.has_real_vectors()) {
    out.values = quadratic_forms(observable.real(), spectrum.real_vectors());
  } else {
    out.values = quadratic_forms(observable.as_complex(), spectrum.complex_vectors());
  }
  return out;
}

double z_statistic(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("Z statistic needs at least two states");
  double sum = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) sum += std::abs(values[k] - values[k - 1]);
  return sum / static_cast<double>(values.size() - 1);
}

std::vector<double> running_average(std::span<const double> series, std::size_t subset) {
  if (subset == 0) throw DomainError("running-average subset must be positive");
  std::vector<double> out(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    if (i >= subset) sum -= series[i - subset];
    out[i] = sum / static_cast<double>(std::min(i + 1, subset));
  }
  return out;
}

EthOffdiag offdiagonal_elements(const SpectrumResult& spectrum, const SectorOperator& observable, double delta,
                                std::size_t subset) {
  check_compatible(spectrum, observable);
  if (!(delta > 0.0)) throw DomainError("ETH window width must be positive");
  const auto eps = scaled(spectrum);
  EthOffdiag out;
  out.eps_av = mean_of(eps);
  out.delta = delta;
  out.lower = 1.0 - delta / 2.0;
  out.upper = 1.0 + delta / 2.0;
  out.subset = subset;
  if (spectrum.has_real_vectors()) {
    collect_pairs(observable.real(), spectrum.real_vectors(), eps, out);
  } else {
    collect_pairs(observable.as_complex(), spectrum.complex_vectors(), eps, out);
  }
  if (out.elements.empty()) {
    throw DomainError(fmt::format("no eigenstate pair with {:.6g} < mean eps / eps_av < {:.6g}", out.lower,
                                  out.upper));
  }
  std::stable_sort(out.elements.begin(), out.elements.end(),
                   [](const OffDiagonalElement& a, const OffDiagonalElement& b) { return a.omega < b.omega; });
  std::vector<double> magnitudes;
  magnitudes.reserve(out.elements.size());
  double sum = 0.0;
  for (const auto& e : out.elements) {
    magnitudes.push_back(e.magnitude);
    sum += e.magnitude;
  }
  out.mean_magnitude = sum / static_cast<double>(magnitudes.size());
  out.running_average = running_average(magnitudes, subset);
  return out;
}

}  // namespace polariton
