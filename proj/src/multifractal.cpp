#include "polariton/multifractal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "polariton/error.hpp"

namespace polariton {

GfdRecord gfd(std::span<const double> intensities, double q, double basis_size) {
  if (!(q > 0.0)) throw DomainError("GFD order q must be positive");
  if (!(basis_size >= 2.0)) throw DomainError("GFD basis size must be at least 2");
  double norm = 0.0;
  for (double p : intensities) norm += p;
  if (!(std::abs(norm - 1.0) <= 1e-10)) {
    throw DomainError("state is not normalized (sum |psi|^2 = " + std::to_string(norm) + ")");
  }
  const double log_n = std::log(basis_size);
  GfdRecord rec{q, 0.0, basis_size};
  if (std::isinf(q)) {
    const double peak = *std::max_element(intensities.begin(), intensities.end());
    rec.value = -std::log(peak) / log_n;
  } else if (q == 1.0) {
    double entropy = 0.0;
    for (double p : intensities) {
      if (p >= kIntensityFloor) entropy -= p * std::log(p);
    }
    rec.value = entropy / log_n;
  } else {
    double moment = 0.0;
    for (double p : intensities) {
      if (p > 0.0) moment += std::pow(p, q);
    }
    rec.value = std::log(moment) / ((1.0 - q) * log_n);
  }
  // An exactly localized state gives -0.0 in some branches.
  if (rec.value == 0.0) rec.value = 0.0;
  return rec;
}

GfdRecord gfd(const Eigen::VectorXd& amplitudes, double q, double basis_size) {
  const Eigen::VectorXd p = amplitudes.array().square();
  return gfd(std::span(p.data(), static_cast<std::size_t>(p.size())), q, basis_size);
}

GfdRecord gfd(const Eigen::VectorXcd& amplitudes, double q, double basis_size) {
  const Eigen::VectorXd p = amplitudes.cwiseAbs2();
  return gfd(std::span(p.data(), static_cast<std::size_t>(p.size())), q, basis_size);
}

double harmonic_number(double x) {
  if (!(x > -1.0)) throw DomainError("harmonic number needs x > -1");
  return boost::math::digamma(x + 1.0) + std::numbers::egamma;
}

GoeReference goe_reference(double dimension) {
  if (!(dimension >= 2.0)) throw DomainError("GOE reference needs dimension >= 2");
  const double d = dimension;
  const double log_d = std::log(d);
  GoeReference ref;
  ref.dimension = d;
  ref.mean_d1 = (harmonic_number(d / 2.0) - 2.0 + std::log(4.0)) / log_d;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  ref.var_d1 = ((3.0 * pi2 - 24.0) * (d + 2.0) - 8.0) / (2.0 * (d + 2.0) * (d + 2.0) * log_d * log_d) -
               boost::math::trigamma(2.0 + d / 2.0) / (log_d * log_d);
  return ref;
}

std::vector<double> gfd_per_state(const SpectrumResult& spectrum, double q) {
  if (!spectrum.has_vectors()) throw DomainError("spectrum has no eigenvectors");
  const Eigen::Index d = spectrum.dim();
  std::vector<double> out(static_cast<std::size_t>(d));
  const double base = static_cast<double>(std::max<Eigen::Index>(d, 2));
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::VectorXd p = spectrum.intensities(k);
    out[static_cast<std::size_t>(k)] = gfd(std::span(p.data(), static_cast<std::size_t>(p.size())), q, base).value;
  }
  return out;
}

GfdWindowStats gfd_window_stats(const SpectrumResult& spectrum, double q, IndexWindow window, std::size_t bins) {
  GfdWindowStats out;
  out.q = q;
  out.values = gfd_per_state(spectrum, q);
  window.end = std::min(window.end, out.values.size());
  if (window.size() == 0) throw DomainError("empty GFD window");
  const std::span<const double> levels(spectrum.eigenvalues.data(), static_cast<std::size_t>(spectrum.dim()));
  const auto degenerate = degenerate_levels(levels);
  double sum = 0.0;
  for (std::size_t k = window.begin; k < window.end; ++k) {
    if (degenerate[k]) {
      ++out.excluded;
      continue;
    }
    sum += out.values[k];
    ++out.count;
  }
  if (out.count == 0) throw DomainError("every state in the GFD window is degenerate");
  out.mean = sum / static_cast<double>(out.count);
  double sq = 0.0;
  for (std::size_t k = window.begin; k < window.end; ++k) {
    if (!degenerate[k]) sq += (out.values[k] - out.mean) * (out.values[k] - out.mean);
  }
  out.variance = sq / static_cast<double>(out.count);
  if (spectrum.dim() >= 2) {
    const auto scaled = scale_energies(levels);
    std::vector<double> eps, vals;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      if (degenerate[k]) continue;
      eps.push_back(scaled.epsilons[k]);
      vals.push_back(out.values[k]);
    }
    out.bins = bin_values(eps, vals, bins);
  }
  return out;
}

}  // namespace polariton
