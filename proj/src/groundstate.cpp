#include "polariton/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "polariton/error.hpp"
#include "polariton/multifractal.hpp"

namespace polariton {

double GsSweepPoint::dq(double q) const {
  if (q == 1.0) return d1;
  if (q == 2.0) return d2;
  if (std::isinf(q)) return dinf;
  throw DomainError(fmt::format("ground-state sweeps record q = 1, 2, inf only (got {})", q));
}

Sector GroundStateSolver::ground_sector(int sites, int excitations, Boundary boundary) {
  Sector s;
  s.sites = sites;
  s.excitations = excitations;
  s.boundary = boundary;
  if (boundary == Boundary::Periodic) s.momentum = 0;
  s.parity = Parity::Even;
  return s;
}

GroundStateSolver::GroundStateSolver(int sites, int excitations, Boundary boundary, double delta, double g,
                                     std::size_t max_states)
    : sites_(sites),
      excitations_(excitations),
      boundary_(boundary),
      delta_(delta),
      g_(g),
      basis_(SymBasis::build(ground_sector(sites, excitations, boundary),
                             std::make_shared<const ProductBasis>(ProductBasis::enumerate(sites, excitations, max_states)))) {
  const auto block = build_hamiltonian({delta, g, 1.0, boundary}, basis_);
  interaction_ = block.interaction.real();
  hopping_ = block.tunneling.real();
}

SectorOperator GroundStateSolver::hamiltonian(double t) const {
  ModelParams{delta_, g_, t, boundary_}.validate();
  SectorOperator::RealMatrix h = interaction_ + t * hopping_;
  h.prune(0.0);
  return SectorOperator(std::move(h));
}

Eigenpair GroundStateSolver::solve(double t, const LanczosOptions& options) const {
  try {
    return extremal_eigenpair(hamiltonian(t), options);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(fmt::format("ground state at L={} {} delta={} t={}: {}", sites_, to_string(boundary_),
                                       delta_, t, e.what()),
                           e.residual());
  }
}

Eigen::VectorXd GroundStateSolver::bare_state(const Eigenpair& pair) const {
  return basis_.expand(pair.real_vector());
}

GsSweepPoint GroundStateSolver::point(double t, const LanczosOptions& options) const {
  const auto pair = solve(t, options);
  const Eigen::VectorXd bare = bare_state(pair);
  const double n = full_dimension();
  GsSweepPoint p;
  p.t = t;
  p.delta = delta_;
  p.sites = sites_;
  p.excitations = excitations_;
  p.boundary = boundary_;
  p.energy = pair.value;
  p.residual = pair.residual;
  if (n >= 2.0) {
    p.d1 = gfd(bare, 1.0, n).value;
    p.d2 = gfd(bare, 2.0, n).value;
    p.dinf = gfd(bare, kInfiniteQ, n).value;
  }
  return p;
}

std::vector<GsSweepPoint> gs_sweep(const std::vector<double>& grid, double delta, int sites, int excitations,
                                   Boundary boundary, const LanczosOptions& options) {
  const GroundStateSolver solver(sites, excitations, boundary, delta);
  std::vector<GsSweepPoint> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(solver.point(t, options));
  return out;
}

Eigen::VectorXd analytic_infinite_t_state(const ProductBasis& basis) {
  const auto& codec = basis.codec();
  const int L = codec.sites();
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const StateKey key = basis.key(i);
    int n = 0;
    double log_weight = 0.0;
    bool atoms_down = true;
    for (int s = 0; s < L; ++s) {
      if (codec.atom(key, s) != 0) {
        atoms_down = false;
        break;
      }
      const int nu = codec.photons(key, s);
      n += nu;
      log_weight -= std::lgamma(nu + 1.0);
    }
    if (!atoms_down) continue;
    log_weight += std::lgamma(n + 1.0) - n * std::log(static_cast<double>(L));
    psi[static_cast<Eigen::Index>(i)] = std::exp(0.5 * log_weight);
  }
  return psi;
}

Eigen::VectorXd analytic_infinite_t_state(int sites, int excitations) {
  return analytic_infinite_t_state(ProductBasis::enumerate(sites, excitations));
}

std::vector<double> geometric_grid(double lo, double hi, int points_per_decade) {
  if (!(lo > 0.0 && hi > lo) || points_per_decade < 1) throw DomainError("invalid geometric grid");
  const double decades = std::log10(hi / lo);
  const int steps = std::max(1, static_cast<int>(std::lround(decades * points_per_decade)));
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) grid[static_cast<std::size_t>(k)] = lo * std::pow(10.0, decades * k / steps);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<DerivativePoint> gfd_derivative(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  if (f.size() != n) throw DimensionMismatchError("derivative needs one value per grid point");
  if (n < 3) throw DomainError("derivative needs at least three grid points");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t[i] > t[i - 1])) throw DomainError("derivative grid must be strictly increasing");
  }
  std::vector<DerivativePoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (i == 0) {
      const double h1 = t[1] - t[0], h2 = t[2] - t[1];
      d = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2];
    } else if (i == n - 1) {
      const double h1 = t[n - 2] - t[n - 3], h2 = t[n - 1] - t[n - 2];
      d = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] +
          (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
    } else {
      const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
      d = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    out[i] = {t[i], d};
  }
  return out;
}

std::vector<DerivativePoint> gfd_derivative(const std::vector<GsSweepPoint>& sweep, double q) {
  std::vector<double> t, f;
  for (const auto& p : sweep) {
    t.push_back(p.t);
    f.push_back(p.dq(q));
  }
  return gfd_derivative(t, f);
}

ArgMax argmax_abs_derivative(const std::vector<DerivativePoint>& derivative) {
  if (derivative.empty()) throw DomainError("empty derivative series");
  ArgMax best;
  best.magnitude = -1.0;
  for (std::size_t i = 0; i < derivative.size(); ++i) {
    const double m = std::abs(derivative[i].value);
    if (m > best.magnitude) {
      best.index = i;
      best.t = derivative[i].t;
      best.magnitude = m;
    }
  }
  best.on_boundary = best.index == 0 || best.index + 1 == derivative.size();
  return best;
}

CriticalEstimate critical_bracket(const std::vector<GsSweepPoint>& periodic, const std::vector<GsSweepPoint>& hard_wall,
                                  double q) {
  if (periodic.size() != hard_wall.size()) throw DimensionMismatchError("boundary sweeps differ in length");
  for (std::size_t i = 0; i < periodic.size(); ++i) {
    if (periodic[i].t != hard_wall[i].t) throw DimensionMismatchError("boundary sweeps use different grids");
  }
  CriticalEstimate est;
  est.q = q;
  est.sites = periodic.empty() ? 0 : periodic.front().sites;
  est.periodic = argmax_abs_derivative(gfd_derivative(periodic, q));
  est.hard_wall = argmax_abs_derivative(gfd_derivative(hard_wall, q));
  est.lower = std::min(est.periodic.t, est.hard_wall.t);
  est.upper = std::max(est.periodic.t, est.hard_wall.t);
  est.boundary_warning = est.periodic.on_boundary || est.hard_wall.on_boundary;
  return est;
}

namespace {

void merge_points(std::vector<GsSweepPoint>& sweep, std::vector<GsSweepPoint> extra) {
  sweep.insert(sweep.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  std::sort(sweep.begin(), sweep.end(), [](const GsSweepPoint& a, const GsSweepPoint& b) { return a.t < b.t; });
}

}  // namespace

CriticalSearch find_critical_point(double delta, int sites, int excitations, const CriticalSearchOptions& options) {
  const auto grid = geometric_grid(options.t_min, options.t_max, options.points_per_decade);
  const GroundStateSolver pbc(sites, excitations, Boundary::Periodic, delta);
  const GroundStateSolver hwbc(sites, excitations, Boundary::HardWall, delta);
  CriticalSearch out;
  for (double t : grid) {
    out.periodic.push_back(pbc.point(t, options.lanczos));
    out.hard_wall.push_back(hwbc.point(t, options.lanczos));
  }

  std::set<std::size_t> centers;
  for (double q : kGroundStateOrders) {
    centers.insert(argmax_abs_derivative(gfd_derivative(out.periodic, q)).index);
    centers.insert(argmax_abs_derivative(gfd_derivative(out.hard_wall, q)).index);
  }
  std::set<double> refine;
  const int r = options.refine_points;
  for (std::size_t c : centers) {
    for (std::size_t side : {c, c + 1}) {
      if (side == 0 || side >= grid.size()) continue;
      const double a = grid[side - 1], b = grid[side];
      for (int k = 1; k <= r; ++k) refine.insert(a + (b - a) * k / (r + 1));
    }
  }
  std::vector<GsSweepPoint> extra_p, extra_h;
  for (double t : refine) {
    extra_p.push_back(pbc.point(t, options.lanczos));
    extra_h.push_back(hwbc.point(t, options.lanczos));
  }
  merge_points(out.periodic, std::move(extra_p));
  merge_points(out.hard_wall, std::move(extra_h));
  for (double q : kGroundStateOrders) out.estimates.push_back(critical_bracket(out.periodic, out.hard_wall, q));
  return out;
}

}  // namespace polariton
